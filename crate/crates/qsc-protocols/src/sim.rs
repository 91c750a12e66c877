//! The distant-labs simulator: a state over labeled registers with per-label
//! party ownership, local operations checked against ownership, and unit
//! resource invocations tallied into a consumption ledger.

use crate::error::{ProtoError, Result};
use qsc_calculus::{Coefficient, Rat, ResourceExpr, ResourceSymbol};
use qsc_core::channel::{apply, apply_instrument, ChannelSpec, InstrumentSpec, IsometrySpec};
use qsc_core::standard::{dephasing_classical_channel, identity_channel};
use qsc_core::StateSpec;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Party {
    Alice,
    Bob,
    Reference,
    Environment,
}

#[derive(Clone, Debug)]
pub struct Simulation {
    state: StateSpec,
    owner: BTreeMap<String, Party>,
    keep_env: bool,
    env_count: usize,
    consumed: ResourceExpr,
    created: ResourceExpr,
    /// worst trace distance between a resource input restriction and its
    /// test state, across all invocations that carry one
    pub validity: f64,
}

fn rational(n: i64) -> Coefficient {
    Coefficient::from_rat(Rat::from_integer(n.into()))
}

impl Simulation {
    pub fn new(state: StateSpec, owners: &[(&str, Party)], keep_env: bool) -> Result<Self> {
        let mut owner = BTreeMap::new();
        for (l, p) in owners {
            if !state.layout().contains(l) {
                return Err(ProtoError::UnknownLabel(l.to_string()));
            }
            owner.insert(l.to_string(), *p);
        }
        for l in state.layout().labels() {
            if !owner.contains_key(l) {
                return Err(ProtoError::UnknownLabel(format!("unowned label {l}")));
            }
        }
        Ok(Simulation {
            state,
            owner,
            keep_env,
            env_count: 0,
            consumed: ResourceExpr::empty(),
            created: ResourceExpr::empty(),
            validity: 0.0,
        })
    }

    pub fn state(&self) -> &StateSpec {
        &self.state
    }

    pub fn consumed(&self) -> &ResourceExpr {
        &self.consumed
    }

    pub fn created(&self) -> &ResourceExpr {
        &self.created
    }

    pub fn note_created(&mut self, e: &ResourceExpr) {
        self.created = self.created.add(e);
    }

    pub fn owner_of(&self, label: &str) -> Option<Party> {
        self.owner.get(label).copied()
    }

    pub fn env_labels(&self) -> Vec<String> {
        self.owner
            .iter()
            .filter(|(_, p)| **p == Party::Environment)
            .map(|(l, _)| l.clone())
            .collect()
    }

    fn check_owned(&self, party: Party, labels: &[&str]) -> Result<()> {
        for l in labels {
            match self.owner.get(*l) {
                Some(p) if *p == party => {}
                Some(p) => {
                    return Err(ProtoError::Ownership(format!(
                        "{party:?} touched `{l}` owned by {p:?}"
                    )))
                }
                None => return Err(ProtoError::UnknownLabel(l.to_string())),
            }
        }
        Ok(())
    }

    fn adopt_outputs(&mut self, out_labels: &[String], party: Party) {
        for l in out_labels {
            self.owner.entry(l.clone()).or_insert(party);
        }
    }

    fn fresh_env(&mut self) -> String {
        self.env_count += 1;
        format!("ENV{}", self.env_count)
    }

    /// Local CPTP map on a party's registers. In environment-keeping mode the
    /// Stinespring dilation is applied instead and the environment register
    /// is retained.
    pub fn local_channel(&mut self, party: Party, c: &ChannelSpec, targets: &[&str]) -> Result<()> {
        self.check_owned(party, targets)?;
        if self.keep_env && c.kraus().len() > 1 {
            let env = self.fresh_env();
            let v = c.stinespring(&env)?;
            self.state = apply(&v, &self.state, targets)?;
            for l in targets {
                self.owner.remove(*l);
            }
            self.adopt_outputs(&v.out_layout().labels().to_vec(), party);
            self.owner.insert(env, Party::Environment);
        } else {
            self.state = apply(c, &self.state, targets)?;
            for l in targets {
                self.owner.remove(*l);
            }
            self.adopt_outputs(&c.out_layout().labels().to_vec(), party);
        }
        Ok(())
    }

    pub fn local_isometry(&mut self, party: Party, v: &IsometrySpec, targets: &[&str]) -> Result<()> {
        self.check_owned(party, targets)?;
        self.state = apply(v, &self.state, targets)?;
        for l in targets {
            self.owner.remove(*l);
        }
        self.adopt_outputs(&v.out_layout().labels().to_vec(), party);
        Ok(())
    }

    /// Local instrument; the classical outcome register stays with the party.
    pub fn local_instrument(
        &mut self,
        party: Party,
        t: &InstrumentSpec,
        targets: &[&str],
        outcome: &str,
    ) -> Result<()> {
        self.check_owned(party, targets)?;
        self.state = apply_instrument(t, &self.state, targets, outcome)?;
        for l in targets {
            self.owner.remove(*l);
        }
        self.adopt_outputs(&t.out_layout().labels().to_vec(), party);
        self.owner.insert(outcome.to_string(), party);
        Ok(())
    }

    pub fn discard(&mut self, labels: &[&str]) -> Result<()> {
        let keep: Vec<&str> = self
            .state
            .layout()
            .labels()
            .iter()
            .filter(|l| !labels.contains(&l.as_str()))
            .map(|l| l.as_str())
            .collect();
        self.state = self.state.partial_trace(&keep)?;
        for l in labels {
            self.owner.remove(*l);
        }
        Ok(())
    }

    /// Append a shared resource state with explicit ownership, tallying it
    /// into the consumption ledger.
    pub fn append_resource(
        &mut self,
        s: &StateSpec,
        owners: &[(&str, Party)],
        ledger: ResourceExpr,
    ) -> Result<()> {
        self.state = self.state.tensor(s)?;
        for (l, p) in owners {
            self.owner.insert(l.to_string(), *p);
        }
        self.consumed = self.consumed.add(&ledger);
        Ok(())
    }

    pub fn append_ebit(&mut self, a: &str, b: &str) -> Result<()> {
        let phi = qsc_core::standard::max_entangled(a, b, 2)?;
        self.append_resource(
            &phi,
            &[(a, Party::Alice), (b, Party::Bob)],
            ResourceExpr::unit(ResourceSymbol::Ebit),
        )
    }

    /// Noiseless qubit channel: ownership of the register moves to Bob.
    pub fn invoke_qubit(&mut self, label: &str, to_label: &str) -> Result<()> {
        self.check_owned(Party::Alice, &[label])?;
        let d = self.state.layout().dim_of(label)?;
        if d != 2 {
            return Err(ProtoError::Dimension(format!(
                "qubit channel on a dim-{d} register"
            )));
        }
        let id = identity_channel(label, to_label, 2)?;
        self.state = apply(&id, &self.state, &[label])?;
        self.owner.remove(label);
        self.owner.insert(to_label.to_string(), Party::Bob);
        self.consumed = self
            .consumed
            .add(&ResourceExpr::unit(ResourceSymbol::Qubit));
        Ok(())
    }

    /// Noiseless classical channel on a d-dimensional register, costing
    /// log2(d) cbits. In environment-keeping mode the dephasing environment
    /// (a basis copy) is retained.
    pub fn invoke_cbits(&mut self, label: &str, to_label: &str) -> Result<()> {
        self.check_owned(Party::Alice, &[label])?;
        let d = self.state.layout().dim_of(label)?;
        let chan = dephasing_classical_channel(label, to_label, d)?;
        if self.keep_env {
            let env = self.fresh_env();
            let v = chan.stinespring(&env)?;
            self.state = apply(&v, &self.state, &[label])?;
            self.owner.insert(env, Party::Environment);
        } else {
            self.state = apply(&chan, &self.state, &[label])?;
        }
        self.owner.remove(label);
        self.owner.insert(to_label.to_string(), Party::Bob);
        let bits = (d as f64).log2();
        let bits_rat = if bits.fract() == 0.0 {
            rational(bits as i64)
        } else {
            return Err(ProtoError::Dimension(format!(
                "classical register dimension {d} is not a power of two"
            )));
        };
        self.consumed = self
            .consumed
            .add(&ResourceExpr::term(ResourceSymbol::Cbit, bits_rat));
        Ok(())
    }

    /// Coherent channel Δ on a register: Alice keeps a copy, Bob receives one.
    pub fn invoke_cobit(&mut self, label: &str, keep_label: &str, to_label: &str) -> Result<()> {
        self.check_owned(Party::Alice, &[label])?;
        let d = self.state.layout().dim_of(label)?;
        if d != 2 {
            return Err(ProtoError::Dimension(format!(
                "cobit channel on a dim-{d} register"
            )));
        }
        let delta = qsc_core::standard::coherent_channel(label, keep_label, to_label, 2)?;
        self.state = apply(&delta, &self.state, &[label])?;
        self.owner.remove(label);
        self.owner.insert(keep_label.to_string(), Party::Alice);
        self.owner.insert(to_label.to_string(), Party::Bob);
        self.consumed = self
            .consumed
            .add(&ResourceExpr::unit(ResourceSymbol::Cobit));
        Ok(())
    }

    /// Move ownership of a label (channel outputs land at the receiver).
    pub fn reassign(&mut self, label: &str, party: Party) -> Result<()> {
        if !self.state.layout().contains(label) {
            return Err(ProtoError::UnknownLabel(label.to_string()));
        }
        self.owner.insert(label.to_string(), party);
        Ok(())
    }

    /// Tally log2(d) units of a consumed resource symbol; dimensions that
    /// are not powers of two count as one use of the d-dimensional resource.
    pub fn tally_consumed(&mut self, sym: ResourceSymbol, d: usize) -> Result<()> {
        let bits = (d as f64).log2();
        let amount = if bits.fract() == 0.0 {
            Coefficient::from_rat(Rat::from_integer((bits as i64).into()))
        } else {
            Coefficient::one()
        };
        self.consumed = self
            .consumed
            .add(&ResourceExpr::term(sym, amount));
        Ok(())
    }

    /// Record a validity measurement: trace distance between the restriction
    /// of the current state to `labels` and the expected test state.
    pub fn check_validity(&mut self, labels: &[&str], expected: &StateSpec) -> Result<f64> {
        let restr = self.state.partial_trace(labels)?;
        let d = qsc_core::info::trace_distance(&restr, expected)?;
        self.validity = self.validity.max(d);
        Ok(d)
    }
}

/// Residual of the product approximation σ^{XQ} ≈ σ^X ⊗ σ^Q. In coherent
/// mode Q includes the environment registers; in incoherent mode they are
/// traced out first.
pub fn decoupling_residual(
    state: &StateSpec,
    classical_labels: &[&str],
    env_labels: &[&str],
    coherent: bool,
) -> Result<f64> {
    let working = if coherent {
        state.clone()
    } else {
        let keep: Vec<&str> = state
            .layout()
            .labels()
            .iter()
            .filter(|l| !env_labels.contains(&l.as_str()))
            .map(|l| l.as_str())
            .collect();
        state.partial_trace(&keep)?
    };
    for l in classical_labels {
        if !working.layout().contains(l) {
            return Err(ProtoError::UnknownLabel(l.to_string()));
        }
    }
    let rest: Vec<&str> = working
        .layout()
        .labels()
        .iter()
        .filter(|l| !classical_labels.contains(&l.as_str()))
        .map(|l| l.as_str())
        .collect();
    let x_part = working.partial_trace(classical_labels)?;
    let q_part = working.partial_trace(&rest)?;
    let product = x_part.tensor(&q_part)?;
    let ordered: Vec<&str> = working.layout().labels().iter().map(|l| l.as_str()).collect();
    let product = product.permute(&ordered)?;
    qsc_core::info::trace_distance(&working, &product).map_err(Into::into)
}
