//! Proof objects: a DAG of derivation steps, checked by recomputing every
//! conclusion. The JSON format stores conclusions as grammar strings.

use crate::axioms::AxiomDb;
use crate::context::ContextSet;
use crate::error::{CalcError, Result};
use crate::expr::{IdentityBasis, ResourceInequality};
use crate::rules::{apply_rule, Instantiation, RuleKind};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DerivationStep {
    pub rule: String,
    pub premises: Vec<usize>,
    pub instantiation: Instantiation,
    pub conclusion: ResourceInequality,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Proof {
    pub name: String,
    pub target: ResourceInequality,
    #[serde(default)]
    pub contexts: ContextSet,
    #[serde(default)]
    pub basis: IdentityBasis,
    pub steps: Vec<DerivationStep>,
}

impl Proof {
    /// Recompute every step; the stored conclusion must match the recomputed
    /// one modulo normalize, and the final step must match the target.
    pub fn check(&self, db: &AxiomDb) -> Result<()> {
        if self.steps.is_empty() {
            return Err(CalcError::ProofStep { step: 0, reason: "proof has no steps".into() });
        }
        for (i, step) in self.steps.iter().enumerate() {
            let kind = RuleKind::parse(&step.rule)
                .map_err(|e| CalcError::ProofStep { step: i, reason: e.to_string() })?;
            for &p in &step.premises {
                if p >= i {
                    return Err(CalcError::ProofStep {
                        step: i,
                        reason: format!("premise {p} is not an earlier step"),
                    });
                }
            }
            let premises: Vec<&ResourceInequality> = step
                .premises
                .iter()
                .map(|&p| &self.steps[p].conclusion)
                .collect();
            let recomputed = apply_rule(db, &self.contexts, &self.basis, kind, &premises, &step.instantiation)
                .map_err(|e| CalcError::ProofStep { step: i, reason: e.to_string() })?;
            if !recomputed.eq_mod(&step.conclusion, &self.basis, &self.contexts) {
                return Err(CalcError::ProofStep {
                    step: i,
                    reason: format!(
                        "stored conclusion `{}` differs from recomputed `{}`",
                        crate::grammar::print_ri(&step.conclusion),
                        crate::grammar::print_ri(&recomputed)
                    ),
                });
            }
        }
        let last = &self.steps.last().unwrap().conclusion;
        if !last.eq_mod(&self.target, &self.basis, &self.contexts) {
            return Err(CalcError::ProofStep {
                step: self.steps.len() - 1,
                reason: format!(
                    "final conclusion `{}` does not match target `{}`",
                    crate::grammar::print_ri(last),
                    crate::grammar::print_ri(&self.target)
                ),
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("proof serialization")
    }

    pub fn from_json(text: &str) -> Result<Proof> {
        serde_json::from_str(text).map_err(|e| CalcError::Malformed(format!("proof JSON: {e}")))
    }
}

/// Step-by-step builder: conclusions are computed through the rule engine at
/// construction time, so a builder-made proof is checkable by construction.
pub struct ProofBuilder<'a> {
    pub db: &'a AxiomDb,
    pub contexts: ContextSet,
    pub basis: IdentityBasis,
    steps: Vec<DerivationStep>,
}

impl<'a> ProofBuilder<'a> {
    pub fn new(db: &'a AxiomDb, contexts: ContextSet) -> Self {
        ProofBuilder { db, contexts, basis: IdentityBasis::empty(), steps: Vec::new() }
    }

    pub fn step(&mut self, kind: RuleKind, premises: &[usize], inst: Instantiation) -> usize {
        let prem: Vec<&ResourceInequality> =
            premises.iter().map(|&p| &self.steps[p].conclusion).collect();
        let conclusion = apply_rule(self.db, &self.contexts, &self.basis, kind, &prem, &inst)
            .unwrap_or_else(|e| {
                panic!(
                    "builder step {} ({}) failed: {e}",
                    self.steps.len(),
                    kind.name()
                )
            });
        self.steps.push(DerivationStep {
            rule: kind.name().to_string(),
            premises: premises.to_vec(),
            instantiation: inst,
            conclusion,
        });
        self.steps.len() - 1
    }

    /// Same as `step`, but re-expresses the stored conclusion as the given
    /// grammar string (must be equal modulo normalize). Later steps see the
    /// re-expressed form, which controls the raw shape of coefficients.
    pub fn step_as(
        &mut self,
        kind: RuleKind,
        premises: &[usize],
        inst: Instantiation,
        stored: &str,
    ) -> usize {
        let i = self.step(kind, premises, inst);
        let reexpressed = crate::grammar::parse_ri(stored)
            .unwrap_or_else(|e| panic!("step_as parse failure: {e}"));
        let mut reexpressed = reexpressed;
        reexpressed.flags = self.steps[i].conclusion.flags.clone();
        assert!(
            reexpressed.eq_mod(&self.steps[i].conclusion, &self.basis, &self.contexts),
            "step_as: `{}` is not equal to computed `{}`",
            stored,
            crate::grammar::print_ri(&self.steps[i].conclusion)
        );
        self.steps[i].conclusion = reexpressed;
        i
    }

    pub fn axiom(&mut self, name: &str) -> usize {
        self.step(RuleKind::Axiom, &[], Instantiation::new().set("axiom", name))
    }

    pub fn axiom_with(&mut self, name: &str, inst: Instantiation) -> usize {
        self.step(RuleKind::Axiom, &[], inst.set("axiom", name))
    }

    pub fn reflexivity(&mut self, expr: &str) -> usize {
        self.step(RuleKind::Reflexivity, &[], Instantiation::new().set("expr", expr))
    }

    pub fn scale(&mut self, premise: usize, coeff: &str) -> usize {
        self.step(RuleKind::Scale, &[premise], Instantiation::new().set("coeff", coeff))
    }

    pub fn add(&mut self, p1: usize, p2: usize) -> usize {
        self.step(RuleKind::Addition, &[p1, p2], Instantiation::new())
    }

    pub fn trans(&mut self, p1: usize, p2: usize) -> usize {
        self.step(RuleKind::Transitivity, &[p1, p2], Instantiation::new())
    }

    pub fn cancel(&mut self, premise: usize, gamma: &str) -> usize {
        self.step(RuleKind::Cancel, &[premise], Instantiation::new().set("gamma", gamma))
    }

    pub fn o_removal(&mut self, premise: usize, side: usize, symbol: &str, z: &str, q: &str) -> usize {
        self.step(
            RuleKind::ORemoval,
            &[premise, side],
            Instantiation::new()
                .set("symbol", symbol)
                .set("z", z)
                .set("q", q),
        )
    }

    pub fn weaken(&mut self, premise: usize, lhs: Option<&str>, rhs: Option<&str>) -> usize {
        let mut inst = Instantiation::new();
        if let Some(l) = lhs {
            inst = inst.set("lhs", l);
        }
        if let Some(r) = rhs {
            inst = inst.set("rhs", r);
        }
        self.step(RuleKind::Weaken, &[premise], inst)
    }

    pub fn finish(self, name: &str, target: &str) -> crate::proof::Proof {
        let target = crate::grammar::parse_ri(target)
            .unwrap_or_else(|e| panic!("target parse failure: {e}"));
        let proof = Proof {
            name: name.to_string(),
            target,
            contexts: self.contexts,
            basis: self.basis,
            steps: self.steps,
        };
        proof
            .check(self.db)
            .unwrap_or_else(|e| panic!("builder produced a failing proof `{name}`: {e}"));
        proof
    }
}
