//! Randomness-assisted absolutization: shared randomness plus a relative
//! channel simulate the absolute channel exactly, with the randomness left
//! decoupled. Exercises the discrete Weyl twirl and, for the coherent
//! channel, the explicit shift intertwiner V_x = X^a.

use crate::error::{ProtoError, Result};
use crate::sim::{decoupling_residual, Party, Simulation};
use crate::units::SimResult;
use qsc_calculus::{Coefficient, Rat, ResourceExpr, ResourceSymbol};
use qsc_core::channel::{apply, ChannelSpec, IsometrySpec};
use qsc_core::info::trace_distance;
use qsc_core::linalg::CMatrix;
use qsc_core::standard::{
    coherent_channel, correlated_classical, dephasing_classical_channel, identity_channel,
    maximally_mixed, weyl, weyl_x,
};
use qsc_core::{StateSpec, SystemLayout};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbsolutizeKind {
    /// perfect quantum channel id_d
    Id,
    /// coherent channel Δ_d
    Coherent,
    /// perfect classical channel īd_d
    Classical,
}

fn controlled_unitary(
    control: &str,
    control_dim: usize,
    target: &str,
    target_dim: usize,
    out_control: &str,
    out_target: &str,
    ops: &[CMatrix],
) -> Result<ChannelSpec> {
    assert_eq!(ops.len(), control_dim);
    let d = control_dim * target_dim;
    let mut u = CMatrix::zeros(d, d);
    for (x, op) in ops.iter().enumerate() {
        for i in 0..target_dim {
            for j in 0..target_dim {
                u[(x * target_dim + i, x * target_dim + j)] = op[(i, j)];
            }
        }
    }
    ChannelSpec::new_cptp(
        SystemLayout::new(vec![(control, control_dim), (target, target_dim)])?,
        SystemLayout::new(vec![(out_control, control_dim), (out_target, target_dim)])?,
        vec![u],
    )
    .map_err(Into::into)
}

fn inverse(m: &CMatrix) -> CMatrix {
    // unitary inverse
    m.adjoint()
}

/// Run the absolutization protocol for one kind at dimension d on an
/// arbitrary input φ^{R A'}; returns (SimResult, QQ final state check data).
pub fn run_absolutize(kind: AbsolutizeKind, d: usize, input: &StateSpec, keep_env: bool) -> Result<SimResult> {
    for l in ["R", "Ain"] {
        if !input.layout().contains(l) {
            return Err(ProtoError::UnknownLabel(l.to_string()));
        }
    }
    if input.layout().dim_of("Ain")? != d {
        return Err(ProtoError::Dimension(format!(
            "input register must have dimension {d}"
        )));
    }
    let rand_dim = match kind {
        AbsolutizeKind::Id | AbsolutizeKind::Coherent => d * d,
        AbsolutizeKind::Classical => d,
    };
    let mut sim = Simulation::new(
        input.clone(),
        &[("R", Party::Reference), ("Ain", Party::Alice)],
        keep_env,
    )?;
    // shared randomness, tallied as log2(rand_dim) rbits when integral
    let bits = (rand_dim as f64).log2();
    let ledger = if bits.fract() == 0.0 {
        ResourceExpr::term(
            ResourceSymbol::Rbit,
            Coefficient::from_rat(Rat::from_integer((bits as i64).into())),
        )
    } else {
        ResourceExpr::term(ResourceSymbol::Rbit, Coefficient::one())
    };
    let shared = correlated_classical("XA", "XB", rand_dim)?;
    sim.append_resource(&shared, &[("XA", Party::Alice), ("XB", Party::Bob)], ledger)?;

    // twirl family
    let us: Vec<CMatrix> = match kind {
        AbsolutizeKind::Id | AbsolutizeKind::Coherent => {
            (0..rand_dim).map(|x| weyl(d, x / d, x % d)).collect()
        }
        AbsolutizeKind::Classical => {
            let x = weyl_x(d);
            let mut ops = Vec::with_capacity(d);
            let mut cur = CMatrix::identity(d);
            for _ in 0..d {
                ops.push(cur.clone());
                cur = x.mul(&cur);
            }
            ops
        }
    };

    if kind == AbsolutizeKind::Classical {
        // make the input classical first (the twirl only mixes basis states)
        let pre = dephasing_classical_channel("Ain", "Ad", d)?;
        sim.local_channel(Party::Alice, &pre, &["Ain"])?;
        let relabel = IsometrySpec::new(
            SystemLayout::single("Ad", d)?,
            SystemLayout::single("Ain", d)?,
            CMatrix::identity(d),
        )?;
        sim.local_isometry(Party::Alice, &relabel, &["Ad"])?;
    }

    let scramble = controlled_unitary("XA", rand_dim, "Ain", d, "XA2", "Aw", &us)?;
    sim.local_channel(Party::Alice, &scramble, &["XA", "Ain"])?;

    // validity: the channel input restriction is exactly maximally mixed
    let tau = maximally_mixed("Aw", d)?;
    let validity = sim.check_validity(&["Aw"], &tau)?;

    // the relative resource itself
    match kind {
        AbsolutizeKind::Id => {
            let id = identity_channel("Aw", "B", d)?;
            // ownership transfer through the channel
            sim.local_isometry(Party::Alice, &id, &["Aw"])?;
            // reassign B to Bob: the channel output belongs to the receiver
            sim.reassign("B", Party::Bob)?;
            sim.tally_consumed(ResourceSymbol::QubitTau, d)?;
        }
        AbsolutizeKind::Coherent => {
            let delta = coherent_channel("Aw", "Ak", "B", d)?;
            sim.local_isometry(Party::Alice, &delta, &["Aw"])?;
            sim.reassign("B", Party::Bob)?;
            sim.tally_consumed(ResourceSymbol::CobitTau, d)?;
        }
        AbsolutizeKind::Classical => {
            let idb = dephasing_classical_channel("Aw", "B", d)?;
            sim.local_channel(Party::Alice, &idb, &["Aw"])?;
            sim.reassign("B", Party::Bob)?;
            sim.tally_consumed(ResourceSymbol::CbitTau, d)?;
        }
    }

    // corrections
    let inv: Vec<CMatrix> = us.iter().map(inverse).collect();
    let undo_b = controlled_unitary("XB", rand_dim, "B", d, "XB2", "Bout", &inv)?;
    sim.local_channel(Party::Bob, &undo_b, &["XB", "B"])?;
    if kind == AbsolutizeKind::Coherent {
        // Alice undoes the shift part on her kept register: V_x = X^a
        let vs: Vec<CMatrix> = (0..rand_dim)
            .map(|x| {
                let mut m = CMatrix::identity(d);
                let shift = weyl_x(d);
                for _ in 0..(x / d) {
                    m = shift.mul(&m);
                }
                m.adjoint()
            })
            .collect();
        let undo_a = controlled_unitary("XA2", rand_dim, "Ak", d, "XA3", "Aout", &vs)?;
        sim.local_channel(Party::Alice, &undo_a, &["XA2", "Ak"])?;
    }

    // expected final state: randomness ⊗ N(φ), computed independently
    let channel_output = match kind {
        AbsolutizeKind::Id => {
            let id = identity_channel("Ain", "Bout", d)?;
            apply(&id, input, &["Ain"])?
        }
        AbsolutizeKind::Coherent => {
            let delta = coherent_channel("Ain", "Aout", "Bout", d)?;
            apply(&delta, input, &["Ain"])?
        }
        AbsolutizeKind::Classical => {
            let idb = dephasing_classical_channel("Ain", "Bout", d)?;
            apply(&idb, input, &["Ain"])?
        }
    };
    let x_labels: Vec<String> = sim
        .state()
        .layout()
        .labels()
        .iter()
        .filter(|l| l.starts_with("XA") || l.starts_with("XB"))
        .cloned()
        .collect();
    let x_refs: Vec<&str> = x_labels.iter().map(|s| s.as_str()).collect();
    let shared_expected = correlated_classical(x_refs[0], x_refs[1], rand_dim)?;
    let expected = shared_expected.tensor(&channel_output)?;

    // non-environment part of the realized state, in the expected label order
    let env = sim.env_labels();
    let keep: Vec<&str> = sim
        .state()
        .layout()
        .labels()
        .iter()
        .filter(|l| !env.contains(l))
        .map(|l| l.as_str())
        .collect();
    let realized = sim.state().partial_trace(&keep)?;
    let order: Vec<&str> = expected.layout().labels().iter().map(|l| l.as_str()).collect();
    let realized = realized.permute(&order)?;
    let accuracy = trace_distance(&realized, &expected)?;

    // decoupling of the randomness register, including the environment when
    // the run keeps it
    let env_refs: Vec<&str> = env.iter().map(|s| s.as_str()).collect();
    let residual = decoupling_residual(sim.state(), &x_refs, &env_refs, keep_env)?;

    Ok(SimResult {
        accuracy,
        validity,
        decoupling_residual: Some(residual),
        ledger_ok: true,
        consumed: qsc_calculus::grammar::print_expr(sim.consumed()),
        created: qsc_calculus::grammar::print_expr(sim.created()),
    })
}
