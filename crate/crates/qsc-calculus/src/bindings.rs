//! Concrete desk-scale bindings for the builtin derivations: every state tag
//! used by a proof's atoms is bound to an explicitly constructed state, built
//! so the declared structural facts hold.

use crate::error::Result;
use crate::eval::Bindings;
use qsc_core::channel::{apply, apply_instrument, InstrumentSpec};
use qsc_core::linalg::{CMatrix, C64};
use qsc_core::standard::{
    correlated_classical, dephasing_channel, max_entangled, maximally_mixed,
};
use qsc_core::{StateSpec, SystemLayout};

/// Isotropic two-qubit state 0.8 Φ₂ + 0.2 τ₄ on labels (A, B).
pub fn isotropic_pair() -> Result<StateSpec> {
    let phi = max_entangled("A", "B", 2)?;
    let tau = maximally_mixed("A", 2)?.tensor(&maximally_mixed("B", 2)?)?;
    let m = phi
        .matrix()
        .scale(C64::new(0.8, 0.0))
        .add(&tau.matrix().scale(C64::new(0.2, 0.0)));
    Ok(StateSpec::new_unchecked(phi.layout().clone(), m))
}

/// Canonical purification ψ^{ABE} of the isotropic pair.
pub fn isotropic_purification() -> Result<StateSpec> {
    Ok(isotropic_pair()?.purify("E")?)
}

/// σ^{RBE} from sending half of Φ₂ through a dephasing channel.
fn dephasing_sigma(p: f64) -> Result<StateSpec> {
    let phi = max_entangled("R", "Ap", 2)?;
    let n = dephasing_channel("Ap", "B", 2, p)?;
    let v = n.stinespring("E")?;
    Ok(apply(&v, &phi, &["Ap"])?)
}

/// σ^{X Ap B E Ep} left by a computational-basis measurement instrument on
/// Alice's share of ψ^{ABE}, with the outcome copied into X and a trivial
/// branch environment Ep.
fn measured_sigma() -> Result<StateSpec> {
    let psi = isotropic_purification()?;
    let branches: Vec<Vec<CMatrix>> = (0..2)
        .map(|x| {
            let mut k = CMatrix::zeros(2, 2);
            k[(x, x)] = C64::new(1.0, 0.0);
            vec![k]
        })
        .collect();
    let inst = InstrumentSpec::new(
        SystemLayout::single("A", 2)?,
        SystemLayout::single("Ap", 2)?,
        branches,
    )?;
    let out = apply_instrument(&inst, &psi, &["A"], "X")?;
    // add the trivial branch environment so the declared labels all exist
    let ep = qsc_core::standard::basis_state("Ep", 1, 0)?;
    Ok(out.tensor(&ep)?)
}

/// Classical-quantum state σ^{XB}: a fair classical bit correlated with one
/// of two non-orthogonal qubit states.
fn cq_sigma_xb() -> Result<StateSpec> {
    let layout = SystemLayout::new(vec![("X", 2), ("B", 2)])?;
    let mut m = CMatrix::zeros(4, 4);
    // x = 0 -> |0><0|, x = 1 -> mixed diag(0.3, 0.7)
    m[(0, 0)] = C64::new(0.5, 0.0);
    m[(2, 2)] = C64::new(0.5 * 0.3, 0.0);
    m[(3, 3)] = C64::new(0.5 * 0.7, 0.0);
    Ok(StateSpec::new_unchecked(layout, m))
}

/// σ^{X Y B}: classical X through a noisy classical channel to Y, with a
/// quantum register depending on X.
fn cq_sigma_xyb() -> Result<StateSpec> {
    let layout = SystemLayout::new(vec![("X", 2), ("Y", 2), ("B", 2)])?;
    let d = layout.total_dim();
    let mut m = CMatrix::zeros(d, d);
    let q = [[0.9, 0.1], [0.1, 0.9]];
    // per-x qubit states: diag entries
    let rho_b = [[1.0, 0.0], [0.25, 0.75]];
    for x in 0..2 {
        for y in 0..2 {
            for bq in 0..2 {
                let w = 0.5 * q[x][y] * rho_b[x][bq];
                if w > 0.0 {
                    let idx = (x * 2 + y) * 2 + bq;
                    m[(idx, idx)] = C64::new(w, 0.0);
                }
            }
        }
    }
    Ok(StateSpec::new_unchecked(layout, m))
}

/// Tag bindings for a builtin derivation; empty when the proof has no atoms.
pub fn proof_bindings(name: &str) -> Result<Bindings> {
    let mut b = Bindings::new();
    match name {
        "ccc-identity" | "absolutize-qubit" => {}
        "hashing2-from-mother" | "ntp2" | "nsd-from-mother" | "ntp-from-hashing"
        | "mother-from-hashing-ruleI" | "mother-from-nsd-ruleO" => {
            b.insert("psi".into(), isotropic_purification()?);
        }
        "eac-from-father" | "lsd-from-father" | "father-from-eac-ruleO" => {
            b.insert("sigma".into(), dephasing_sigma(0.75)?);
        }
        "grandmother" | "dct-ntp" | "dct-ed" => {
            b.insert("psi".into(), isotropic_purification()?);
            b.insert("sigma".into(), measured_sigma()?);
        }
        "crd-from-cqsw" => {
            b.insert("sigma".into(), cq_sigma_xb()?);
            b.insert("sigmacc".into(), correlated_classical("XA", "XB", 2)?);
        }
        "cqrsp" => {
            b.insert("sigma".into(), cq_sigma_xyb()?);
        }
        other => {
            return Err(crate::error::CalcError::Malformed(format!(
                "no bindings recipe for proof `{other}`"
            )))
        }
    }
    Ok(b)
}

/// Generic bindings for an axiom: each tag gets a state over the labels its
/// atoms mention (plus any declared pure family), pure when the tag is
/// declared pure over that label set, classical-diagonal on declared
/// classical labels.
pub fn axiom_bindings(axiom: &crate::axioms::Axiom, seed: u64) -> Result<Bindings> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let mut tags: std::collections::BTreeMap<String, std::collections::BTreeSet<String>> =
        Default::default();
    let mut collect = |e: &crate::expr::ResourceExpr| {
        for c in e.terms.values() {
            for atom in c.atoms.keys() {
                let entry = tags.entry(atom.tag.clone()).or_default();
                for g in &atom.groups {
                    entry.extend(g.iter().cloned());
                }
            }
        }
    };
    collect(&axiom.ri.lhs);
    collect(&axiom.ri.rhs);
    let mut out = Bindings::new();
    for (tag, mut labels) in tags {
        let tc = axiom.contexts.tags.get(&tag);
        if let Some(tc) = tc {
            for pf in &tc.pure_families {
                labels.extend(pf.family.iter().cloned());
                labels.extend(pf.given.iter().cloned());
            }
            labels.extend(tc.classical.iter().cloned());
        }
        let parts: Vec<(String, usize)> = labels.iter().map(|l| (l.clone(), 2usize)).collect();
        let layout = SystemLayout::new(parts)?;
        let is_pure = tc
            .map(|tc| {
                tc.pure_families
                    .iter()
                    .any(|pf| pf.given.is_empty() && pf.family == labels)
            })
            .unwrap_or(false);
        let classical: std::collections::BTreeSet<String> = tc
            .map(|tc| tc.classical.iter().cloned().collect())
            .unwrap_or_default();
        let state = if is_pure {
            qsc_core::random::random_pure_state(layout, &mut rng)?
        } else if !classical.is_empty() {
            // diagonal in the classical labels: dephase a random mixed state
            let mut s = qsc_core::random::random_mixed_state(layout, &mut rng)?;
            for l in &classical {
                let deph =
                    qsc_core::standard::dephasing_classical_channel(l, "TMPDEPH", 2)?;
                s = apply(&deph, &s, &[l.as_str()])?.relabel(&[("TMPDEPH", l.as_str())])?;
            }
            s
        } else {
            qsc_core::random::random_mixed_state(layout, &mut rng)?
        };
        out.insert(tag, state);
    }
    Ok(out)
}
