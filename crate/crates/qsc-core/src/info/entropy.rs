//! Entropic quantities, all in bits (base-2 logarithms).

use crate::error::{CoreError, Result};
use crate::linalg::eigvalsh;
use crate::state::StateSpec;
use serde::{Deserialize, Serialize};

/// Eigenvalues below this are treated as exact zeros inside entropies.
pub const EIG_ZERO: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum EntropyQuery {
    /// H(G)
    Entropy(Vec<String>),
    /// H(G1 | G2)
    Conditional(Vec<String>, Vec<String>),
    /// I(G1 ; G2)
    Mutual(Vec<String>, Vec<String>),
    /// I(G1 ⟩ G2) = −H(G1|G2)
    Coherent(Vec<String>, Vec<String>),
    /// I(G1 ; G2 | G3)
    ConditionalMutual(Vec<String>, Vec<String>, Vec<String>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntropyReport {
    pub kind: String,
    pub groups: Vec<Vec<String>>,
    pub value: f64,
}

fn shannon(eigs: &[f64]) -> f64 {
    let mut h = 0.0;
    for &lam in eigs {
        if lam > EIG_ZERO {
            h -= lam * lam.log2();
        }
    }
    h
}

/// H of the restriction to `labels` (which may be the full system).
pub fn subsystem_entropy(s: &StateSpec, labels: &[String]) -> Result<f64> {
    let all: Vec<&str> = labels.iter().map(|l| l.as_str()).collect();
    for l in &all {
        if !s.layout().contains(l) {
            return Err(CoreError::UnknownLabel(l.to_string()));
        }
    }
    let eigs = if all.len() == s.layout().len() {
        eigvalsh(s.matrix())?
    } else {
        let r = s.partial_trace(&all)?;
        eigvalsh(r.matrix())?
    };
    Ok(shannon(&eigs))
}

fn union(groups: &[&[String]]) -> Vec<String> {
    let mut out = Vec::new();
    for g in groups {
        for l in *g {
            if !out.contains(l) {
                out.push(l.clone());
            }
        }
    }
    out
}

fn check_groups(s: &StateSpec, groups: &[&[String]]) -> Result<()> {
    let mut seen: Vec<&String> = Vec::new();
    for g in groups {
        if g.is_empty() {
            return Err(CoreError::OutOfRange("empty label group".into()));
        }
        for l in *g {
            if !s.layout().contains(l) {
                return Err(CoreError::UnknownLabel(l.clone()));
            }
            if seen.contains(&l) {
                return Err(CoreError::OverlappingGroups);
            }
            seen.push(l);
        }
    }
    Ok(())
}

pub fn entropy(s: &StateSpec, query: &EntropyQuery) -> Result<EntropyReport> {
    let (kind, groups, value) = match query {
        EntropyQuery::Entropy(g) => {
            check_groups(s, &[g])?;
            ("H".to_string(), vec![g.clone()], subsystem_entropy(s, g)?)
        }
        EntropyQuery::Conditional(g1, g2) => {
            check_groups(s, &[g1, g2])?;
            let hab = subsystem_entropy(s, &union(&[g1, g2]))?;
            let hb = subsystem_entropy(s, g2)?;
            ("H|".to_string(), vec![g1.clone(), g2.clone()], hab - hb)
        }
        EntropyQuery::Mutual(g1, g2) => {
            check_groups(s, &[g1, g2])?;
            let ha = subsystem_entropy(s, g1)?;
            let hb = subsystem_entropy(s, g2)?;
            let hab = subsystem_entropy(s, &union(&[g1, g2]))?;
            ("I".to_string(), vec![g1.clone(), g2.clone()], ha + hb - hab)
        }
        EntropyQuery::Coherent(g1, g2) => {
            check_groups(s, &[g1, g2])?;
            let hab = subsystem_entropy(s, &union(&[g1, g2]))?;
            let hb = subsystem_entropy(s, g2)?;
            ("Icoh".to_string(), vec![g1.clone(), g2.clone()], hb - hab)
        }
        EntropyQuery::ConditionalMutual(g1, g2, g3) => {
            check_groups(s, &[g1, g2, g3])?;
            let hax = subsystem_entropy(s, &union(&[g1, g3]))?;
            let hbx = subsystem_entropy(s, &union(&[g2, g3]))?;
            let habx = subsystem_entropy(s, &union(&[g1, g2, g3]))?;
            let hx = subsystem_entropy(s, g3)?;
            (
                "I|".to_string(),
                vec![g1.clone(), g2.clone(), g3.clone()],
                hax + hbx - habx - hx,
            )
        }
    };
    if !value.is_finite() {
        return Err(CoreError::InvalidState("entropy is not finite".into()));
    }
    Ok(EntropyReport { kind, groups, value })
}

/// Convenience wrappers taking label lists directly.
pub fn h(s: &StateSpec, g: &[&str]) -> Result<f64> {
    let g: Vec<String> = g.iter().map(|x| x.to_string()).collect();
    Ok(entropy(s, &EntropyQuery::Entropy(g))?.value)
}

pub fn h_cond(s: &StateSpec, g1: &[&str], g2: &[&str]) -> Result<f64> {
    let q = EntropyQuery::Conditional(to_vec(g1), to_vec(g2));
    Ok(entropy(s, &q)?.value)
}

pub fn mutual(s: &StateSpec, g1: &[&str], g2: &[&str]) -> Result<f64> {
    let q = EntropyQuery::Mutual(to_vec(g1), to_vec(g2));
    Ok(entropy(s, &q)?.value)
}

pub fn coherent(s: &StateSpec, g1: &[&str], g2: &[&str]) -> Result<f64> {
    let q = EntropyQuery::Coherent(to_vec(g1), to_vec(g2));
    Ok(entropy(s, &q)?.value)
}

pub fn cond_mutual(s: &StateSpec, g1: &[&str], g2: &[&str], g3: &[&str]) -> Result<f64> {
    let q = EntropyQuery::ConditionalMutual(to_vec(g1), to_vec(g2), to_vec(g3));
    Ok(entropy(s, &q)?.value)
}

fn to_vec(g: &[&str]) -> Vec<String> {
    g.iter().map(|x| x.to_string()).collect()
}

/// Residual of the chain-rule identity
/// I(X;AB) = H(A) + I(A⟩BX) − I(A;B) + I(X;B).
pub fn check_trip_identity(s: &StateSpec, x: &[&str], a: &[&str], b: &[&str]) -> Result<f64> {
    let ab = [a, b].concat();
    let bx = [b, x].concat();
    let lhs = mutual(s, x, &ab)?;
    let rhs = h(s, a)? + coherent(s, a, &bx)? - mutual(s, a, b)? + mutual(s, x, b)?;
    Ok((lhs - rhs).abs())
}

/// Continuity bound η(ε) + K·ε·log2(dim) with K = 1 and
/// η(ε) = −ε·log2 ε for ε ≤ 1/e, capped at log2(dim) beyond.
pub fn fannes_bound(dim: usize, eps: f64) -> Result<f64> {
    if dim < 2 {
        return Err(CoreError::OutOfRange(format!("dim {dim} < 2")));
    }
    if !(0.0..=2.0).contains(&eps) {
        return Err(CoreError::OutOfRange(format!("eps {eps} outside [0, 2]")));
    }
    let logd = (dim as f64).log2();
    if eps == 0.0 {
        return Ok(0.0);
    }
    let eta = if eps <= 1.0 / std::f64::consts::E {
        -eps * eps.log2()
    } else {
        logd
    };
    Ok(eta + eps * logd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard::*;

    #[test]
    fn phi_pair_entropies() {
        let phi = max_entangled("A", "B", 2).unwrap();
        assert!((h(&phi, &["A"]).unwrap() - 1.0).abs() < 1e-12);
        assert!((mutual(&phi, &["A"], &["B"]).unwrap() - 2.0).abs() < 1e-12);
        assert!((coherent(&phi, &["A"], &["B"]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_state_has_no_mutual_information() {
        let a = maximally_mixed("A", 2).unwrap();
        let b = basis_state("B", 2, 0).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert!(mutual(&ab, &["A"], &["B"]).unwrap().abs() < 1e-10);
    }

    #[test]
    fn classical_conditioning_averages() {
        // σ = Σ p_x |x><x| ⊗ ρ_x with ρ_0 = τ_2, ρ_1 = |0><0|
        use crate::linalg::{CMatrix, C64};
        let p = [0.3, 0.7];
        let mut m = CMatrix::zeros(4, 4);
        // labels (X, A), X most significant
        m[(0, 0)] = C64::new(p[0] * 0.5, 0.0);
        m[(1, 1)] = C64::new(p[0] * 0.5, 0.0);
        m[(2, 2)] = C64::new(p[1] * 1.0, 0.0);
        let layout = crate::layout::SystemLayout::new(vec![("X", 2), ("A", 2)]).unwrap();
        let s = StateSpec::new(layout, m).unwrap();
        let hax = h_cond(&s, &["A"], &["X"]).unwrap();
        let expect = p[0] * 1.0 + p[1] * 0.0;
        assert!((hax - expect).abs() < 1e-10);
    }

    #[test]
    fn trip_identity_on_product() {
        let a = max_entangled("A", "B", 2).unwrap();
        let x = maximally_mixed("X", 2).unwrap();
        let s = x.tensor(&a).unwrap();
        let r = check_trip_identity(&s, &["X"], &["A"], &["B"]).unwrap();
        assert!(r < 1e-10);
    }

    #[test]
    fn fannes_zero_at_zero() {
        assert_eq!(fannes_bound(4, 0.0).unwrap(), 0.0);
        assert!(fannes_bound(4, 0.1).unwrap() > 0.0);
        assert!(fannes_bound(1, 0.1).is_err());
        assert!(fannes_bound(4, 2.5).is_err());
    }
}
