//! Seeded random states, unitaries and isometries (Ginibre based). Used by
//! the identity suites, the distance optimizer and the trade-off search.

use crate::error::Result;
use crate::layout::SystemLayout;
use crate::linalg::{CMatrix, C64};
use crate::state::StateSpec;
use rand::Rng;

fn normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller; good enough for sampling test states
    let u1: f64 = rng.gen_range(1e-300..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| C64::new(normal(rng), normal(rng)))
}

/// Haar-random pure state vector of dimension d.
pub fn random_state_vector(d: usize, rng: &mut impl Rng) -> Vec<C64> {
    loop {
        let mut v: Vec<C64> = (0..d).map(|_| C64::new(normal(rng), normal(rng))).collect();
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-6 {
            for z in v.iter_mut() {
                *z /= n;
            }
            return v;
        }
    }
}

/// Haar-random pure state on the given layout.
pub fn random_pure_state(layout: SystemLayout, rng: &mut impl Rng) -> Result<StateSpec> {
    let v = random_state_vector(layout.total_dim(), rng);
    StateSpec::pure(layout, &v)
}

/// Random full-rank mixed state: G G† / tr(G G†) with a square Ginibre G.
pub fn random_mixed_state(layout: SystemLayout, rng: &mut impl Rng) -> Result<StateSpec> {
    let d = layout.total_dim();
    let g = ginibre(d, d, rng);
    let m = g.mul(&g.adjoint());
    let tr = m.trace().re;
    Ok(StateSpec::new_unchecked(
        layout,
        m.scale(C64::new(1.0 / tr, 0.0)),
    ))
}

/// Haar-random isometry (cols ≤ rows) via Gram-Schmidt on Ginibre columns.
pub fn random_isometry(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    assert!(cols <= rows);
    loop {
        let g = ginibre(rows, cols, rng);
        if let Some(q) = gram_schmidt(&g) {
            return q;
        }
    }
}

/// Haar-random unitary.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    random_isometry(n, n, rng)
}

fn gram_schmidt(g: &CMatrix) -> Option<CMatrix> {
    let (rows, cols) = (g.rows(), g.cols());
    let mut q = CMatrix::zeros(rows, cols);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = g.column(j);
        for b in &basis {
            let ip: C64 = b.iter().zip(&v).map(|(bi, vi)| bi.conj() * vi).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= ip * bi;
            }
        }
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n < 1e-10 {
            return None;
        }
        for z in v.iter_mut() {
            *z /= n;
        }
        for i in 0..rows {
            q[(i, j)] = v[i];
        }
        basis.push(q.column(j));
    }
    Some(q)
}

/// Pair of states at trace distance at most `eps` (second state is a mixture
/// of the first with a random perturbation).
pub fn random_close_pair(
    layout: SystemLayout,
    eps: f64,
    rng: &mut impl Rng,
) -> Result<(StateSpec, StateSpec)> {
    let a = random_mixed_state(layout.clone(), rng)?;
    let b = random_mixed_state(layout, rng)?;
    let dist = a.trace_distance_to(&b)?;
    let t = if dist > 0.0 { (eps / dist).min(1.0) } else { 1.0 };
    let m = a
        .matrix()
        .scale(C64::new(1.0 - t, 0.0))
        .add(&b.matrix().scale(C64::new(t, 0.0)));
    let mixed = StateSpec::new_unchecked(a.layout().clone(), m);
    Ok((a, mixed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let u = random_unitary(5, &mut rng);
        let defect = u.adjoint().mul(&u).sub(&CMatrix::identity(5)).max_abs();
        assert!(defect < 1e-12);
    }

    #[test]
    fn random_mixed_is_a_state() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let l = SystemLayout::new(vec![("A", 2), ("B", 3)]).unwrap();
        let s = random_mixed_state(l, &mut rng).unwrap();
        assert!((s.trace() - 1.0).abs() < 1e-12);
        assert!(s.eigenvalues().unwrap().first().unwrap() > &-1e-12);
    }

    #[test]
    fn close_pair_is_close() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let l = SystemLayout::new(vec![("A", 2), ("B", 2)]).unwrap();
        let (a, b) = random_close_pair(l, 0.1, &mut rng).unwrap();
        assert!(a.trace_distance_to(&b).unwrap() <= 0.1 + 1e-9);
    }

    #[test]
    fn ginibre_nonzero() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let g = ginibre(3, 3, &mut rng);
        assert!(g.max_abs() > 0.0);
        
    }
}
