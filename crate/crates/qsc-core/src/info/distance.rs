//! State distance measures: trace norm, fidelity, Uhlmann alignment, and the
//! reconstruction of nearby extensions.

use crate::error::{CoreError, Result};
use crate::linalg::{
    eigvalsh, hermitian_fn, nuclear_norm, sqrtm_psd, trace_norm_hermitian, CMatrix, C64, ZERO,
};
use crate::state::StateSpec;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistanceReport {
    pub trace_distance: f64,
    pub fidelity: f64,
}

/// ‖ρ − σ‖₁ (sum of singular values of the difference).
pub fn trace_distance(a: &StateSpec, b: &StateSpec) -> Result<f64> {
    if a.layout().total_dim() != b.layout().total_dim() {
        return Err(CoreError::DimensionMismatch(
            "states have different dimensions".into(),
        ));
    }
    a.trace_distance_to(b)
}

/// F(ρ,σ) = (tr √(√σ ρ √σ))², clamped into [0, 1].
pub fn fidelity(a: &StateSpec, b: &StateSpec) -> Result<f64> {
    if a.layout().total_dim() != b.layout().total_dim() {
        return Err(CoreError::DimensionMismatch(
            "states have different dimensions".into(),
        ));
    }
    let bm = b.permuted_matrix(a.layout())?;
    let sb = sqrtm_psd(&bm)?;
    let x = sb.mul(a.matrix()).mul(&sb).hermitize();
    let eigs = eigvalsh(&x)?;
    let tr: f64 = eigs.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok((tr * tr).clamp(0.0, 1.0))
}

pub fn distance_report(a: &StateSpec, b: &StateSpec) -> Result<DistanceReport> {
    Ok(DistanceReport {
        trace_distance: trace_distance(a, b)?,
        fidelity: fidelity(a, b)?,
    })
}

/// Helstrom bound: the best probability of correctly identifying one of two
/// equiprobable states is ½ + ¼‖ρ−σ‖₁.
pub fn helstrom_bound(a: &StateSpec, b: &StateSpec) -> Result<f64> {
    Ok(0.5 + 0.25 * trace_distance(a, b)?)
}

/// Maximum of |⟨ψ|φ⟩|² over purifications, computed exactly by optimizing
/// the reference-side isometry: the optimum is the squared nuclear norm of
/// the reference-contracted overlap matrix of the two canonical
/// purifications.
pub fn uhlmann_fidelity(a: &StateSpec, b: &StateSpec) -> Result<f64> {
    let pa = a.purify("UHL_REF")?;
    let bm = b.permuted_matrix(a.layout())?;
    let b_aligned = StateSpec::new_unchecked(a.layout().clone(), bm);
    let pb = b_aligned.purify("UHL_REF")?;
    let d = a.dim();
    let va = pure_vector(&pa)?;
    let vb = pure_vector(&pb)?;
    // K[k, l] = Σ_i conj(ψ[i,k]) φ[i,l], contracting the system index i
    let mut k = CMatrix::zeros(d, d);
    for i in 0..d {
        for kk in 0..d {
            let aik = va[i * d + kk];
            if aik == ZERO {
                continue;
            }
            for ll in 0..d {
                k[(kk, ll)] += aik.conj() * vb[i * d + ll];
            }
        }
    }
    let n = nuclear_norm(&k)?;
    Ok((n * n).clamp(0.0, 1.0))
}

/// Extract the state vector of a pure state (largest-eigenvalue vector).
pub fn pure_vector(s: &StateSpec) -> Result<Vec<C64>> {
    let (vals, vecs) = crate::linalg::eigh(s.matrix())?;
    let d = s.dim();
    let top = vals[d - 1];
    if (top - 1.0).abs() > 1e-8 {
        return Err(CoreError::InvalidState(format!(
            "state is not pure (top eigenvalue {top:.9})"
        )));
    }
    let mut v = vecs.column(d - 1);
    let phase = v
        .iter()
        .find(|z| z.norm() > 1e-12)
        .map(|z| z.conj() / z.norm())
        .unwrap_or(crate::linalg::ONE);
    for z in v.iter_mut() {
        *z *= phase;
    }
    Ok(v)
}

/// Uhlmann-aligned reconstruction: given ρ close to σ and an extension
/// σ′ ⊇ σ, build ρ′ ⊇ ρ with ‖ρ′ − σ′‖₁ ≤ 2√ε. The labels of `sigma_ext`
/// must contain ρ's labels; the returned state lives on the same labels.
pub fn reconstruct_extension(rho: &StateSpec, sigma_ext: &StateSpec) -> Result<StateSpec> {
    // φ^{ABC} purifies σ′^{AB}; ψ0^{A R} is the canonical purification of ρ^A.
    let phi = sigma_ext.purify("POMOC_C")?;
    let psi0 = rho.purify("POMOC_R")?;
    let da = rho.dim();
    let dbc = phi.dim() / da;
    // reorder φ so that ρ's labels come first
    let mut order: Vec<&str> = rho.layout().labels().iter().map(|s| s.as_str()).collect();
    for l in phi.layout().labels() {
        if !order.contains(&l.as_str()) {
            order.push(l);
        }
    }
    let phi_perm = phi.permute(&order)?;
    let vphi = pure_vector(&phi_perm)?;
    let vpsi = pure_vector(&psi0)?;
    // K[k, l] = Σ_i conj(ψ0[i,k]) φ[i,l] with k over R (dim da), l over BC
    let mut k = CMatrix::zeros(da, dbc);
    for i in 0..da {
        for kk in 0..da {
            let a = vpsi[i * da + kk];
            if a == ZERO {
                continue;
            }
            for ll in 0..dbc {
                k[(kk, ll)] += a.conj() * vphi[i * dbc + ll];
            }
        }
    }
    // optimal isometry V: R → BC is the polar part of Kᵀ
    let kt = CMatrix::from_fn(dbc, da, |i, j| k[(j, i)]);
    let h2 = kt.adjoint().mul(&kt).hermitize();
    let h_inv_sqrt = hermitian_fn(&h2, |x| if x > 1e-24 { 1.0 / x.max(0.0).sqrt() } else { 0.0 })?;
    let v = kt.mul(&h_inv_sqrt);
    // ψ = (1_A ⊗ V) ψ0, reshaped on (A, BC)
    let mut psi = vec![ZERO; da * dbc];
    for i in 0..da {
        for ll in 0..dbc {
            let mut acc = ZERO;
            for kk in 0..da {
                acc += v[(ll, kk)] * vpsi[i * da + kk];
            }
            psi[i * dbc + ll] = acc;
        }
    }
    let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n < 1e-8 {
        return Err(CoreError::InvalidState(
            "degenerate Uhlmann alignment".into(),
        ));
    }
    for z in psi.iter_mut() {
        *z /= n;
    }
    let full = StateSpec::pure(phi_perm.layout().clone(), &psi)?;
    // trace out the purifying system C, keep σ′'s labels
    let keep: Vec<&str> = sigma_ext
        .layout()
        .labels()
        .iter()
        .map(|s| s.as_str())
        .collect();
    let rho_ext = full.partial_trace(&keep)?;
    rho_ext.permute(&keep)
}

/// Trace norm of the difference of two raw Hermitian matrices.
pub fn trace_norm_diff(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    Ok(trace_norm_hermitian(&a.sub(b))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard::*;

    #[test]
    fn identical_states() {
        let phi = max_entangled("A", "B", 2).unwrap();
        assert!(trace_distance(&phi, &phi).unwrap() < 1e-12);
        assert!((fidelity(&phi, &phi).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn orthogonal_pure_states() {
        let a = basis_state("A", 2, 0).unwrap();
        let b = basis_state("A", 2, 1).unwrap();
        assert!((trace_distance(&a, &b).unwrap() - 2.0).abs() < 1e-12);
        assert!(fidelity(&a, &b).unwrap() < 1e-12);
    }

    #[test]
    fn classical_distance() {
        use crate::linalg::CMatrix;
        let layout = crate::layout::SystemLayout::single("A", 2).unwrap();
        let d1 = CMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                C64::new(if i == 0 { 0.7 } else { 0.3 }, 0.0)
            } else {
                ZERO
            }
        });
        let a = StateSpec::new(layout.clone(), d1).unwrap();
        let b = maximally_mixed("A", 2).unwrap();
        assert!((trace_distance(&a, &b).unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn fidelity_tau_vs_basis() {
        let tau = maximally_mixed("A", 2).unwrap();
        let zero = basis_state("A", 2, 0).unwrap();
        assert!((fidelity(&tau, &zero).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn uhlmann_matches_fidelity() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(42);
        for dim in [2usize, 3] {
            let layout = crate::layout::SystemLayout::single("A", dim).unwrap();
            for _ in 0..20 {
                let a = crate::random::random_mixed_state(layout.clone(), &mut rng).unwrap();
                let b = crate::random::random_mixed_state(layout.clone(), &mut rng).unwrap();
                let f1 = fidelity(&a, &b).unwrap();
                let f2 = uhlmann_fidelity(&a, &b).unwrap();
                assert!((f1 - f2).abs() < 1e-6, "dim {dim}: {f1} vs {f2}");
            }
        }
    }
}
