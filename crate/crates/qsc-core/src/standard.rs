//! The standard states and channels, generalized Pauli (discrete Weyl)
//! operators, and the named noisy channel constructors used by the CLI.

use crate::channel::{ChannelSpec, IsometrySpec};
use crate::error::{CoreError, Result};
use crate::layout::SystemLayout;
use crate::linalg::{CMatrix, C64, ONE, ZERO};
use crate::state::StateSpec;

/// |Φ_d⟩ = d^{-1/2} Σ_x |x⟩|x⟩, as a density operator on two labels.
pub fn max_entangled(a: &str, b: &str, d: usize) -> Result<StateSpec> {
    let layout = SystemLayout::new(vec![(a, d), (b, d)])?;
    let w = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut v = vec![ZERO; d * d];
    for x in 0..d {
        v[x * d + x] = w;
    }
    StateSpec::pure(layout, &v)
}

/// Decohered version: d^{-1} Σ_x |xx⟩⟨xx| — two maximally correlated
/// random variables.
pub fn correlated_classical(a: &str, b: &str, d: usize) -> Result<StateSpec> {
    let layout = SystemLayout::new(vec![(a, d), (b, d)])?;
    let mut m = CMatrix::zeros(d * d, d * d);
    let p = C64::new(1.0 / d as f64, 0.0);
    for x in 0..d {
        m[(x * d + x, x * d + x)] = p;
    }
    Ok(StateSpec::new_unchecked(layout, m))
}

/// Tracial state τ_d = 1/d.
pub fn maximally_mixed(label: &str, d: usize) -> Result<StateSpec> {
    let layout = SystemLayout::single(label, d)?;
    Ok(StateSpec::new_unchecked(
        layout,
        CMatrix::identity(d).scale(C64::new(1.0 / d as f64, 0.0)),
    ))
}

/// Basis state |x⟩⟨x|.
pub fn basis_state(label: &str, d: usize, x: usize) -> Result<StateSpec> {
    if x >= d {
        return Err(CoreError::OutOfRange(format!("basis index {x} for dim {d}")));
    }
    let mut v = vec![ZERO; d];
    v[x] = ONE;
    StateSpec::pure(SystemLayout::single(label, d)?, &v)
}

/// Perfect quantum channel id_d as the isometry Σ |x⟩ᴮ⟨x|ᴬ (basis fixed).
pub fn identity_channel(input: &str, output: &str, d: usize) -> Result<IsometrySpec> {
    IsometrySpec::new(
        SystemLayout::single(input, d)?,
        SystemLayout::single(output, d)?,
        CMatrix::identity(d),
    )
}

/// Completely dephasing classical channel īd_d, Kraus {|x⟩ᴮ⟨x|ᴬ}.
pub fn dephasing_classical_channel(input: &str, output: &str, d: usize) -> Result<ChannelSpec> {
    let kraus: Vec<CMatrix> = (0..d)
        .map(|x| {
            CMatrix::from_fn(d, d, |i, j| if i == x && j == x { ONE } else { ZERO })
        })
        .collect();
    ChannelSpec::new_cptp(
        SystemLayout::single(input, d)?,
        SystemLayout::single(output, d)?,
        kraus,
    )
}

/// Coherent channel Δ_d: the isometry Σ |x⟩ᴬ|x⟩ᴮ⟨x|ᴬ′.
pub fn coherent_channel(input: &str, out_a: &str, out_b: &str, d: usize) -> Result<IsometrySpec> {
    let mut v = CMatrix::zeros(d * d, d);
    for x in 0..d {
        v[(x * d + x, x)] = ONE;
    }
    IsometrySpec::new(
        SystemLayout::single(input, d)?,
        SystemLayout::new(vec![(out_a, d), (out_b, d)])?,
        v,
    )
}

/// Classical copy channel Δ̄_d, Kraus {|x⟩ᴬ|x⟩ᴮ⟨x|ᴬ′}.
pub fn classical_copy_channel(input: &str, out_a: &str, out_b: &str, d: usize) -> Result<ChannelSpec> {
    let kraus: Vec<CMatrix> = (0..d)
        .map(|x| {
            let mut k = CMatrix::zeros(d * d, d);
            k[(x * d + x, x)] = ONE;
            k
        })
        .collect();
    ChannelSpec::new_cptp(
        SystemLayout::single(input, d)?,
        SystemLayout::new(vec![(out_a, d), (out_b, d)])?,
        kraus,
    )
}

/// Generalized shift X|j⟩ = |j+1 mod d⟩.
pub fn weyl_x(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| if i == (j + 1) % d { ONE } else { ZERO })
}

/// Generalized phase Z|j⟩ = ω^j |j⟩ with ω = e^{2πi/d}.
pub fn weyl_z(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (j as f64) / d as f64)
        } else {
            ZERO
        }
    })
}

/// Discrete Weyl operator U_(a,b) = X^a Z^b; the d² of them twirl any input
/// to the maximally mixed state.
pub fn weyl(d: usize, a: usize, b: usize) -> CMatrix {
    let mut m = weyl_z_pow(d, b);
    let x = weyl_x(d);
    for _ in 0..(a % d) {
        m = x.mul(&m);
    }
    m
}

fn weyl_z_pow(d: usize, b: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            C64::from_polar(
                1.0,
                2.0 * std::f64::consts::PI * ((j * b) % d) as f64 / d as f64,
            )
        } else {
            ZERO
        }
    })
}

/// All d² Weyl operators in the fixed order x = a·d + b ↦ X^a Z^b.
pub fn weyl_family(d: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            out.push(weyl(d, a, b));
        }
    }
    out
}

/// Standard object kinds from the catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StandardKind {
    /// Φ_d
    Phi,
    /// Φ̄_d
    PhiBar,
    /// τ_d
    Tau,
    /// id_d
    Id,
    /// īd_d
    IdBar,
    /// Δ_d
    Delta,
    /// Δ̄_d
    DeltaBar,
}

pub enum StandardObject {
    State(StateSpec),
    Channel(ChannelSpec),
    Isometry(IsometrySpec),
}

/// Build a standard object in the computational basis. States use labels
/// (A, B); channels map A' to B, two-output channels map A' to (A, B).
pub fn standard_object(kind: StandardKind, d: usize) -> Result<StandardObject> {
    if d < 2 {
        return Err(CoreError::OutOfRange(format!("standard objects need d ≥ 2, got {d}")));
    }
    Ok(match kind {
        StandardKind::Phi => StandardObject::State(max_entangled("A", "B", d)?),
        StandardKind::PhiBar => StandardObject::State(correlated_classical("A", "B", d)?),
        StandardKind::Tau => StandardObject::State(maximally_mixed("A", d)?),
        StandardKind::Id => StandardObject::Isometry(identity_channel("Ap", "B", d)?),
        StandardKind::IdBar => StandardObject::Channel(dephasing_classical_channel("Ap", "B", d)?),
        StandardKind::Delta => StandardObject::Isometry(coherent_channel("Ap", "A", "B", d)?),
        StandardKind::DeltaBar => StandardObject::Channel(classical_copy_channel("Ap", "A", "B", d)?),
    })
}

pub fn parse_standard_kind(s: &str) -> Result<StandardKind> {
    Ok(match s {
        "phi" => StandardKind::Phi,
        "phibar" => StandardKind::PhiBar,
        "tau" => StandardKind::Tau,
        "id" => StandardKind::Id,
        "idbar" => StandardKind::IdBar,
        "delta" => StandardKind::Delta,
        "deltabar" => StandardKind::DeltaBar,
        other => return Err(CoreError::UnknownKind(other.to_string())),
    })
}

fn check_prob(p: f64, name: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(CoreError::OutOfRange(format!("{name} = {p} outside [0, 1]")));
    }
    Ok(())
}

/// Depolarizing channel ρ ↦ (1−p)ρ + p·τ_d, in Weyl–Kraus form:
/// {√(1−p(d²−1)/d²)·1} ∪ {√(p)/d · U_x : x ≠ 0}.
pub fn depolarizing_channel(input: &str, output: &str, d: usize, p: f64) -> Result<ChannelSpec> {
    check_prob(p, "depolarizing p")?;
    let mut kraus = Vec::with_capacity(d * d);
    let w_id = (1.0 - p * ((d * d - 1) as f64) / ((d * d) as f64)).sqrt();
    kraus.push(CMatrix::identity(d).scale(C64::new(w_id, 0.0)));
    let w = p.sqrt() / d as f64;
    for (i, u) in weyl_family(d).into_iter().enumerate() {
        if i == 0 {
            continue;
        }
        kraus.push(u.scale(C64::new(w, 0.0)));
    }
    ChannelSpec::new_cptp(
        SystemLayout::single(input, d)?,
        SystemLayout::single(output, d)?,
        kraus,
    )
}

/// Dephasing channel ρ ↦ (1−p)ρ + p·diag(ρ), Kraus
/// {√(1−p)·1} ∪ {√p·|x⟩⟨x|}.
pub fn dephasing_channel(input: &str, output: &str, d: usize, p: f64) -> Result<ChannelSpec> {
    check_prob(p, "dephasing p")?;
    let mut kraus = vec![CMatrix::identity(d).scale(C64::new((1.0 - p).sqrt(), 0.0))];
    let w = C64::new(p.sqrt(), 0.0);
    for x in 0..d {
        let mut k = CMatrix::zeros(d, d);
        k[(x, x)] = w;
        kraus.push(k);
    }
    ChannelSpec::new_cptp(
        SystemLayout::single(input, d)?,
        SystemLayout::single(output, d)?,
        kraus,
    )
}

/// Erasure channel: with probability p the input is replaced by an erasure
/// flag |d⟩; output dimension d+1.
pub fn erasure_channel(input: &str, output: &str, d: usize, p: f64) -> Result<ChannelSpec> {
    check_prob(p, "erasure p")?;
    let keep = (1.0 - p).sqrt();
    let mut k0 = CMatrix::zeros(d + 1, d);
    for x in 0..d {
        k0[(x, x)] = C64::new(keep, 0.0);
    }
    let mut kraus = vec![k0];
    let w = C64::new(p.sqrt(), 0.0);
    for x in 0..d {
        let mut k = CMatrix::zeros(d + 1, d);
        k[(d, x)] = w;
        kraus.push(k);
    }
    ChannelSpec::new_cptp(
        SystemLayout::single(input, d)?,
        SystemLayout::single(output, d + 1)?,
        kraus,
    )
}

/// Qubit amplitude damping with decay probability g.
pub fn amplitude_damping_channel(input: &str, output: &str, g: f64) -> Result<ChannelSpec> {
    check_prob(g, "amplitude damping g")?;
    let mut k0 = CMatrix::identity(2);
    k0[(1, 1)] = C64::new((1.0 - g).sqrt(), 0.0);
    let mut k1 = CMatrix::zeros(2, 2);
    k1[(0, 1)] = C64::new(g.sqrt(), 0.0);
    ChannelSpec::new_cptp(
        SystemLayout::single(input, 2)?,
        SystemLayout::single(output, 2)?,
        vec![k0, k1],
    )
}

/// Qubit Pauli-X applied as a channel (d-dim generalization: the shift X).
pub fn pauli_x_channel(input: &str, output: &str, d: usize) -> Result<ChannelSpec> {
    ChannelSpec::new_cptp(
        SystemLayout::single(input, d)?,
        SystemLayout::single(output, d)?,
        vec![weyl_x(d)],
    )
}

/// Parse a CLI channel description `name:param`, e.g. `depolarizing:0.25`.
pub fn parse_named_channel(desc: &str, input: &str, output: &str) -> Result<ChannelSpec> {
    let (name, param) = match desc.split_once(':') {
        Some((n, p)) => (n, Some(p)),
        None => (desc, None),
    };
    let parse_p = |p: Option<&str>| -> Result<f64> {
        p.ok_or_else(|| CoreError::Malformed(format!("channel `{name}` needs a parameter")))?
            .parse::<f64>()
            .map_err(|e| CoreError::Malformed(format!("bad channel parameter: {e}")))
    };
    match name {
        "depolarizing" => depolarizing_channel(input, output, 2, parse_p(param)?),
        "dephasing" => dephasing_channel(input, output, 2, parse_p(param)?),
        "erasure" => erasure_channel(input, output, 2, parse_p(param)?),
        "amplitude-damping" => amplitude_damping_channel(input, output, parse_p(param)?),
        "perfect" => Ok(identity_channel(input, output, 2)?.as_channel()),
        "classical" => dephasing_classical_channel(input, output, 2),
        other => Err(CoreError::UnknownKind(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::apply;
    use crate::linalg::trace_norm_hermitian;

    #[test]
    fn phibar_matrix_is_diagonal_half() {
        let s = correlated_classical("A", "B", 2).unwrap();
        let m = s.matrix();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j && (i == 0 || i == 3) { 0.5 } else { 0.0 };
                assert!((m[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn phi_matrix_entries() {
        let s = max_entangled("A", "B", 2).unwrap();
        let m = s.matrix();
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((m[(i, j)].re - 0.5).abs() < 1e-15);
        }
        assert!((m[(1, 1)].norm()) < 1e-15);
    }

    #[test]
    fn weyl_twirl_gives_tau() {
        for d in [2usize, 3] {
            let mut rng_state = 0.3f64;
            // deterministic pseudo-random pure state
            let mut v = vec![ZERO; d];
            for x in v.iter_mut() {
                rng_state = (rng_state * 997.13).fract();
                *x = C64::new(rng_state + 0.1, (rng_state * 0.7).fract());
            }
            let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for x in v.iter_mut() {
                *x /= n;
            }
            let rho = CMatrix::outer(&v, &v);
            let mut acc = CMatrix::zeros(d, d);
            for u in weyl_family(d) {
                acc = acc.add(&u.mul(&rho).mul(&u.adjoint()));
            }
            acc = acc.scale(C64::new(1.0 / ((d * d) as f64), 0.0));
            let tau = CMatrix::identity(d).scale(C64::new(1.0 / d as f64, 0.0));
            assert!(acc.sub(&tau).max_abs() < 1e-12);
        }
    }

    #[test]
    fn coherent_intertwines_with_shift_correction() {
        // Δ_d ∘ U_(a,b) = (X^a ⊗ U_(a,b)) ∘ Δ_d
        for d in [2usize, 3] {
            let delta = coherent_channel("Ain", "A", "B", d).unwrap();
            for a in 0..d {
                for b in 0..d {
                    let u = weyl(d, a, b);
                    let v = weyl_x(d);
                    let lhs = delta.matrix().mul(&u);
                    let vpow = {
                        let mut m = CMatrix::identity(d);
                        for _ in 0..a {
                            m = v.mul(&m);
                        }
                        m
                    };
                    let rhs = vpow.kron(&u).mul(delta.matrix());
                    assert!(lhs.sub(&rhs).max_abs() < 1e-12, "d={d} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn delta_is_basis_dependent_but_id_is_not() {
        // (U ⊗ U*) Φ_d = Φ_d holds; the analogous covariance for Δ_d fails.
        let d = 2;
        let theta = 0.7f64;
        let u = CMatrix::from_fn(d, d, |i, j| match (i, j) {
            (0, 0) => C64::new(theta.cos(), 0.0),
            (0, 1) => C64::new(theta.sin(), 0.0),
            (1, 0) => C64::new(-theta.sin(), 0.0),
            (1, 1) => C64::new(theta.cos(), 0.0),
            _ => ZERO,
        });
        let phi = max_entangled("A", "B", d).unwrap();
        let uu = u.kron(&CMatrix::from_fn(d, d, |i, j| u[(i, j)].conj()));
        let rotated = uu.mul(phi.matrix()).mul(&uu.adjoint());
        assert!(rotated.sub(phi.matrix()).max_abs() < 1e-12);

        // id covariance: U† ∘ id ∘ U = id; Δ covariance fails
        let delta = coherent_channel("Ain", "A", "B", d).unwrap();
        let cov = u.kron(&u).adjoint().mul(delta.matrix()).mul(&u);
        assert!(cov.sub(delta.matrix()).max_abs() > 1e-2);
    }

    #[test]
    fn depolarizing_moves_toward_tau() {
        let phi = max_entangled("R", "A", 2).unwrap();
        let dep = depolarizing_channel("A", "B", 2, 1.0).unwrap();
        let out = apply(&dep, &phi, &["A"]).unwrap();
        // fully depolarized: τ_2 ⊗ τ_2
        let tt = maximally_mixed("R", 2)
            .unwrap()
            .tensor(&maximally_mixed("B", 2).unwrap())
            .unwrap();
        assert!(out.trace_distance_to(&tt).unwrap() < 1e-12);
        // and ‖Φ − τ⊗τ‖₁ = 3/2
        let diff = phi.matrix().sub(tt.matrix());
        assert!((trace_norm_hermitian(&diff).unwrap() - 1.5).abs() < 1e-12);
    }
}
