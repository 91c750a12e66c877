//! Density operators over labeled multipartite systems.

use crate::error::{CoreError, Result};
use crate::layout::SystemLayout;
use crate::linalg::{eigh, eigvalsh, hermitian_fn, CMatrix, C64, ONE, ZERO};

pub const HERM_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const EIG_FLOOR: f64 = -1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct StateSpec {
    layout: SystemLayout,
    matrix: CMatrix,
}

impl StateSpec {
    /// Validating constructor: symmetrizes drift, rejects non-unit trace and
    /// eigenvalues below the floor, clamps tiny negatives to exact zero.
    pub fn new(layout: SystemLayout, matrix: CMatrix) -> Result<Self> {
        let d = layout.total_dim();
        if !matrix.is_square() || matrix.rows() != d {
            return Err(CoreError::DimensionMismatch(format!(
                "state matrix is {}x{}, layout dimension is {d}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let matrix = matrix.hermitize();
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(CoreError::InvalidState(format!(
                "trace is {:.12}+{:.3e}i, expected 1",
                tr.re, tr.im
            )));
        }
        let vals = eigvalsh(&matrix)?;
        let min = vals.first().copied().unwrap_or(0.0);
        if min < EIG_FLOOR {
            return Err(CoreError::InvalidState(format!(
                "minimum eigenvalue {min:.3e} is below the floor"
            )));
        }
        let matrix = if min < 0.0 {
            hermitian_fn(&matrix, |x| x.max(0.0))?
        } else {
            matrix
        };
        Ok(StateSpec { layout, matrix })
    }

    /// Caller guarantees the invariants (used on hot paths where the matrix
    /// was produced by trusted trace-preserving algebra).
    pub fn new_unchecked(layout: SystemLayout, matrix: CMatrix) -> Self {
        debug_assert_eq!(layout.total_dim(), matrix.rows());
        StateSpec { layout, matrix }
    }

    pub fn pure(layout: SystemLayout, vector: &[C64]) -> Result<Self> {
        if vector.len() != layout.total_dim() {
            return Err(CoreError::DimensionMismatch(format!(
                "vector length {} vs layout dimension {}",
                vector.len(),
                layout.total_dim()
            )));
        }
        let norm2: f64 = vector.iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-9 {
            return Err(CoreError::InvalidState(format!(
                "pure state vector has norm² {norm2:.12}"
            )));
        }
        Ok(StateSpec { layout, matrix: CMatrix::outer(vector, vector) })
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// tr ρ² — equals 1 for pure states.
    pub fn purity(&self) -> f64 {
        self.matrix.mul(&self.matrix).trace().re
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(eigvalsh(&self.matrix)?)
    }

    /// Kronecker product in layout order; label sets must be disjoint.
    pub fn tensor(&self, other: &StateSpec) -> Result<StateSpec> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(StateSpec { layout, matrix: self.matrix.kron(&other.matrix) })
    }

    /// Restriction onto `keep` (order taken from the current layout).
    pub fn partial_trace(&self, keep: &[&str]) -> Result<StateSpec> {
        if keep.is_empty() {
            return Err(CoreError::OutOfRange("keep set is empty".into()));
        }
        let keep: Vec<String> = keep.iter().map(|s| s.to_string()).collect();
        let kept_layout = self.layout.restricted_to(&keep)?;
        if kept_layout.len() != keep.len() {
            // restricted_to silently drops labels it does not know only when
            // `keep` repeats entries; duplicates are rejected here.
            return Err(CoreError::Malformed("duplicate label in keep set".into()));
        }
        let traced: Vec<(String, usize)> = self
            .layout
            .labels()
            .iter()
            .zip(self.layout.dims())
            .filter(|(l, _)| !keep.contains(l))
            .map(|(l, d)| (l.clone(), *d))
            .collect();
        if traced.is_empty() {
            return Ok(self.clone());
        }
        let traced_layout = SystemLayout::new(traced)?;
        let front = kept_layout.concat(&traced_layout)?;
        let perm = self.permuted_matrix(&front)?;
        let dk = kept_layout.total_dim();
        let dt = traced_layout.total_dim();
        let mut out = CMatrix::zeros(dk, dk);
        for i in 0..dk {
            for j in 0..dk {
                let mut acc = ZERO;
                for t in 0..dt {
                    acc += perm[(i * dt + t, j * dt + t)];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(StateSpec { layout: kept_layout, matrix: out })
    }

    /// The matrix re-expressed in a target label order (exact permutation).
    pub fn permuted_matrix(&self, target: &SystemLayout) -> Result<CMatrix> {
        if target == &self.layout {
            return Ok(self.matrix.clone());
        }
        let table = self.layout.permutation_to(target)?;
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                out[(table[i], table[j])] = self.matrix[(i, j)];
            }
        }
        Ok(out)
    }

    /// Same state with subsystems listed in `order`.
    pub fn permute(&self, order: &[&str]) -> Result<StateSpec> {
        let parts: Vec<(String, usize)> = order
            .iter()
            .map(|l| Ok((l.to_string(), self.layout.dim_of(l)?)))
            .collect::<Result<_>>()?;
        let target = SystemLayout::new(parts)?;
        let matrix = self.permuted_matrix(&target)?;
        Ok(StateSpec { layout: target, matrix })
    }

    /// Rename subsystems, keeping order and dimensions.
    pub fn relabel(&self, map: &[(&str, &str)]) -> Result<StateSpec> {
        let mut parts: Vec<(String, usize)> = self
            .layout
            .labels()
            .iter()
            .zip(self.layout.dims())
            .map(|(l, d)| (l.clone(), *d))
            .collect();
        for (from, to) in map {
            match parts.iter_mut().find(|(l, _)| l == from) {
                Some(p) => p.0 = to.to_string(),
                None => return Err(CoreError::UnknownLabel(from.to_string())),
            }
        }
        Ok(StateSpec { layout: SystemLayout::new(parts)?, matrix: self.matrix.clone() })
    }

    /// Canonical purification: eigendecomposition with eigenvalues sorted
    /// descending and each eigenvector's first nonzero component made real
    /// positive; the reference has the full matrix dimension.
    pub fn purify(&self, ref_label: &str) -> Result<StateSpec> {
        if self.layout.contains(ref_label) {
            return Err(CoreError::DuplicateLabel(ref_label.to_string()));
        }
        let d = self.dim();
        let (vals, vecs) = eigh(&self.matrix)?;
        // descending
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap());
        let ref_layout = SystemLayout::single(ref_label, d)?;
        let layout = self.layout.concat(&ref_layout)?;
        let mut psi = vec![ZERO; d * d];
        for (r, &k) in order.iter().enumerate() {
            let lam = vals[k].max(0.0);
            if lam == 0.0 {
                continue;
            }
            let col = vecs.column(k);
            let phase = col
                .iter()
                .find(|z| z.norm() > 1e-12)
                .map(|z| z.conj() / z.norm())
                .unwrap_or(ONE);
            let w = lam.sqrt();
            for i in 0..d {
                // layout order is (original, ref): flat = i * d + r
                psi[i * d + r] = col[i] * phase * w;
            }
        }
        // normalize away clamp noise
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        let scale = 1.0 / norm2.sqrt();
        for z in psi.iter_mut() {
            *z *= scale;
        }
        Ok(StateSpec { layout, matrix: CMatrix::outer(&psi, &psi) })
    }

    /// ‖ρ − σ‖₁ for two states on the same labels (order-insensitive).
    pub fn trace_distance_to(&self, other: &StateSpec) -> Result<f64> {
        let om = other.permuted_matrix(&self.layout)?;
        Ok(crate::linalg::trace_norm_hermitian(&self.matrix.sub(&om))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard::{max_entangled, maximally_mixed};

    #[test]
    fn tensor_of_mixed_is_mixed() {
        let a = maximally_mixed("A", 2).unwrap();
        let b = maximally_mixed("B", 2).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert_eq!(ab.dim(), 4);
        assert!((ab.trace() - 1.0).abs() < 1e-12);
        let t4 = maximally_mixed("Z", 4).unwrap();
        assert!(ab.matrix().sub(t4.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn restriction_of_phi_is_mixed() {
        let phi = max_entangled("A", "B", 2).unwrap();
        let ra = phi.partial_trace(&["A"]).unwrap();
        let tau = maximally_mixed("A", 2).unwrap();
        assert!(ra.matrix().sub(tau.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn purify_restores_state() {
        let m = CMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                C64::new(if i == 0 { 0.9 } else { 0.1 }, 0.0)
            } else {
                ZERO
            }
        });
        let s = StateSpec::new(SystemLayout::single("A", 2).unwrap(), m).unwrap();
        let p = s.purify("R").unwrap();
        assert!((p.purity() - 1.0).abs() < 1e-9);
        let back = p.partial_trace(&["A"]).unwrap();
        assert!(back.matrix().sub(s.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_eigenvalue() {
        let m = CMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                C64::new(if i == 0 { 1.5 } else { -0.5 }, 0.0)
            } else {
                ZERO
            }
        });
        assert!(StateSpec::new(SystemLayout::single("A", 2).unwrap(), m).is_err());
    }

    #[test]
    fn permute_round_trip() {
        let phi = max_entangled("A", "B", 2).unwrap();
        let x = maximally_mixed("C", 3).unwrap();
        let s = phi.tensor(&x).unwrap();
        let p = s.permute(&["C", "A", "B"]).unwrap();
        let back = p.permute(&["A", "B", "C"]).unwrap();
        assert!(back.matrix().sub(s.matrix()).max_abs() < 1e-14);
        assert!((p.trace() - 1.0).abs() < 1e-12);
    }
}
