//! Dense complex matrices and the Hermitian eigensolver used throughout.
//!
//! Matrices are row-major over `Complex64`. The eigensolver reduces a
//! Hermitian matrix to real symmetric tridiagonal form by Householder
//! reflections, absorbs subdiagonal phases into a diagonal unitary and
//! finishes with implicit-shift QL iterations. Trace norms split the matrix
//! into connected components of its exact nonzero pattern first, so
//! block-diagonal states (classical flag registers) cost only their blocks.

use num_complex::Complex64;
use std::fmt;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Rank-one |v><w| (outer product v w†).
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let row = k * other.cols;
                let orow = i * other.cols;
                for j in 0..other.cols {
                    out.data[orow + j] += a * other.data[row + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![ZERO; self.rows];
        for i in 0..self.rows {
            let mut acc = ZERO;
            let row = i * self.cols;
            for j in 0..self.cols {
                acc += self.data[row + j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, z: C64) -> CMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= z;
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        let mut t = ZERO;
        for i in 0..self.rows.min(self.cols) {
            t += self[(i, i)];
        }
        t
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        assert!(self.is_square());
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// (M + M†)/2.
    pub fn hermitize(&self) -> CMatrix {
        assert!(self.is_square());
        let n = self.rows;
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        out
    }

    pub fn submatrix(&self, idx: &[usize]) -> CMatrix {
        let mut out = CMatrix::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LinalgError {
    #[error("eigensolver failed to converge")]
    NoConvergence,
}

/// Householder reduction of a Hermitian matrix to real symmetric tridiagonal
/// form. Returns (diagonal, subdiagonal, accumulated unitary Q) with
/// A = Q T Q†. `want_q = false` skips the accumulation.
fn tridiagonalize(a: &CMatrix, want_q: bool) -> (Vec<f64>, Vec<f64>, Option<CMatrix>) {
    let n = a.rows();
    let mut m = a.clone();
    let mut q = if want_q { Some(CMatrix::identity(n)) } else { None };
    let scale = a.max_abs().max(1e-300);

    for k in 0..n.saturating_sub(2) {
        let mut norm2 = 0.0;
        for i in k + 1..n {
            norm2 += m[(i, k)].norm_sqr();
        }
        let norm = norm2.sqrt();
        if norm <= scale * 1e-300 {
            continue;
        }
        let x0 = m[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let alpha = -phase * norm;

        let mut v = vec![ZERO; n];
        for i in k + 1..n {
            v[i] = m[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 <= (scale * 1e-150) * (scale * 1e-150) {
            continue;
        }
        let tau = 2.0 / vnorm2;

        // w = M v, sigma = v† M v, u = w - (tau sigma / 2) v
        let w = m.matvec(&v);
        let sigma: C64 = v.iter().zip(&w).map(|(vi, wi)| vi.conj() * wi).sum();
        let half = sigma * (tau * 0.5);
        let u: Vec<C64> = w.iter().zip(&v).map(|(wi, vi)| wi - half * vi).collect();

        // M <- M - tau (v u† + u v†)
        for i in 0..n {
            if v[i] == ZERO && u[i] == ZERO {
                continue;
            }
            for j in 0..n {
                m[(i, j)] -= (v[i] * u[j].conj() + u[i] * v[j].conj()) * tau;
            }
        }
        if let Some(q) = q.as_mut() {
            // Q <- Q (I - tau v v†) = Q - tau (Q v) v†
            let qv = q.matvec(&v);
            for i in 0..n {
                if qv[i] == ZERO {
                    continue;
                }
                for j in 0..n {
                    q[(i, j)] -= qv[i] * v[j].conj() * tau;
                }
            }
        }
    }

    // Absorb subdiagonal phases: D[0]=1, D[i+1] = b_i D[i]/|b_i|.
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut dphase = vec![ONE; n];
    for i in 0..n {
        d[i] = m[(i, i)].re;
        if i + 1 < n {
            let b = m[(i + 1, i)];
            let r = b.norm();
            e[i] = r;
            dphase[i + 1] = if r > 0.0 { b * dphase[i] / r } else { dphase[i] };
        }
    }
    if let Some(q) = q.as_mut() {
        for j in 0..n {
            let p = dphase[j];
            if p != ONE {
                for i in 0..n {
                    q[(i, j)] *= p;
                }
            }
        }
    }
    (d, e, q)
}

/// Implicit-shift QL iteration on a real symmetric tridiagonal matrix.
/// Rotations are accumulated into the complex columns of `z` when present.
fn tql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut CMatrix>) -> Result<(), LinalgError> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(LinalgError::NoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    let nrows = z.rows();
                    for k in 0..nrows {
                        f = z[(k, i + 1)].re;
                        let fi = z[(k, i + 1)].im;
                        let zr = z[(k, i)];
                        z[(k, i + 1)] = C64::new(s * zr.re + c * f, s * zr.im + c * fi);
                        z[(k, i)] = C64::new(c * zr.re - s * f, c * zr.im - s * fi);
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvalues and eigenvectors of a Hermitian matrix, ascending.
/// Returns (values, V) with A = V diag(values) V†; columns of V orthonormal.
pub fn eigh(a: &CMatrix) -> Result<(Vec<f64>, CMatrix), LinalgError> {
    assert!(a.is_square(), "eigh requires a square matrix");
    let n = a.rows();
    if n == 0 {
        return Ok((vec![], CMatrix::zeros(0, 0)));
    }
    let (mut d, mut e, q) = tridiagonalize(a, true);
    let mut q = q.unwrap();
    tql(&mut d, &mut e, Some(&mut q))?;
    // sort ascending, permuting columns
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut v = CMatrix::zeros(n, n);
    for (newj, &oldj) in order.iter().enumerate() {
        for i in 0..n {
            v[(i, newj)] = q[(i, oldj)];
        }
    }
    Ok((vals, v))
}

/// Eigenvalues only, ascending. Splits into connected components of the
/// exact nonzero pattern first.
pub fn eigvalsh(a: &CMatrix) -> Result<Vec<f64>, LinalgError> {
    assert!(a.is_square());
    let n = a.rows();
    if n == 0 {
        return Ok(vec![]);
    }
    let comps = components(a);
    let mut vals = Vec::with_capacity(n);
    if comps.len() == 1 {
        let (mut d, mut e, _) = tridiagonalize(a, false);
        tql(&mut d, &mut e, None)?;
        vals.extend(d);
    } else {
        for comp in comps {
            if comp.len() == 1 {
                vals.push(a[(comp[0], comp[0])].re);
            } else {
                let sub = a.submatrix(&comp);
                let (mut d, mut e, _) = tridiagonalize(&sub, false);
                tql(&mut d, &mut e, None)?;
                vals.extend(d);
            }
        }
    }
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(vals)
}

/// Connected components of the exact nonzero pattern (union-find).
fn components(a: &CMatrix) -> Vec<Vec<usize>> {
    let n = a.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if a[(i, j)] != ZERO || a[(j, i)] != ZERO {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut buckets: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        buckets.entry(r).or_default().push(i);
    }
    buckets.into_values().collect()
}

/// Trace norm ‖A‖₁ = Σ|λ| of a Hermitian matrix.
pub fn trace_norm_hermitian(a: &CMatrix) -> Result<f64, LinalgError> {
    Ok(eigvalsh(a)?.iter().map(|x| x.abs()).sum())
}

/// Singular values of a general matrix, via the Hermitian eigenvalues of A†A.
pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>, LinalgError> {
    let ata = a.adjoint().mul(a);
    let vals = eigvalsh(&ata)?;
    let mut out: Vec<f64> = vals.iter().map(|&x| x.max(0.0).sqrt()).collect();
    out.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(out)
}

/// Nuclear norm Σ σᵢ of a general matrix.
pub fn nuclear_norm(a: &CMatrix) -> Result<f64, LinalgError> {
    Ok(singular_values(a)?.iter().sum())
}

/// Hermitian matrix function f applied through the eigendecomposition.
pub fn hermitian_fn(a: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix, LinalgError> {
    let (vals, v) = eigh(a)?;
    let n = a.rows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &lam) in vals.iter().enumerate() {
        let flam = f(lam);
        if flam == 0.0 {
            continue;
        }
        for i in 0..n {
            let vi = v[(i, k)];
            if vi == ZERO {
                continue;
            }
            for j in 0..n {
                out[(i, j)] += vi * v[(j, k)].conj() * flam;
            }
        }
    }
    Ok(out)
}

/// Square root of a positive semidefinite Hermitian matrix (eigenvalues
/// clamped at zero).
pub fn sqrtm_psd(a: &CMatrix) -> Result<CMatrix, LinalgError> {
    hermitian_fn(a, |x| x.max(0.0).sqrt())
}

/// exp(i H) for Hermitian H; the result is unitary.
pub fn exp_i_hermitian(h: &CMatrix) -> Result<CMatrix, LinalgError> {
    let (vals, v) = eigh(h)?;
    let n = h.rows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &lam) in vals.iter().enumerate() {
        let phase = C64::from_polar(1.0, lam);
        for i in 0..n {
            let vi = v[(i, k)];
            if vi == ZERO {
                continue;
            }
            for j in 0..n {
                out[(i, j)] += vi * v[(j, k)].conj() * phase;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha20Rng;

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
        let g = CMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.sample(rand_distr_standard()), rng.sample(rand_distr_standard()))
        });
        g.add(&g.adjoint()).scale(C64::new(0.5, 0.0))
    }

    // small local normal sampler to avoid a rand_distr dependency
    struct StdNormal;
    fn rand_distr_standard() -> StdNormal {
        StdNormal
    }
    impl rand::distributions::Distribution<f64> for StdNormal {
        fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
            // Box-Muller
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        }
    }

    #[test]
    fn eigh_reconstructs_and_is_orthonormal() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for n in [1usize, 2, 3, 5, 8, 16, 33] {
            let a = random_hermitian(n, &mut rng);
            let (vals, v) = eigh(&a).unwrap();
            // V† V = I
            let gram = v.adjoint().mul(&v);
            let defect = gram.sub(&CMatrix::identity(n)).max_abs();
            assert!(defect < 1e-11, "orthonormality defect {defect} at n={n}");
            // A V = V diag(vals)
            let av = a.mul(&v);
            let mut vd = v.clone();
            for j in 0..n {
                for i in 0..n {
                    vd[(i, j)] = v[(i, j)] * vals[j];
                }
            }
            let resid = av.sub(&vd).max_abs();
            let scale = a.max_abs().max(1.0);
            assert!(resid < 1e-10 * scale, "residual {resid} at n={n}");
            for k in 1..n {
                assert!(vals[k] >= vals[k - 1] - 1e-12);
            }
        }
    }

    #[test]
    fn eigh_matches_nalgebra() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for n in [2usize, 3, 6, 12] {
            let a = random_hermitian(n, &mut rng);
            let na = nalgebra::DMatrix::from_fn(n, n, |i, j| a[(i, j)]);
            let se = nalgebra::SymmetricEigen::new(na);
            let mut reference: Vec<f64> = se.eigenvalues.iter().copied().collect();
            reference.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let mine = eigvalsh(&a).unwrap();
            for (m, r) in mine.iter().zip(&reference) {
                assert!((m - r).abs() < 1e-9, "n={n}: {m} vs {r}");
            }
        }
    }

    #[test]
    fn trace_norm_splits_blocks() {
        // block diagonal matrix with exact zeros between blocks
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 1)] = C64::new(0.5, 0.0);
        m[(1, 0)] = C64::new(0.5, 0.0);
        m[(2, 2)] = C64::new(-0.25, 0.0);
        m[(3, 3)] = C64::new(0.75, 0.0);
        let t = trace_norm_hermitian(&m).unwrap();
        assert!((t - (0.5 + 0.5 + 0.25 + 0.75)).abs() < 1e-12);
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let h = CMatrix::zeros(3, 3);
        let u = exp_i_hermitian(&h).unwrap();
        assert!(u.sub(&CMatrix::identity(3)).max_abs() < 1e-14);
    }

    #[test]
    fn exp_i_h_is_unitary() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let h = random_hermitian(5, &mut rng);
        let u = exp_i_hermitian(&h).unwrap();
        let defect = u.adjoint().mul(&u).sub(&CMatrix::identity(5)).max_abs();
        assert!(defect < 1e-12);
    }

    #[test]
    fn sqrtm_squares_back() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let g = random_hermitian(6, &mut rng);
        let psd = g.mul(&g); // PSD
        let r = sqrtm_psd(&psd).unwrap();
        assert!(r.mul(&r).sub(&psd).max_abs() < 1e-9 * psd.max_abs().max(1.0));
    }

    #[test]
    fn kron_of_identities() {
        let a = CMatrix::identity(2);
        let b = CMatrix::identity(3);
        assert_eq!(a.kron(&b), CMatrix::identity(6));
    }
}
