//! Dynamic objects: channels in Kraus form, isometries, instruments.

use crate::error::{CoreError, Result};
use crate::layout::SystemLayout;
use crate::linalg::{eigvalsh, CMatrix, C64, ZERO};
use crate::state::StateSpec;

pub const CPTP_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct ChannelSpec {
    in_layout: SystemLayout,
    out_layout: SystemLayout,
    kraus: Vec<CMatrix>,
    trace_preserving: bool,
}

#[derive(Clone, Debug)]
pub struct IsometrySpec {
    in_layout: SystemLayout,
    out_layout: SystemLayout,
    matrix: CMatrix,
}

#[derive(Clone, Debug)]
pub struct InstrumentSpec {
    in_layout: SystemLayout,
    out_layout: SystemLayout,
    branches: Vec<Vec<CMatrix>>,
}

fn kraus_gram(kraus: &[CMatrix], din: usize) -> CMatrix {
    let mut acc = CMatrix::zeros(din, din);
    for k in kraus {
        acc = acc.add(&k.adjoint().mul(k));
    }
    acc
}

impl ChannelSpec {
    /// Completely positive trace preserving map: Σ N† N = 1.
    pub fn new_cptp(
        in_layout: SystemLayout,
        out_layout: SystemLayout,
        kraus: Vec<CMatrix>,
    ) -> Result<Self> {
        Self::validate_shapes(&in_layout, &out_layout, &kraus)?;
        let gram = kraus_gram(&kraus, in_layout.total_dim());
        let defect = gram.sub(&CMatrix::identity(in_layout.total_dim())).max_abs();
        if defect > CPTP_TOL {
            return Err(CoreError::NotTracePreserving(defect));
        }
        Ok(ChannelSpec { in_layout, out_layout, kraus, trace_preserving: true })
    }

    /// CP-only variant: Σ N† N ≤ 1.
    pub fn new_cp(
        in_layout: SystemLayout,
        out_layout: SystemLayout,
        kraus: Vec<CMatrix>,
    ) -> Result<Self> {
        Self::validate_shapes(&in_layout, &out_layout, &kraus)?;
        let gram = kraus_gram(&kraus, in_layout.total_dim());
        let max = eigvalsh(&gram.hermitize())?.last().copied().unwrap_or(0.0);
        if max > 1.0 + CPTP_TOL {
            return Err(CoreError::NotContraction(max - 1.0));
        }
        Ok(ChannelSpec { in_layout, out_layout, kraus, trace_preserving: false })
    }

    fn validate_shapes(
        in_layout: &SystemLayout,
        out_layout: &SystemLayout,
        kraus: &[CMatrix],
    ) -> Result<()> {
        if kraus.is_empty() {
            return Err(CoreError::Malformed("no Kraus operators".into()));
        }
        let (dout, din) = (out_layout.total_dim(), in_layout.total_dim());
        for k in kraus {
            if k.rows() != dout || k.cols() != din {
                return Err(CoreError::DimensionMismatch(format!(
                    "Kraus operator is {}x{}, expected {}x{}",
                    k.rows(),
                    k.cols(),
                    dout,
                    din
                )));
            }
        }
        Ok(())
    }

    pub fn in_layout(&self) -> &SystemLayout {
        &self.in_layout
    }

    pub fn out_layout(&self) -> &SystemLayout {
        &self.out_layout
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// Isometric extension: V = Σ_k N_k ⊗ |k⟩ᴱ, with env dimension equal to
    /// the number of Kraus operators.
    pub fn stinespring(&self, env_label: &str) -> Result<IsometrySpec> {
        if !self.trace_preserving {
            let gram = kraus_gram(&self.kraus, self.in_layout.total_dim());
            let defect = gram
                .sub(&CMatrix::identity(self.in_layout.total_dim()))
                .max_abs();
            return Err(CoreError::NotTracePreserving(defect));
        }
        if self.out_layout.contains(env_label) {
            return Err(CoreError::DuplicateLabel(env_label.to_string()));
        }
        let ne = self.kraus.len();
        let (dout, din) = (self.out_layout.total_dim(), self.in_layout.total_dim());
        let mut v = CMatrix::zeros(dout * ne, din);
        for (k, op) in self.kraus.iter().enumerate() {
            for i in 0..dout {
                for j in 0..din {
                    // output layout order: (out, env)
                    v[(i * ne + k, j)] = op[(i, j)];
                }
            }
        }
        let out_layout = self
            .out_layout
            .concat(&SystemLayout::single(env_label, ne)?)?;
        IsometrySpec::new(self.in_layout.clone(), out_layout, v)
    }

    /// Sequential composition `other ∘ self` when layouts line up.
    pub fn compose(&self, other: &ChannelSpec) -> Result<ChannelSpec> {
        if other.in_layout.total_dim() != self.out_layout.total_dim() {
            return Err(CoreError::DimensionMismatch(
                "composition dimensions do not match".into(),
            ));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for b in &other.kraus {
            for a in &self.kraus {
                kraus.push(b.mul(a));
            }
        }
        if self.trace_preserving && other.trace_preserving {
            ChannelSpec::new_cptp(self.in_layout.clone(), other.out_layout.clone(), kraus)
        } else {
            ChannelSpec::new_cp(self.in_layout.clone(), other.out_layout.clone(), kraus)
        }
    }
}

impl IsometrySpec {
    pub fn new(
        in_layout: SystemLayout,
        out_layout: SystemLayout,
        matrix: CMatrix,
    ) -> Result<Self> {
        let (dout, din) = (out_layout.total_dim(), in_layout.total_dim());
        if matrix.rows() != dout || matrix.cols() != din {
            return Err(CoreError::DimensionMismatch(format!(
                "isometry is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                dout,
                din
            )));
        }
        if dout < din {
            return Err(CoreError::DimensionMismatch(
                "isometry output dimension is smaller than input".into(),
            ));
        }
        let defect = matrix
            .adjoint()
            .mul(&matrix)
            .sub(&CMatrix::identity(din))
            .max_abs();
        if defect > CPTP_TOL {
            return Err(CoreError::NotIsometry(defect));
        }
        Ok(IsometrySpec { in_layout, out_layout, matrix })
    }

    pub fn in_layout(&self) -> &SystemLayout {
        &self.in_layout
    }

    pub fn out_layout(&self) -> &SystemLayout {
        &self.out_layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn as_channel(&self) -> ChannelSpec {
        ChannelSpec {
            in_layout: self.in_layout.clone(),
            out_layout: self.out_layout.clone(),
            kraus: vec![self.matrix.clone()],
            trace_preserving: true,
        }
    }
}

impl InstrumentSpec {
    /// Ordered CP branches summing to a CPTP map.
    pub fn new(
        in_layout: SystemLayout,
        out_layout: SystemLayout,
        branches: Vec<Vec<CMatrix>>,
    ) -> Result<Self> {
        if branches.is_empty() {
            return Err(CoreError::Malformed("instrument has no branches".into()));
        }
        let din = in_layout.total_dim();
        let mut total = CMatrix::zeros(din, din);
        for branch in &branches {
            ChannelSpec::validate_shapes(&in_layout, &out_layout, branch)?;
            total = total.add(&kraus_gram(branch, din));
        }
        let defect = total.sub(&CMatrix::identity(din)).max_abs();
        if defect > CPTP_TOL {
            return Err(CoreError::NotTracePreserving(defect));
        }
        Ok(InstrumentSpec { in_layout, out_layout, branches })
    }

    /// Ensemble of CPTP maps applied with the given probabilities.
    pub fn from_ensemble(probs: &[f64], maps: &[ChannelSpec]) -> Result<Self> {
        if probs.len() != maps.len() || maps.is_empty() {
            return Err(CoreError::Malformed("ensemble shape mismatch".into()));
        }
        let in_layout = maps[0].in_layout.clone();
        let out_layout = maps[0].out_layout.clone();
        let mut branches = Vec::with_capacity(maps.len());
        for (p, m) in probs.iter().zip(maps) {
            if *p < -1e-12 {
                return Err(CoreError::OutOfRange("negative probability".into()));
            }
            let w = num_complex::Complex64::new(p.max(0.0).sqrt(), 0.0);
            branches.push(m.kraus.iter().map(|k| k.scale(w)).collect());
        }
        Self::new(in_layout, out_layout, branches)
    }

    pub fn in_layout(&self) -> &SystemLayout {
        &self.in_layout
    }

    pub fn out_layout(&self) -> &SystemLayout {
        &self.out_layout
    }

    pub fn branches(&self) -> &[Vec<CMatrix>] {
        &self.branches
    }
}

/// Either kind of dynamic object, for `apply`.
pub enum Dynamic<'a> {
    Channel(&'a ChannelSpec),
    Isometry(&'a IsometrySpec),
}

impl<'a> From<&'a ChannelSpec> for Dynamic<'a> {
    fn from(c: &'a ChannelSpec) -> Self {
        Dynamic::Channel(c)
    }
}

impl<'a> From<&'a IsometrySpec> for Dynamic<'a> {
    fn from(v: &'a IsometrySpec) -> Self {
        Dynamic::Isometry(v)
    }
}

/// Apply a dynamic object to the `targets` subsystems of `s`, identity on the
/// rest. Output layout = untouched labels (original order) + the object's
/// output labels.
pub fn apply<'a>(d: impl Into<Dynamic<'a>>, s: &StateSpec, targets: &[&str]) -> Result<StateSpec> {
    let d = d.into();
    let (in_layout, out_layout, kraus): (&SystemLayout, &SystemLayout, Vec<&CMatrix>) = match &d {
        Dynamic::Channel(c) => (&c.in_layout, &c.out_layout, c.kraus.iter().collect()),
        Dynamic::Isometry(v) => (&v.in_layout, &v.out_layout, vec![&v.matrix]),
    };
    if targets.len() != in_layout.len() {
        return Err(CoreError::DimensionMismatch(format!(
            "{} target labels for an input of {} subsystems",
            targets.len(),
            in_layout.len()
        )));
    }
    for (t, din) in targets.iter().zip(in_layout.dims()) {
        let have = s.layout().dim_of(t)?;
        if have != *din {
            return Err(CoreError::DimensionMismatch(format!(
                "target `{t}` has dim {have}, channel expects {din}"
            )));
        }
    }
    // untouched labels in original order, then targets in the channel's order
    let rest: Vec<(String, usize)> = s
        .layout()
        .labels()
        .iter()
        .zip(s.layout().dims())
        .filter(|(l, _)| !targets.contains(&l.as_str()))
        .map(|(l, d)| (l.clone(), *d))
        .collect();
    if rest.len() + targets.len() != s.layout().len() {
        return Err(CoreError::Malformed("duplicate target label".into()));
    }
    let rest_layout = SystemLayout::new(rest)?;
    for l in out_layout.labels() {
        if rest_layout.contains(l) {
            return Err(CoreError::DuplicateLabel(l.clone()));
        }
    }
    let mut front_parts: Vec<(String, usize)> = rest_layout
        .labels()
        .iter()
        .zip(rest_layout.dims())
        .map(|(l, d)| (l.clone(), *d))
        .collect();
    for (t, din) in targets.iter().zip(in_layout.dims()) {
        front_parts.push((t.to_string(), *din));
    }
    let front = SystemLayout::new(front_parts)?;
    let rho = s.permuted_matrix(&front)?;

    let dr = rest_layout.total_dim();
    let din = in_layout.total_dim();
    let dout = out_layout.total_dim();
    let final_layout = rest_layout.concat(out_layout)?;
    let mut out = CMatrix::zeros(dr * dout, dr * dout);
    let mut tmp = CMatrix::zeros(dr * dout, dr * din);
    for n in kraus {
        // nonzero entries of the Kraus operator, by output row and by column
        let mut by_row: Vec<Vec<(usize, C64)>> = vec![Vec::new(); dout];
        for a in 0..dout {
            for c in 0..din {
                let v = n[(a, c)];
                if v != ZERO {
                    by_row[a].push((c, v));
                }
            }
        }
        // tmp = (1 ⊗ N) ρ
        for z in tmp.data_mut() {
            *z = ZERO;
        }
        for ri in 0..dr {
            for a in 0..dout {
                if by_row[a].is_empty() {
                    continue;
                }
                let orow = (ri * dout + a) * (dr * din);
                for &(c, nac) in &by_row[a] {
                    let prow = (ri * din + c) * (dr * din);
                    let src = &rho.data()[prow..prow + dr * din];
                    let dst = &mut tmp.data_mut()[orow..orow + dr * din];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += nac * s;
                    }
                }
            }
        }
        // out += tmp (1 ⊗ N)†
        for row in 0..dr * dout {
            let trow = row * (dr * din);
            let orow = row * (dr * dout);
            for rj in 0..dr {
                for (b, row_entries) in by_row.iter().enumerate() {
                    if row_entries.is_empty() {
                        continue;
                    }
                    let mut acc = ZERO;
                    for &(dcol, nbd) in row_entries {
                        let t = tmp.data()[trow + rj * din + dcol];
                        if t != ZERO {
                            acc += t * nbd.conj();
                        }
                    }
                    if acc != ZERO {
                        out.data_mut()[orow + rj * dout + b] += acc;
                    }
                }
            }
        }
    }
    Ok(StateSpec::new_unchecked(final_layout, out))
}

/// Apply an instrument, writing the outcome into a fresh classical register:
/// Σ_x |x⟩⟨x| ⊗ P_x(ρ). Output layout = untouched + instrument output +
/// outcome label.
pub fn apply_instrument(
    t: &InstrumentSpec,
    s: &StateSpec,
    targets: &[&str],
    outcome_label: &str,
) -> Result<StateSpec> {
    if s.layout().contains(outcome_label) || t.out_layout.contains(outcome_label) {
        return Err(CoreError::DuplicateLabel(outcome_label.to_string()));
    }
    let nx = t.branches.len();
    let mut total: Option<StateSpec> = None;
    for (x, branch) in t.branches.iter().enumerate() {
        let cp = ChannelSpec {
            in_layout: t.in_layout.clone(),
            out_layout: t.out_layout.clone(),
            kraus: branch.clone(),
            trace_preserving: false,
        };
        let piece = apply(&cp, s, targets)?;
        // tensor with |x><x| on the outcome register
        let out_layout = piece
            .layout()
            .concat(&SystemLayout::single(outcome_label, nx)?)?;
        let d = piece.dim();
        let mut m = CMatrix::zeros(d * nx, d * nx);
        for i in 0..d {
            for j in 0..d {
                let v = piece.matrix()[(i, j)];
                if v != ZERO {
                    m[(i * nx + x, j * nx + x)] = v;
                }
            }
        }
        let flagged = StateSpec::new_unchecked(out_layout, m);
        total = Some(match total {
            None => flagged,
            Some(acc) => {
                StateSpec::new_unchecked(acc.layout().clone(), acc.matrix().add(flagged.matrix()))
            }
        });
    }
    Ok(total.expect("instrument has at least one branch"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard::*;

    #[test]
    fn stinespring_of_identity_has_trivial_env() {
        let id = identity_channel("A", "B", 2).unwrap().as_channel();
        let v = id.stinespring("E").unwrap();
        assert_eq!(v.out_layout().dim_of("E").unwrap(), 1);
    }

    #[test]
    fn stinespring_consistency_on_matrix_units() {
        let deph = dephasing_channel("A", "B", 2, 1.0).unwrap();
        let v = deph.stinespring("E").unwrap();
        // check on a full matrix-unit basis via linearity: V e_j e_k† V†,
        // traced over E, equals Σ N e_j e_k† N†.
        let din = 2;
        for j in 0..din {
            for k in 0..din {
                let mut prop_direct = CMatrix::zeros(2, 2);
                for n in deph.kraus() {
                    let col_j = n.column(j);
                    let col_k = n.column(k);
                    prop_direct = prop_direct.add(&CMatrix::outer(&col_j, &col_k));
                }
                let vj = v.matrix().column(j);
                let vk = v.matrix().column(k);
                let big = CMatrix::outer(&vj, &vk);
                // trace out env (last factor, dim = #kraus)
                let ne = deph.kraus().len();
                let mut reduced = CMatrix::zeros(2, 2);
                for a in 0..2 {
                    for b in 0..2 {
                        let mut acc = ZERO;
                        for e in 0..ne {
                            acc += big[(a * ne + e, b * ne + e)];
                        }
                        reduced[(a, b)] = acc;
                    }
                }
                assert!(reduced.sub(&prop_direct).max_abs() < 1e-9);
            }
        }
    }

    #[test]
    fn apply_identity_relabels() {
        let phi = max_entangled("A", "B", 3).unwrap();
        let id = identity_channel("A", "C", 3).unwrap();
        let out = apply(&id, &phi, &["A"]).unwrap();
        assert_eq!(out.layout().labels(), &["B".to_string(), "C".to_string()]);
        let expect = max_entangled("B", "C", 3).unwrap();
        assert!(out.trace_distance_to(&expect).unwrap() < 1e-10);
    }

    #[test]
    fn full_dephasing_kills_coherence() {
        let plus = StateSpec::pure(
            SystemLayout::single("A", 2).unwrap(),
            &[
                num_complex::Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                num_complex::Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            ],
        )
        .unwrap();
        let deph = dephasing_channel("A", "B", 2, 1.0).unwrap();
        let out = apply(&deph, &plus, &["A"]).unwrap();
        let tau = maximally_mixed("B", 2).unwrap();
        assert!(out.trace_distance_to(&tau).unwrap() < 1e-12);
    }

    #[test]
    fn coherent_channel_makes_ghz() {
        let phi = max_entangled("R", "Ap", 2).unwrap();
        let delta = coherent_channel("Ap", "A", "B", 2).unwrap();
        let out = apply(&delta, &phi, &["Ap"]).unwrap();
        assert!((out.purity() - 1.0).abs() < 1e-10);
        // all three pairwise restrictions are classically maximally correlated
        for pair in [["R", "A"], ["R", "B"], ["A", "B"]] {
            let r = out.partial_trace(&[pair[0], pair[1]]).unwrap();
            let cc = correlated_classical(pair[0], pair[1], 2).unwrap();
            assert!(r.trace_distance_to(&cc).unwrap() < 1e-10);
        }
    }

    #[test]
    fn instrument_outcome_marginal_matches_probs() {
        let probs = [0.25, 0.75];
        let u0 = identity_channel("A", "A2", 2).unwrap().as_channel();
        let x = pauli_x_channel("A", "A2", 2).unwrap();
        let inst = InstrumentSpec::from_ensemble(&probs, &[u0, x]).unwrap();
        let phi = max_entangled("A", "B", 2).unwrap();
        let out = apply_instrument(&inst, &phi, &["A"], "X").unwrap();
        assert!((out.trace() - 1.0).abs() < 1e-10);
        let flag = out.partial_trace(&["X"]).unwrap();
        for (x, p) in probs.iter().enumerate() {
            assert!((flag.matrix()[(x, x)].re - p).abs() < 1e-10);
        }
    }
}
