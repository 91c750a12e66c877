//! Seeded random-restart boundary optimizer: canonical starts plus random
//! witnesses, refined by accept-if-better perturbations with step halving.
//! Curves are inner bounds; feasibility of every recorded witness is
//! re-verified after the search.

use crate::error::{Result, TradeoffError};
use crate::region::{boundary_value, eval_point, feasible, Family, RegionBase, RegionSpec};
use crate::witness::SigmaWitness;
use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use qsc_core::linalg::CMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug)]
pub struct OptimizeOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub rel_tol: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions { restarts: 64, seed: 1, max_iters: 400, rel_tol: 1e-7 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvePoint {
    pub budget: f64,
    pub value: f64,
    #[serde(skip)]
    pub witness: SigmaWitness,
}

#[derive(Clone, Debug)]
pub struct TradeoffCurve {
    pub family: Family,
    pub axes: (String, String),
    pub points: Vec<CurvePoint>,
    pub restarts: usize,
    pub seed: u64,
}

impl TradeoffCurve {
    /// Boundary value at a budget: the best value among computed points with
    /// budget ≤ the query (the regions are monotone in their budget).
    pub fn value_at(&self, budget: f64) -> Option<f64> {
        let mut best: Option<f64> = None;
        for p in &self.points {
            if p.budget <= budget + 1e-12 {
                best = Some(best.map_or(p.value, |b: f64| b.max(p.value)));
            }
        }
        best
    }

    pub fn witness_blob(w: &SigmaWitness) -> String {
        let json = serde_json::to_string(&w.to_json()).expect("witness serializes");
        B64.encode(json.as_bytes())
    }

    /// CSV: header comment with the run metadata, then budget,value,witness.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# family={} axes={},{} seed={} restarts={}\nbudget,value,witness\n",
            self.family.name(),
            self.axes.0,
            self.axes.1,
            self.seed,
            self.restarts
        );
        for p in &self.points {
            out.push_str(&format!(
                "{:.12e},{:.12e},{}\n",
                p.budget,
                p.value,
                Self::witness_blob(&p.witness)
            ));
        }
        out
    }
}

fn canonical_starts(family: Family, base: &RegionBase, in_dims: (usize, usize)) -> Vec<SigmaWitness> {
    let (da, de) = in_dims;
    match family {
        Family::Mother | Family::Nsd => {
            let ident = SigmaWitness::Ensemble {
                probs: vec![1.0],
                isometries: vec![CMatrix::identity(da)],
            };
            // discarding witness: route the input into the branch
            // environment, leaving A' in a pure state (zero constraint)
            let mut discard = CMatrix::zeros(da * de, da);
            for a in 0..da.min(de) {
                discard[(a, a)] = qsc_core::linalg::ONE;
            }
            let disc = SigmaWitness::Ensemble { probs: vec![1.0], isometries: vec![discard] };
            vec![ident, disc]
        }
        Family::Ntp | Family::Ed => {
            let mut discard = CMatrix::zeros(da * de, da);
            for a in 0..da.min(de) {
                discard[(a, a)] = qsc_core::linalg::ONE;
            }
            vec![
                SigmaWitness::Instrument { w: CMatrix::identity(da), nx: 1 },
                SigmaWitness::Instrument { w: discard, nx: 1 },
            ]
        }
        Family::Father => {
            let RegionBase::Dynamic { in_dim, .. } = base else {
                return vec![];
            };
            // maximally entangled input
            let d = *in_dim;
            let mut v = vec![qsc_core::linalg::ZERO; d * d];
            let w = qsc_core::linalg::C64::new(1.0 / (d as f64).sqrt(), 0.0);
            for x in 0..d {
                v[x * d + x] = w;
            }
            vec![SigmaWitness::PureInput { vector: v, dim_a: d }]
        }
        Family::Eac => {
            let RegionBase::Dynamic { in_dim, .. } = base else {
                return vec![];
            };
            let d = *in_dim;
            let mut v = vec![qsc_core::linalg::ZERO; d * d];
            let w = qsc_core::linalg::C64::new(1.0 / (d as f64).sqrt(), 0.0);
            for x in 0..d {
                v[x * d + x] = w;
            }
            let ent = SigmaWitness::InputEnsemble {
                probs: vec![1.0],
                vectors: vec![v],
                dim_a: d,
            };
            // classical ensemble: computational basis states against a fixed
            // reference basis state
            let mut basis_vectors = Vec::new();
            for x in 0..d.min(2) {
                let mut bv = vec![qsc_core::linalg::ZERO; d * d];
                bv[x] = qsc_core::linalg::C64::new(1.0, 0.0);
                basis_vectors.push(bv);
            }
            let classical = SigmaWitness::InputEnsemble {
                probs: vec![1.0 / basis_vectors.len() as f64; basis_vectors.len()],
                vectors: basis_vectors,
                dim_a: d,
            };
            vec![ent, classical]
        }
    }
}

fn random_start(family: Family, base: &RegionBase, nx: usize, rng: &mut impl Rng) -> SigmaWitness {
    match (family, base) {
        (Family::Mother | Family::Nsd, RegionBase::Static { psi }) => {
            let da = psi.layout().dim_of("A").unwrap_or(2);
            SigmaWitness::random_ensemble(nx, da, da, rng)
        }
        (Family::Ntp | Family::Ed, RegionBase::Static { psi }) => {
            let da = psi.layout().dim_of("A").unwrap_or(2);
            SigmaWitness::random_instrument(nx, da, da, rng)
        }
        (Family::Father, RegionBase::Dynamic { in_dim, .. }) => {
            SigmaWitness::random_pure_input(*in_dim, *in_dim, rng)
        }
        (Family::Eac, RegionBase::Dynamic { in_dim, .. }) => {
            SigmaWitness::random_input_ensemble(nx, *in_dim, *in_dim, rng)
        }
        _ => unreachable!("region spec validated at construction"),
    }
}

struct RestartOutcome {
    value: f64,
    witness: SigmaWitness,
}

fn refine(
    family: Family,
    base: &RegionBase,
    budget: f64,
    start: SigmaWitness,
    opts: &OptimizeOptions,
    rng: &mut ChaCha20Rng,
) -> Result<Option<RestartOutcome>> {
    let mut current = start;
    let mut point = match eval_point(family, base, &current) {
        Ok(p) => p,
        Err(_) => return Ok(None),
    };
    if !feasible(family, budget, &point) {
        return Ok(None);
    }
    let mut value = boundary_value(family, budget, &point);
    let mut step = 0.25f64;
    let mut stall = 0usize;
    for _ in 0..opts.max_iters {
        if step < 1e-7 {
            break;
        }
        let cand = current.perturbed(step, rng)?;
        let Ok(cp) = eval_point(family, base, &cand) else {
            continue;
        };
        if !feasible(family, budget, &cp) {
            stall += 1;
            if stall >= 6 {
                step *= 0.5;
                stall = 0;
            }
            continue;
        }
        let cv = boundary_value(family, budget, &cp);
        if cv > value * (1.0 + opts.rel_tol) + 1e-13 {
            value = cv;
            current = cand;
            point = cp;
            stall = 0;
        } else {
            stall += 1;
            if stall >= 6 {
                step *= 0.5;
                stall = 0;
            }
        }
    }
    let _ = point;
    Ok(Some(RestartOutcome { value, witness: current }))
}

/// Compute the boundary over a budget grid. Deterministic in (spec, budgets,
/// options): every (budget, restart) pair gets its own seeded generator and
/// results are merged in index order.
pub fn optimize_boundary(
    spec: &RegionSpec,
    budgets: &[f64],
    opts: &OptimizeOptions,
) -> Result<TradeoffCurve> {
    if budgets.is_empty() || opts.restarts == 0 {
        return Err(TradeoffError::InvalidWitness(
            "empty budget grid or zero restarts".into(),
        ));
    }
    let base = spec.base()?;
    let family = spec.family;
    let in_dims = match &base {
        RegionBase::Static { psi } => {
            let da = psi.layout().dim_of("A")?;
            (da, da)
        }
        RegionBase::Dynamic { in_dim, .. } => (*in_dim, *in_dim),
    };
    let canon = canonical_starts(family, &base, in_dims);
    let mut points: Vec<CurvePoint> = Vec::with_capacity(budgets.len());
    let mut carry: Option<SigmaWitness> = None;

    let mut sorted_budgets = budgets.to_vec();
    sorted_budgets.sort_by(|a, b| a.partial_cmp(b).unwrap());

    for (bi, &budget) in sorted_budgets.iter().enumerate() {
        let mut starts: Vec<(usize, SigmaWitness)> = Vec::with_capacity(opts.restarts);
        for (i, w) in canon.iter().enumerate() {
            starts.push((i, w.clone()));
        }
        if let Some(w) = &carry {
            starts.push((starts.len(), w.clone()));
        }
        let fixed = starts.len();
        for r in fixed..opts.restarts.max(fixed) {
            let mut rng = ChaCha20Rng::seed_from_u64(
                opts.seed ^ (bi as u64).wrapping_mul(0x9e3779b97f4a7c15) ^ (r as u64) << 32,
            );
            let nx = [1usize, 2, 2, 4][r % 4].min(crate::region::MAX_ENSEMBLE);
            starts.push((r, random_start(family, &base, nx, &mut rng)));
        }
        let outcomes: Vec<Option<RestartOutcome>> = starts
            .par_iter()
            .map(|(r, w)| {
                let mut rng = ChaCha20Rng::seed_from_u64(
                    opts.seed
                        ^ 0xabcd_1234_u64
                        ^ (bi as u64).wrapping_mul(0x9e3779b97f4a7c15)
                        ^ (*r as u64) << 32,
                );
                refine(family, &base, budget, w.clone(), opts, &mut rng).unwrap_or(None)
            })
            .collect();
        let mut best: Option<RestartOutcome> = None;
        for o in outcomes.into_iter().flatten() {
            best = Some(match best {
                None => o,
                Some(b) if o.value > b.value => o,
                Some(b) => b,
            });
        }
        let best = best.ok_or_else(|| {
            TradeoffError::InvalidWitness(format!(
                "no feasible witness found at budget {budget}"
            ))
        })?;
        // post-hoc feasibility: never trust the optimizer
        let check = eval_point(family, &base, &best.witness)?;
        if !feasible(family, budget, &check) {
            return Err(TradeoffError::InvalidWitness(
                "recorded witness is infeasible".into(),
            ));
        }
        carry = Some(best.witness.clone());
        points.push(CurvePoint { budget, value: best.value, witness: best.witness });
    }
    let axes = family.axes();
    Ok(TradeoffCurve {
        family,
        axes: (axes.0.to_string(), axes.1.to_string()),
        points,
        restarts: opts.restarts,
        seed: opts.seed,
    })
}
