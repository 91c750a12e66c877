//! The converse-side bijections between the static regions:
//! f: (Q,E) ↦ (Q+E, 2E) carries the distillation region onto the noisy
//! super-dense coding region, and g: (R,E) ↦ (R+2E, E) carries the
//! classical-assisted distillation region onto the noisy teleportation one.
//! Both are verified pointwise on a shared witness sample: the same witness
//! evaluated under both formulas must land on the partner's point exactly.

use crate::error::{Result, TradeoffError};
use crate::region::{eval_point, Family, NoisyObject, RegionBase, RegionSpec};
use crate::witness::SigmaWitness;
use qsc_core::StateSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct BijectionReport {
    /// worst amount by which an f-mapped point falls outside the partner
    /// region (0 when every mapped point is inside)
    pub worst_f_violation: f64,
    /// worst defect of the exact identity f(mother point) = same-witness
    /// NSD point
    pub worst_f_identity_gap: f64,
    pub worst_g_violation: f64,
    pub worst_g_identity_gap: f64,
    pub samples: usize,
}

/// Evaluate both sides of each bijection on `samples` shared witnesses of ρ.
pub fn check_bijections(rho: &StateSpec, samples: usize, seed: u64) -> Result<BijectionReport> {
    let mother = RegionSpec::new(Family::Mother, NoisyObject::State(rho.clone()))?;
    let base = mother.base()?;
    let RegionBase::Static { psi } = &base else {
        return Err(TradeoffError::IncompatibleCurves(
            "static base expected".into(),
        ));
    };
    let da = psi.layout().dim_of("A")?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut worst_f_violation = 0.0f64;
    let mut worst_f_identity = 0.0f64;
    let mut worst_g_violation = 0.0f64;
    let mut worst_g_identity = 0.0f64;

    for i in 0..samples {
        let nx = [1usize, 2, 2, 4][i % 4];
        // ---- f: mother vs noisy super-dense coding, shared ensemble witness
        let w = if i == 0 {
            SigmaWitness::Ensemble {
                probs: vec![1.0],
                isometries: vec![qsc_core::linalg::CMatrix::identity(da)],
            }
        } else {
            SigmaWitness::random_ensemble(nx, da, da, &mut rng)
        };
        let m = eval_point(Family::Mother, &base, &w)?;
        let n = eval_point(Family::Nsd, &base, &w)?;
        // mother boundary point at its own budget: (Q, E) = (½I(A';EE'|X), Q + I(A'⟩BX))
        let (q, e) = (m.constraint, m.constraint + m.objective);
        // f(Q, E) = (Q + E, 2E) must land on the same-witness NSD point
        let mapped = (q + e, 2.0 * e);
        let nsd_point = (n.constraint, n.constraint + n.objective);
        let identity_gap =
            (mapped.0 - nsd_point.0).abs().max((mapped.1 - nsd_point.1).abs());
        worst_f_identity = worst_f_identity.max(identity_gap);
        // region points clamp at zero: a witness with negative net value
        // contributes nothing to the region and is trivially inside
        let violation = if mapped.1 <= 1e-12 {
            0.0
        } else {
            (n.constraint - mapped.0)
                .max(mapped.1 - (mapped.0 + n.objective))
                .max(0.0)
        };
        worst_f_violation = worst_f_violation.max(violation);

        // ---- g: noisy teleportation vs classical-assisted distillation
        let w2 = if i == 0 {
            SigmaWitness::Instrument { w: qsc_core::linalg::CMatrix::identity(da), nx: 1 }
        } else {
            SigmaWitness::random_instrument(nx, da, da, &mut rng)
        };
        let ntp = eval_point(Family::Ntp, &base, &w2)?;
        let ed = eval_point(Family::Ed, &base, &w2)?;
        let ntp_point = (ntp.constraint, ntp.objective);
        let ed_point = (ed.constraint, ed.objective);
        // g(R_ED, E) = (R_ED + 2E, E) lands on the NTP point
        let mapped_g = (ed_point.0 + 2.0 * ed_point.1, ed_point.1);
        let identity_gap_g = (mapped_g.0 - ntp_point.0)
            .abs()
            .max((mapped_g.1 - ntp_point.1).abs());
        worst_g_identity = worst_g_identity.max(identity_gap_g);
        // the g-mapped NTP point (R + 2Q⁺, Q⁺) lies inside the ED region
        let q_plus = ntp_point.1.max(0.0);
        let mapped_ntp = (ntp_point.0 + 2.0 * q_plus, q_plus);
        let violation_g = if mapped_ntp.1 <= 1e-12 {
            0.0
        } else {
            (ed.constraint - mapped_ntp.0)
                .max(mapped_ntp.1 - ed.objective)
                .max(0.0)
        };
        worst_g_violation = worst_g_violation.max(violation_g);
    }
    Ok(BijectionReport {
        worst_f_violation,
        worst_f_identity_gap: worst_f_identity,
        worst_g_violation,
        worst_g_identity_gap: worst_g_identity,
        samples,
    })
}
