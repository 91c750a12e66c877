//! Witness parameterizations of the single-letter region formulas: ensemble
//! probabilities with per-branch isometries for the static families, pure
//! channel inputs (with an optional classical ensemble) for the dynamic ones.

use crate::error::{Result, TradeoffError};
use qsc_core::json::{matrix_from_json, matrix_to_json, MatrixJson};
use qsc_core::linalg::{exp_i_hermitian, CMatrix, C64};
use qsc_core::random::{random_isometry, random_state_vector};
use rand::Rng;
use serde::{Deserialize, Serialize};

pub const ISOMETRY_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub enum SigmaWitness {
    /// (p_x, U_x: A → A'E') — ensembles of isometries; the QQ version traces
    /// out E' (noisy super-dense coding uses the same parameterization).
    Ensemble { probs: Vec<f64>, isometries: Vec<CMatrix> },
    /// W: A → A'E'X — an instrument with pure branches, the X slot dephased.
    Instrument { w: CMatrix, nx: usize },
    /// Pure channel input φ^{A A'}.
    PureInput { vector: Vec<C64>, dim_a: usize },
    /// Classical ensemble of pure channel inputs (p_x, φ_x^{AA'}).
    InputEnsemble { probs: Vec<f64>, vectors: Vec<Vec<C64>>, dim_a: usize },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessJson {
    Ensemble { probs: Vec<f64>, isometries: Vec<MatrixJson> },
    Instrument { w: MatrixJson, nx: usize },
    PureInput { vector: Vec<[f64; 2]>, dim_a: usize },
    InputEnsemble { probs: Vec<f64>, vectors: Vec<Vec<[f64; 2]>>, dim_a: usize },
}

impl SigmaWitness {
    pub fn to_json(&self) -> WitnessJson {
        match self {
            SigmaWitness::Ensemble { probs, isometries } => WitnessJson::Ensemble {
                probs: probs.clone(),
                isometries: isometries.iter().map(matrix_to_json).collect(),
            },
            SigmaWitness::Instrument { w, nx } => {
                WitnessJson::Instrument { w: matrix_to_json(w), nx: *nx }
            }
            SigmaWitness::PureInput { vector, dim_a } => WitnessJson::PureInput {
                vector: vector.iter().map(|z| [z.re, z.im]).collect(),
                dim_a: *dim_a,
            },
            SigmaWitness::InputEnsemble { probs, vectors, dim_a } => WitnessJson::InputEnsemble {
                probs: probs.clone(),
                vectors: vectors
                    .iter()
                    .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
                    .collect(),
                dim_a: *dim_a,
            },
        }
    }

    pub fn from_json(j: &WitnessJson) -> Result<Self> {
        Ok(match j {
            WitnessJson::Ensemble { probs, isometries } => SigmaWitness::Ensemble {
                probs: probs.clone(),
                isometries: isometries
                    .iter()
                    .map(|m| matrix_from_json(m).map_err(TradeoffError::from))
                    .collect::<Result<_>>()?,
            },
            WitnessJson::Instrument { w, nx } => {
                SigmaWitness::Instrument { w: matrix_from_json(w)?, nx: *nx }
            }
            WitnessJson::PureInput { vector, dim_a } => SigmaWitness::PureInput {
                vector: vector.iter().map(|p| C64::new(p[0], p[1])).collect(),
                dim_a: *dim_a,
            },
            WitnessJson::InputEnsemble { probs, vectors, dim_a } => SigmaWitness::InputEnsemble {
                probs: probs.clone(),
                vectors: vectors
                    .iter()
                    .map(|v| v.iter().map(|p| C64::new(p[0], p[1])).collect())
                    .collect(),
                dim_a: *dim_a,
            },
        })
    }

    /// Structural validity: probabilities form a distribution, isometries
    /// satisfy V†V = 1 within tolerance.
    pub fn validate(&self) -> Result<()> {
        let check_probs = |probs: &[f64]| -> Result<()> {
            if probs.iter().any(|p| *p < -1e-12) {
                return Err(TradeoffError::InvalidWitness("negative probability".into()));
            }
            let total: f64 = probs.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(TradeoffError::InvalidWitness(format!(
                    "probabilities sum to {total}"
                )));
            }
            Ok(())
        };
        let check_iso = |m: &CMatrix| -> Result<()> {
            let defect = m
                .adjoint()
                .mul(m)
                .sub(&CMatrix::identity(m.cols()))
                .max_abs();
            if defect > ISOMETRY_TOL {
                return Err(TradeoffError::InvalidWitness(format!(
                    "isometry defect {defect:.3e}"
                )));
            }
            Ok(())
        };
        match self {
            SigmaWitness::Ensemble { probs, isometries } => {
                check_probs(probs)?;
                if probs.len() != isometries.len() || probs.is_empty() {
                    return Err(TradeoffError::InvalidWitness("ensemble shape".into()));
                }
                for v in isometries {
                    check_iso(v)?;
                }
                Ok(())
            }
            SigmaWitness::Instrument { w, .. } => check_iso(w),
            SigmaWitness::PureInput { vector, .. } => {
                let n: f64 = vector.iter().map(|z| z.norm_sqr()).sum();
                if (n - 1.0).abs() > 1e-9 {
                    return Err(TradeoffError::InvalidWitness(format!("input norm² {n}")));
                }
                Ok(())
            }
            SigmaWitness::InputEnsemble { probs, vectors, .. } => {
                check_probs(probs)?;
                for v in vectors {
                    let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                    if (n - 1.0).abs() > 1e-9 {
                        return Err(TradeoffError::InvalidWitness(format!("input norm² {n}")));
                    }
                }
                Ok(())
            }
        }
    }

    /// A small random perturbation: simplex step on probabilities, skew-
    /// Hermitian exponential updates on isometries, vector noise on inputs.
    pub fn perturbed(&self, step: f64, rng: &mut impl Rng) -> Result<SigmaWitness> {
        let move_probs = |probs: &[f64], rng: &mut dyn rand::RngCore| -> Vec<f64> {
            let mut p = probs.to_vec();
            if p.len() >= 2 {
                let mut r = rng;
                let i = r.gen_range(0..p.len());
                let j = r.gen_range(0..p.len());
                if i != j {
                    let delta = (step * 0.5).min(p[i]) * r.gen_range(0.0..1.0);
                    p[i] -= delta;
                    p[j] += delta;
                }
            }
            let total: f64 = p.iter().sum();
            for v in p.iter_mut() {
                *v /= total;
            }
            p
        };
        let rotate = |m: &CMatrix, rng: &mut dyn rand::RngCore| -> Result<CMatrix> {
            let rows = m.rows();
            let mut r = rng;
            let h = CMatrix::from_fn(rows, rows, |_, _| {
                C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
            })
            .hermitize()
            .scale(C64::new(step, 0.0));
            let u = exp_i_hermitian(&h)?;
            Ok(u.mul(m))
        };
        Ok(match self {
            SigmaWitness::Ensemble { probs, isometries } => {
                let probs = move_probs(probs, rng);
                let mut isometries = isometries.clone();
                let k = rng.gen_range(0..isometries.len());
                isometries[k] = rotate(&isometries[k], rng)?;
                SigmaWitness::Ensemble { probs, isometries }
            }
            SigmaWitness::Instrument { w, nx } => {
                SigmaWitness::Instrument { w: rotate(w, rng)?, nx: *nx }
            }
            SigmaWitness::PureInput { vector, dim_a } => {
                let mut v = vector.clone();
                for z in v.iter_mut() {
                    *z += C64::new(
                        step * rng.gen_range(-1.0..1.0),
                        step * rng.gen_range(-1.0..1.0),
                    );
                }
                normalize(&mut v);
                SigmaWitness::PureInput { vector: v, dim_a: *dim_a }
            }
            SigmaWitness::InputEnsemble { probs, vectors, dim_a } => {
                let probs = move_probs(probs, rng);
                let mut vectors = vectors.clone();
                let k = rng.gen_range(0..vectors.len());
                for z in vectors[k].iter_mut() {
                    *z += C64::new(
                        step * rng.gen_range(-1.0..1.0),
                        step * rng.gen_range(-1.0..1.0),
                    );
                }
                normalize(&mut vectors[k]);
                SigmaWitness::InputEnsemble { probs, vectors, dim_a: *dim_a }
            }
        })
    }

    /// Random witness of the right shape for a family.
    pub fn random_ensemble(nx: usize, da: usize, de: usize, rng: &mut impl Rng) -> SigmaWitness {
        let mut probs: Vec<f64> = (0..nx).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = probs.iter().sum();
        for p in probs.iter_mut() {
            *p /= total;
        }
        let isometries = (0..nx)
            .map(|_| random_isometry(da * de, da, rng))
            .collect();
        SigmaWitness::Ensemble { probs, isometries }
    }

    pub fn random_instrument(nx: usize, da: usize, de: usize, rng: &mut impl Rng) -> SigmaWitness {
        SigmaWitness::Instrument { w: random_isometry(da * de * nx, da, rng), nx }
    }

    pub fn random_pure_input(da: usize, din: usize, rng: &mut impl Rng) -> SigmaWitness {
        SigmaWitness::PureInput { vector: random_state_vector(da * din, rng), dim_a: da }
    }

    pub fn random_input_ensemble(
        nx: usize,
        da: usize,
        din: usize,
        rng: &mut impl Rng,
    ) -> SigmaWitness {
        let mut probs: Vec<f64> = (0..nx).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = probs.iter().sum();
        for p in probs.iter_mut() {
            *p /= total;
        }
        let vectors = (0..nx)
            .map(|_| random_state_vector(da * din, rng))
            .collect();
        SigmaWitness::InputEnsemble { probs, vectors, dim_a: da }
    }
}

fn normalize(v: &mut [C64]) {
    let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
}
