//! Numerical computation of the six two-dimensional trade-off regions for
//! concrete small states and channels: witness parameterizations, the
//! single-letter region formulas, a seeded random-restart optimizer over
//! witnesses, and the linear bijections tying the static regions together.

pub mod bijection;
pub mod error;
pub mod optimize;
pub mod region;
pub mod witness;

pub use bijection::{check_bijections, BijectionReport};
pub use error::{Result, TradeoffError};
pub use optimize::{optimize_boundary, CurvePoint, OptimizeOptions, TradeoffCurve};
pub use region::{eval_point, EvalPoint, Family, NoisyObject, RegionSpec};
pub use witness::SigmaWitness;
