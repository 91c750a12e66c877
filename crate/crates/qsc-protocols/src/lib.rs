//! Exact circuit-level simulation of the finite unit protocols and the
//! twirl-based absolutization, under the distant-labs ownership discipline.

pub mod absolutize;
pub mod error;
pub mod sim;
pub mod units;

pub use absolutize::{run_absolutize, AbsolutizeKind};
pub use error::{ProtoError, Result};
pub use sim::{decoupling_residual, Party, Simulation};
pub use units::{run_coherent_sd, run_coherent_tp, run_ed, run_sd, run_tp, SimResult};
