//! Entropic quantities, distance measures, and the operation distance.

pub mod distance;
pub mod entropy;
pub mod opdist;

pub use distance::{
    distance_report, fidelity, helstrom_bound, reconstruct_extension, trace_distance,
    uhlmann_fidelity, DistanceReport,
};
pub use entropy::{
    check_trip_identity, coherent, cond_mutual, entropy, fannes_bound, h, h_cond, mutual,
    subsystem_entropy, EntropyQuery, EntropyReport,
};
pub use opdist::{op_distance, op_distance_on_input, OpDistanceMode, OpDistanceOptions};
