use thiserror::Error;

#[derive(Debug, Error)]
pub enum TradeoffError {
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("incompatible curves: {0}")]
    IncompatibleCurves(String),
    #[error("family/object mismatch: {0}")]
    FamilyMismatch(String),
    #[error(transparent)]
    Core(#[from] qsc_core::CoreError),
    #[error(transparent)]
    Linalg(#[from] qsc_core::linalg::LinalgError),
    #[error("serialization: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, TradeoffError>;
