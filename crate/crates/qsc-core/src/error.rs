use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("total dimension {0} exceeds the limit of {max}", max = crate::layout::MAX_TOTAL_DIM)]
    DimensionLimit(usize),
    #[error("Kraus operators are not trace preserving (defect {0:.3e})")]
    NotTracePreserving(f64),
    #[error("Kraus operators are not a contraction (excess {0:.3e})")]
    NotContraction(f64),
    #[error("matrix is not an isometry (defect {0:.3e})")]
    NotIsometry(f64),
    #[error("unknown standard object kind `{0}`")]
    UnknownKind(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("label groups overlap")]
    OverlappingGroups,
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
