use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProtoError {
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("ownership violation: {0}")]
    Ownership(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Core(#[from] qsc_core::CoreError),
    #[error(transparent)]
    Calc(#[from] qsc_calculus::CalcError),
}

pub type Result<T> = std::result::Result<T, ProtoError>;
