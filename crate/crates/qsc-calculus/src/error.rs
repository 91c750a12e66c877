use thiserror::Error;

#[derive(Debug, Error)]
pub enum CalcError {
    #[error("malformed expression: {0}")]
    Malformed(String),
    #[error("parse error at `{0}`: {1}")]
    Parse(String, String),
    #[error("negative or uncertified scale factor: {0}")]
    NegativeScale(String),
    #[error("degree overflow: atom-valued scale applied to atom-valued coefficients")]
    DegreeOverflow,
    #[error("unbound state tag `{0}`")]
    UnboundTag(String),
    #[error("unknown axiom `{0}`")]
    UnknownAxiom(String),
    #[error("rule schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("missing side condition: {0}")]
    MissingSideCondition(String),
    #[error("undischarged decoupling flag: {0}")]
    UndischargedFlag(String),
    #[error("proof error at step {step}: {reason}")]
    ProofStep { step: usize, reason: String },
    #[error(transparent)]
    Core(#[from] qsc_core::CoreError),
}

pub type Result<T> = std::result::Result<T, CalcError>;
