use thiserror::Error;

/// Errors produced by the numerical toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("inadmissible Young function: {0}")]
    Inadmissible(String),

    #[error("integrability condition violated: {0}")]
    ConditionViolated(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("invalid mesh: {0}")]
    Mesh(String),

    #[error("empty admissible class: {0}")]
    EmptyAdmissible(String),

    #[error("normalization impossible: field vanishes on the boundary")]
    NormalizationImpossible,

    #[error("infeasible constraint: {0}")]
    Infeasible(String),

    #[error("degenerate multiplier: constraint gradient vanishes on the free dofs")]
    DegenerateMultiplier,

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
