use thiserror::Error;

/// Errors raised across the crate. Variants mirror the failure modes of the
/// individual operations so callers can match on the precise cause.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid constants: {0}")]
    InvalidConstants(String),

    #[error("non-finite input: {0}")]
    NonFiniteInput(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("objective has no known minimizer")]
    MissingMinimizer,

    #[error("rate undefined: {0}")]
    UndefinedRate(String),

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("one-line recurrence undefined for n = 0")]
    DegenerateOneLine,

    #[error("inadmissible parameter map: {0}")]
    InadmissibleMap(String),

    #[error("invalid optimizer history: {0}")]
    InvalidHistory(String),

    #[error("step-size conditions violated: {0}")]
    ConditionViolation(String),

    #[error("insufficient grid: {0}")]
    InsufficientGrid(String),

    #[error("cannot fit rate: {0}")]
    CannotFit(String),

    #[error("reference and trajectory do not match: {0}")]
    InvalidPairing(String),

    #[error("divergence: {0}")]
    Divergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
