use thiserror::Error;

/// Errors produced anywhere in the construction pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("division by zero")]
    DivisionByZero,

    #[error("zero divisor encountered: the presented ring is not a domain (is the minimal polynomial reducible?)")]
    ZeroDivisor,

    #[error("degenerate point pair: a line needs two distinct points")]
    DegeneratePair,

    #[error("duplicate point at index {0}")]
    DuplicatePoint(usize),

    #[error("r = {r} is too large for this cell: {detail}; use a smaller r or a larger c1")]
    RTooLarge { r: u64, detail: String },

    #[error("auto-tuning of c1 failed after {steps} halvings: {detail}")]
    TuningFailed { steps: u32, detail: String },

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("fit undefined: {0}")]
    FitUndefined(String),

    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
