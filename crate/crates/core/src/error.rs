use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rejection cost must lie strictly inside (0, 0.5), got {0}")]
    InvalidCost(f64),

    #[error("label {value} is outside 1..={classes}")]
    InvalidLabel { value: usize, classes: usize },

    #[error("need at least {0} classes")]
    TooFewClasses(usize),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not a probability simplex: {0}")]
    InvalidSimplex(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("value {0} is outside the domain of the transform")]
    OutOfDomain(f64),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("unknown identifier `{0}`")]
    UnknownId(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
