use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("weight overflow: {0}")]
    Overflow(String),

    #[error("negative weight {value} at ({row}, {col})")]
    NegativeWeight { row: usize, col: usize, value: i64 },

    #[error("index {index} out of range (size {size})")]
    OutOfRange { index: usize, size: usize },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "monomial budget exceeded: expansion bound {bound} (log2 budget {log2_budget:.2}) is above cap {cap}"
    )]
    BudgetExceeded {
        bound: u128,
        log2_budget: f64,
        cap: u128,
    },

    #[error("structured matrix pattern violation at ({row}, {col})")]
    PatternViolation { row: usize, col: usize },

    #[error("singular Vandermonde minor")]
    SingularMinor,
}

pub type Result<T> = std::result::Result<T, Error>;
