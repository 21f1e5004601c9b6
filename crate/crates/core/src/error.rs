use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("config: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("polynomial is not holomorphic")]
    NotHolomorphic,

    #[error("graded degree {degree} exceeds limit {limit}")]
    DegreeLimit { degree: usize, limit: usize },

    #[error("maxrank {maxrank} is below graded degree {degree}")]
    RankTooSmall { maxrank: usize, degree: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
