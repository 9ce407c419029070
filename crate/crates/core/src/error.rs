use thiserror::Error;

/// Errors raised by the exact and numeric routines in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("level error: {0}")]
    Level(String),
    #[error("invalid automorphism: {d} is not a unit modulo {level}")]
    InvalidAutomorphism { d: i64, level: u64 },
    #[error("denominator error: {0}")]
    Denominator(String),
    #[error("series is not invertible: {0}")]
    NotInvertible(String),
    #[error("vanishing factor: {0}")]
    VanishingFactor(String),
    #[error("index must be reduced: {0}")]
    ReductionRequired(String),
    #[error("invalid index: {0}")]
    InvalidIndex(String),
    #[error("unsupported level: {0}")]
    UnsupportedLevel(String),
    #[error("consistency failure: {0}")]
    Consistency(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
