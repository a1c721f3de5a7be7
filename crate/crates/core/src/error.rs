use thiserror::Error;

/// Errors produced anywhere in the toolkit.
///
/// The variants are grouped by how a caller is expected to react: invalid
/// input (fix the arguments), inconclusive evaluation (raise the precision
/// cap), and search exhaustion (raise the depth or cap).
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("infinite measure: set has an unbounded part")]
    InfiniteMeasure,
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("negative depth {0}")]
    NegativeDepth(i64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("inconclusive at precision cap of {cap} bits: {what}")]
    Inconclusive { what: String, cap: u32 },
    #[error("horizon shortfall: {0}")]
    HorizonShortfall(String),
    #[error("insufficient depth: {0}")]
    InsufficientDepth(String),
    #[error("cover not found at cap: {0}")]
    CoverNotFound(String),
    #[error("schedule violation: {0}")]
    Schedule(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("certificate rejected: {0}")]
    Certificate(String),
}

impl Error {
    pub fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
