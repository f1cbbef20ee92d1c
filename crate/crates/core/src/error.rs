use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed path data.
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    /// A strategy broke its declared contract (e.g. a portfolio exceeded its bound).
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// Reality played a move outside `[-c, c]`.
    #[error("protocol violation in round {round}: move {value} outside [-{bound}, {bound}]")]
    Protocol { round: usize, value: f64, bound: f64 },

    /// The parameter schedule of the increase detector cannot be realised.
    #[error("schedule error: {0}")]
    Schedule(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
