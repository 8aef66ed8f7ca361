//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// A path or state constraint was violated during simulation.
    #[error("constraint violated: {0}")]
    Constraint(String),

    /// A configuration value is inconsistent or unparseable.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The optimal-control solver failed to meet its tolerances.
    #[error("solver: {0}")]
    Solver(String),

    /// A computed quantity became non-finite.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

impl Error {
    pub fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }
}
