use thiserror::Error;

/// Errors produced by tgalab.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("index {index} exceeds the capacity of the space ({capacity})")]
    IndexOutOfRange { index: usize, capacity: usize },

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("coordinate descent did not converge after {sweeps} sweeps (best value {best})")]
    NonConvergence { sweeps: usize, best: f64 },

    /// Two routes that must agree produced different answers.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("unknown check `{id}`; catalog: {catalog}")]
    UnknownCheck { id: String, catalog: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
