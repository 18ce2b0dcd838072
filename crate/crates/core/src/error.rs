use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Every variant names the operation that failed so that batch drivers can
/// report it without extra context.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{op}: invalid input: {msg}")]
    InvalidInput { op: &'static str, msg: String },

    #[error("{op}: eigensolver did not converge (residual {residual:.3e})")]
    NoConvergence { op: &'static str, residual: f64 },

    #[error("{op}: matrix is not positive definite (pivot {pivot} = {value:.3e})")]
    NotPositiveDefinite { op: &'static str, pivot: usize, value: f64 },

    #[error("{op}: {msg}")]
    CheckFailed { op: &'static str, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(op: &'static str, msg: impl Into<String>) -> Error {
    Error::InvalidInput { op, msg: msg.into() }
}

pub(crate) fn check_failed(op: &'static str, msg: impl Into<String>) -> Error {
    Error::CheckFailed { op, msg: msg.into() }
}
