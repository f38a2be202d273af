use alloc::string::String;
use core::fmt;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument left the mathematical domain of the operation
    /// (e.g. `f1'` outside the effective domain of the potential).
    Domain(String),
    /// An iterative solver did not meet its tolerance. Carries the last
    /// residual so the caller can tell a misconfigured tolerance from a
    /// genuine failure.
    Convergence { what: &'static str, residual: f64 },
    /// A configuration value violates an invariant.
    Config(String),
    /// A vector length does not match the basis or grid it is used with.
    Shape { expected: usize, got: usize },
    /// A run required the separation property and the computed trajectory
    /// does not satisfy it.
    Separation(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Convergence { what, residual } => {
                write!(f, "{what} did not converge (residual {residual:e})")
            }
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Shape { expected, got } => {
                write!(f, "shape mismatch: expected length {expected}, got {got}")
            }
            Error::Separation(msg) => write!(f, "separation failure: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
