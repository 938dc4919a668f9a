//! Error type shared by the core numerics.

use alloc::string::String;
use core::fmt;

/// Errors raised by core numerical routines.
///
/// The core crate is `no_std`-compatible, so this is a plain enum with a
/// `Display` impl rather than anything IO-flavoured; the lab crate wraps it.
#[derive(Debug, Clone, PartialEq)]
pub enum CoreError {
    /// A parameter was outside its documented domain.
    InvalidParameter(String),
    /// A grid/field shape did not match what the operation requires.
    ShapeMismatch(String),
    /// An iterative procedure failed to converge to its tolerance.
    NoConvergence(String),
    /// A quadrature could not resolve the requested oscillation.
    UnresolvedOscillation(String),
    /// A search completed without producing a usable result.
    SearchFailed(String),
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::InvalidParameter(m) => write!(f, "invalid parameter: {m}"),
            CoreError::ShapeMismatch(m) => write!(f, "shape mismatch: {m}"),
            CoreError::NoConvergence(m) => write!(f, "no convergence: {m}"),
            CoreError::UnresolvedOscillation(m) => write!(f, "unresolved oscillation: {m}"),
            CoreError::SearchFailed(m) => write!(f, "search failed: {m}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CoreError {}

/// Convenience alias for core results.
pub type CoreResult<T> = core::result::Result<T, CoreError>;
