//! Error types shared across the library.
//!
//! Every fallible operation returns [`Result<T>`] with a [`HeqedError`]
//! describing what went wrong in numerical terms (domain violation,
//! divergent quadrature, non-convergent iteration, …) rather than where it
//! happened. Errors carry enough context to reproduce the failing call.

use std::fmt;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, HeqedError>;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum HeqedError {
    /// An argument lies outside the mathematical domain of the operation.
    Domain {
        /// Operation that rejected the argument.
        what: &'static str,
        /// Human-readable description of the violated requirement.
        why: String,
    },
    /// A quadrature failed to settle below its tolerance (typically a
    /// divergent integrand from an unbound trial state).
    QuadratureDivergence {
        /// Integral being evaluated.
        what: &'static str,
        /// Relative change still observed at the refinement cap.
        residual: String,
    },
    /// A bracketing root search was handed endpoints without a sign change.
    NoBracket {
        /// Function being solved.
        what: &'static str,
    },
    /// A fixed-point iteration hit its step cap before meeting its threshold.
    NonConvergence {
        /// Iteration that stalled.
        what: &'static str,
        /// Steps consumed.
        steps: usize,
        /// Last relative change observed.
        last_rel_change: String,
    },
    /// A scaled-coordinate evaluation overflowed the exponential range.
    Overflow {
        /// Operation that overflowed.
        what: &'static str,
    },
    /// Precision request below the supported floor.
    Precision {
        /// Requested decimal digits.
        requested: u32,
        /// Minimum supported decimal digits.
        minimum: u32,
    },
}

impl fmt::Display for HeqedError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeqedError::Domain { what, why } => {
                write!(f, "domain error in {what}: {why}")
            }
            HeqedError::QuadratureDivergence { what, residual } => {
                write!(f, "quadrature for {what} failed to converge (residual {residual})")
            }
            HeqedError::NoBracket { what } => {
                write!(f, "no sign change in bracket while solving {what}")
            }
            HeqedError::NonConvergence { what, steps, last_rel_change } => {
                write!(
                    f,
                    "{what} did not converge after {steps} steps (last relative change {last_rel_change})"
                )
            }
            HeqedError::Overflow { what } => {
                write!(f, "exponential overflow in {what}")
            }
            HeqedError::Precision { requested, minimum } => {
                write!(f, "requested {requested} digits, minimum is {minimum}")
            }
        }
    }
}

impl std::error::Error for HeqedError {}
