//! Precision management and the numerical kernels shared by every module:
//! adaptive semi-infinite quadrature, bracketed root finding, and
//! tolerance-controlled series summation.
//!
//! All arithmetic is arbitrary-precision (MPFR via `rug`). A
//! [`PrecisionContext`] fixes the working decimal-digit count `D` and derives
//! every tolerance from it:
//!
//! * `eps = 10^(2−D)` — the general convergence tolerance,
//! * `quad_rel_tol = quad_abs_tol = 10·eps` — quadrature targets.
//!
//! Doubling `D` must never move an already-converged result by more than
//! `10^(2−D)` relative — this invariant is exercised by the acceptance suite.

pub mod quad;
pub mod roots;
pub mod series;

pub use quad::{
    decay_cutoff, integrate_many_finite, integrate_many_semi_infinite, integrate_semi_infinite,
    integrate_semi_infinite_with,
};
pub use roots::{find_root_bracketed, RootResult};
pub use series::sum_series;

use crate::error::{HeqedError, Result};
use rug::float::Constant;
use rug::ops::CompleteRound;
use rug::Float;

/// Minimum supported decimal digit count.
pub const MIN_DIGITS: u32 = 16;

/// Default decimal digit count when none is configured.
pub const DEFAULT_DIGITS: u32 = 50;

/// Guard bits added on top of the decimal-digit request so that intermediate
/// rounding never eats into the promised significant digits.
const GUARD_BITS: u32 = 32;

/// Working precision: decimal digits plus the derived binary precision and
/// tolerance family used by every numerical routine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecisionContext {
    digits: u32,
    bits: u32,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::new(DEFAULT_DIGITS).expect("default digit count is above the floor")
    }
}

impl PrecisionContext {
    /// Creates a context carrying at least `digits` significant decimal
    /// digits through every arithmetic result.
    pub fn new(digits: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(HeqedError::Precision { requested: digits, minimum: MIN_DIGITS });
        }
        // bits ≥ digits·log₂10, plus guard bits for intermediate rounding.
        let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS;
        Ok(Self { digits, bits })
    }

    /// Decimal digits carried by this context.
    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Binary precision backing the decimal request.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// A context with twice the decimal digits (used by stability checks).
    pub fn doubled(&self) -> Self {
        Self::new(self.digits * 2).expect("doubling keeps digits above the floor")
    }

    /// General convergence tolerance `10^(2−digits)`.
    pub fn eps(&self) -> Float {
        self.parse(&format!("1e{}", 2i64 - i64::from(self.digits)))
    }

    /// Relative quadrature target (`10·eps`).
    pub fn quad_rel_tol(&self) -> Float {
        self.eps() * 10
    }

    /// Absolute quadrature target (`10·eps`).
    pub fn quad_abs_tol(&self) -> Float {
        self.eps() * 10
    }

    /// Zero at working precision.
    pub fn zero(&self) -> Float {
        Float::new(self.bits)
    }

    /// Integer promoted to working precision.
    pub fn from_i64(&self, v: i64) -> Float {
        Float::with_val(self.bits, v)
    }

    /// Parses a decimal literal at working precision. Panics on malformed
    /// input: literals are compiled into the crate, so a parse failure is a
    /// programming error, not a runtime condition.
    pub fn parse(&self, literal: &str) -> Float {
        Float::with_val(
            self.bits,
            Float::parse(literal).unwrap_or_else(|_| panic!("bad numeric literal {literal:?}")),
        )
    }

    /// π at working precision.
    pub fn pi(&self) -> Float {
        Float::with_val(self.bits, Constant::Pi)
    }

    /// Euler–Mascheroni γ at working precision.
    pub fn euler_gamma(&self) -> Float {
        Float::with_val(self.bits, Constant::Euler)
    }

    /// n! at working precision.
    pub fn factorial(&self, n: u32) -> Float {
        Float::factorial(n).complete(self.bits)
    }

    /// Relative difference |a−b| / max(|b|, floor) at working precision.
    pub fn rel_diff(&self, a: &Float, b: &Float) -> Float {
        let num = (a - b).complete(self.bits).abs();
        let den = b.clone().abs().max(&self.parse("1e-300"));
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_floor_is_enforced() {
        assert!(matches!(
            PrecisionContext::new(8),
            Err(HeqedError::Precision { requested: 8, minimum: MIN_DIGITS })
        ));
        assert!(PrecisionContext::new(MIN_DIGITS).is_ok());
    }

    #[test]
    fn eps_matches_digit_count() {
        let ctx = PrecisionContext::new(50).unwrap();
        let expected = ctx.parse("1e-48");
        assert_eq!(ctx.eps(), expected);
        assert!(ctx.quad_rel_tol() > ctx.eps());
    }

    #[test]
    fn parse_round_trips_decimal_literals() {
        let ctx = PrecisionContext::default();
        let x = ctx.parse("8.8541878128e-12");
        let s = x.to_string_radix(10, Some(11));
        assert!(s.starts_with("8.8541878128"), "{s}");
    }

    #[test]
    fn doubled_context_doubles_digits() {
        let ctx = PrecisionContext::new(50).unwrap();
        assert_eq!(ctx.doubled().digits(), 100);
    }
}
