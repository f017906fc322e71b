//! Tolerance-controlled series summation.
//!
//! Sums Σₖ term(k) for series whose terms are eventually monotone-decreasing
//! in magnitude, stopping once the next-term bound drops below the context
//! tolerance. Summation order is the index order, so results are
//! deterministic at fixed digits.

use rug::Float;

use super::PrecisionContext;
use crate::error::{HeqedError, Result};

/// Terms consumed before giving up on convergence.
const MAX_TERMS: usize = 100_000;

/// Partial sum of Σₖ₌₀ term(k) with a next-term bound below `eps/2` relative
/// to the accumulated sum. Two consecutive sub-tolerance terms are required,
/// so series with interleaved zero terms are not truncated early.
pub fn sum_series<T>(mut term: T, ctx: &PrecisionContext) -> Result<Float>
where
    T: FnMut(usize) -> Float,
{
    let eps = ctx.eps();
    let mut sum = ctx.zero();
    let mut small_streak = 0usize;
    for k in 0..MAX_TERMS {
        let t = term(k);
        if !t.is_finite() {
            return Err(HeqedError::QuadratureDivergence {
                what: "series term",
                residual: format!("non-finite term at index {k}"),
            });
        }
        sum += &t;
        let scale = sum.clone().abs().max(&Float::with_val(ctx.bits(), 1e-30));
        if t.abs() <= scale * &eps >> 1u32 {
            small_streak += 1;
            if small_streak >= 2 {
                return Ok(sum);
            }
        } else {
            small_streak = 0;
        }
    }
    Err(HeqedError::QuadratureDivergence {
        what: "series summation",
        residual: format!("no convergence within {MAX_TERMS} terms"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorial_reciprocals_sum_to_e() {
        let ctx = PrecisionContext::default();
        let s = sum_series(|k| ctx.from_i64(1) / ctx.factorial(k as u32), &ctx).unwrap();
        let e = ctx.from_i64(1).exp();
        assert!(ctx.rel_diff(&s, &e) < ctx.eps());
    }

    #[test]
    fn geometric_halves_sum_to_two() {
        let ctx = PrecisionContext::default();
        let s = sum_series(|k| ctx.from_i64(1) >> (k as u32), &ctx).unwrap();
        assert!(ctx.rel_diff(&s, &ctx.from_i64(2)) < ctx.eps());
    }
}
