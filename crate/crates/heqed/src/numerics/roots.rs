//! Bracketed root finding.
//!
//! The solver keeps a guaranteed sign-change bracket [a, b] at every step and
//! alternates a secant proposal with a plain bisection step; any secant point
//! falling outside the open bracket is replaced by the midpoint. This is
//! deterministic (identical inputs give bit-identical results at fixed
//! digits) and converges for any continuous function with g(a)·g(b) < 0.
//! When rounding makes the final sign ambiguous, the midpoint of the last
//! bracket is reported — determinism over heroics.

use rug::ops::CompleteRound;
use rug::Float;

use super::PrecisionContext;
use crate::error::{HeqedError, Result};

/// Outcome of a bracketed root search.
#[derive(Debug, Clone)]
pub struct RootResult {
    /// Location of the sign change.
    pub root: Float,
    /// g(root) at working precision.
    pub residual: Float,
    /// Evaluations of g consumed after the endpoint checks.
    pub iterations: usize,
    /// Final enclosing bracket (lo ≤ root ≤ hi).
    pub bracket: (Float, Float),
}

/// Finds the root of `g` inside [lo, hi], which must straddle a sign change.
pub fn find_root_bracketed<G>(
    mut g: G,
    lo: &Float,
    hi: &Float,
    ctx: &PrecisionContext,
) -> Result<RootResult>
where
    G: FnMut(&Float) -> Float,
{
    let bits = ctx.bits();
    let mut a = Float::with_val(bits, lo);
    let mut b = Float::with_val(bits, hi);
    if a >= b {
        return Err(HeqedError::Domain {
            what: "find_root_bracketed",
            why: format!("bracket endpoints out of order: [{a}, {b}]"),
        });
    }
    let mut fa = g(&a);
    let mut fb = g(&b);
    if !fa.is_finite() || !fb.is_finite() {
        return Err(HeqedError::Domain {
            what: "find_root_bracketed",
            why: "endpoint evaluation is not finite".into(),
        });
    }
    if fa.is_zero() {
        return Ok(RootResult { root: a.clone(), residual: fa, iterations: 0, bracket: (a.clone(), a) });
    }
    if fb.is_zero() {
        return Ok(RootResult { root: b.clone(), residual: fb, iterations: 0, bracket: (b.clone(), b) });
    }
    if fa.is_sign_positive() == fb.is_sign_positive() {
        return Err(HeqedError::NoBracket { what: "find_root_bracketed" });
    }

    let eps = ctx.eps();
    let max_iter = 8 * bits as usize + 64;
    let mut iterations = 0usize;

    while iterations < max_iter {
        // Width-relative stop: the bracket is as tight as the digits allow.
        let width = (&b - &a).complete(bits);
        let scale = a.clone().abs().max(&b.clone().abs()).max(&Float::with_val(bits, 1));
        if width <= scale * &eps {
            // Sign now ambiguous at this precision: prefer the midpoint.
            let root = (&a + &b).complete(bits) >> 1u32;
            let residual = g(&root);
            return Ok(RootResult { root, residual, iterations, bracket: (a, b) });
        }

        let mid = (&a + &b).complete(bits) >> 1u32;
        // Odd iterations bisect unconditionally; even ones try the secant.
        let x = if iterations % 2 == 1 {
            mid
        } else {
            let denom = (&fb - &fa).complete(bits);
            if denom.is_zero() {
                mid
            } else {
                let sec = b.clone() - fb.clone() * (&b - &a).complete(bits) / denom;
                if sec > a && sec < b {
                    sec
                } else {
                    mid
                }
            }
        };

        let fx = g(&x);
        iterations += 1;
        if !fx.is_finite() {
            return Err(HeqedError::Domain {
                what: "find_root_bracketed",
                why: "interior evaluation is not finite".into(),
            });
        }
        if fx.is_zero() {
            return Ok(RootResult {
                root: x.clone(),
                residual: fx,
                iterations,
                bracket: (x.clone(), x),
            });
        }
        if fx.is_sign_positive() == fa.is_sign_positive() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }

    Err(HeqedError::NonConvergence {
        what: "find_root_bracketed",
        steps: iterations,
        last_rel_change: (&b - &a).complete(bits).to_string(),
    })
}
