//! Adaptive semi-infinite quadrature.
//!
//! Integrals over (0, ∞) are mapped to the unit interval by the exponential
//! substitution
//!
//! ```text
//! x = a − s·ln(1 − t),   dx = s/(1 − t) dt,
//! ```
//!
//! chosen because every integrand in this library decays like `x^k·e^(−c·x)`
//! or like a Gaussian; with `s` matched to the decay rate the transformed
//! integrand is smooth up to a logarithmic endpoint factor. The unit interval
//! is then integrated by globally adaptive bisection with a fixed-order
//! Gauss–Legendre rule per panel: the panel with the worst error estimate is
//! split until the summed estimates meet the context tolerances. Panel
//! traversal, node order, and summation order are all fixed, so identical
//! inputs produce bit-identical results.
//!
//! A vector-valued entry point integrates several components in one pass so
//! that expensive shared state (wavefunction values and derivatives) is
//! evaluated once per node.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::ops::CompleteRound;
use rug::Float;

use super::PrecisionContext;
use crate::error::{HeqedError, Result};

/// Fixed Gauss–Legendre order per panel.
const GL_ORDER: usize = 32;

/// Panels forced before the first convergence check (2^3 = 8 panels).
const MIN_SPLITS: usize = 7;

/// Hard cap on panel splits before declaring divergence.
const MAX_SPLITS: usize = 6000;

type NodeTable = Arc<(Vec<Float>, Vec<Float>)>;

/// Gauss–Legendre nodes and weights on (−1, 1), cached per (bits, order).
fn gl_nodes(bits: u32, order: usize) -> NodeTable {
    static CACHE: OnceLock<Mutex<HashMap<(u32, usize), NodeTable>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&(bits, order)) {
        return hit.clone();
    }
    let fresh = compute_gl(bits, order);
    cache
        .lock()
        .unwrap()
        .entry((bits, order))
        .or_insert(fresh)
        .clone()
}

/// Legendre Pₙ and Pₙ′ by the three-term recurrence.
fn legendre_pd(n: usize, x: &Float, bits: u32) -> (Float, Float) {
    let mut p_prev = Float::with_val(bits, 1);
    let mut p = x.clone();
    for k in 1..n {
        let k_i = k as i64;
        let next = (x.clone() * &p * (2 * k_i + 1) - p_prev.clone() * k_i) / (k_i + 1);
        p_prev = p;
        p = next;
    }
    // Pₙ′(x) = n·(x·Pₙ − Pₙ₋₁)/(x² − 1)
    let num = x.clone() * &p - &p_prev;
    let den = x.clone().square() - 1i32;
    let dp = num * (n as i64) / den;
    (p, dp)
}

/// Newton-on-Legendre node solve from cosine initial guesses.
fn compute_gl(bits: u32, order: usize) -> NodeTable {
    let work = bits + 16;
    let pi = Float::with_val(work, Constant::Pi);
    let tol = Float::with_val(work, 1) >> (work - 4);
    let mut nodes = Vec::with_capacity(order);
    let mut weights = Vec::with_capacity(order);
    for i in 0..order {
        let theta = pi.clone() * (i as f64 + 0.75) / (order as f64 + 0.5);
        let mut x = theta.cos();
        for _ in 0..200 {
            let (p, dp) = legendre_pd(order, &x, work);
            let step = p / dp;
            let done = step.clone().abs() <= tol;
            x -= step;
            if done {
                break;
            }
        }
        let (_, dp) = legendre_pd(order, &x, work);
        // w = 2 / ((1 − x²)·Pₙ′(x)²)
        let w = Float::with_val(work, 2) / ((1i32 - x.clone().square()) * dp.square());
        nodes.push(Float::with_val(bits, &x));
        weights.push(Float::with_val(bits, &w));
    }
    Arc::new((nodes, weights))
}

/// One fixed-order panel over [a, b] for a vector integrand; deterministic
/// node order and summation order.
fn panel_many<F>(
    f: &mut F,
    a: &Float,
    b: &Float,
    table: &NodeTable,
    bits: u32,
    k: usize,
) -> Result<Vec<Float>>
where
    F: FnMut(&Float) -> Vec<Float>,
{
    let half = (b - a).complete(bits) >> 1u32;
    let mid = (a + b).complete(bits) >> 1u32;
    let mut acc = vec![Float::new(bits); k];
    for (x, w) in table.0.iter().zip(table.1.iter()) {
        let t = mid.clone() + half.clone() * x;
        let vals = f(&t);
        debug_assert_eq!(vals.len(), k, "integrand arity changed mid-quadrature");
        for (slot, v) in acc.iter_mut().zip(vals) {
            if !v.is_finite() {
                return Err(HeqedError::QuadratureDivergence {
                    what: "unit-interval panel",
                    residual: "non-finite integrand sample".into(),
                });
            }
            *slot += v * w;
        }
    }
    for slot in &mut acc {
        *slot *= &half;
    }
    Ok(acc)
}

/// A bisection-tree leaf: its own coarse estimate, the refined two-half
/// estimate actually accumulated, and the per-component defect between them.
struct Panel {
    a: Float,
    b: Float,
    refined: Vec<Float>,
    defect: Vec<Float>,
}

/// Globally adaptive vector quadrature over the unit interval.
fn integrate_01_many<F>(mut f: F, k: usize, ctx: &PrecisionContext) -> Result<Vec<Float>>
where
    F: FnMut(&Float) -> Vec<Float>,
{
    let bits = ctx.bits();
    let table = gl_nodes(bits, GL_ORDER);
    let rel = ctx.quad_rel_tol();
    let abs = ctx.quad_abs_tol();

    let make_panel = |f: &mut F, a: Float, b: Float| -> Result<Panel> {
        let est = panel_many(f, &a, &b, &table, bits, k)?;
        let mid = (&a + &b).complete(bits) >> 1u32;
        let left = panel_many(f, &a, &mid, &table, bits, k)?;
        let right = panel_many(f, &mid, &b, &table, bits, k)?;
        let mut refined = Vec::with_capacity(k);
        let mut defect = Vec::with_capacity(k);
        for j in 0..k {
            let sum = left[j].clone() + &right[j];
            defect.push((est[j].clone() - &sum).abs());
            refined.push(sum);
        }
        Ok(Panel { a, b, refined, defect })
    };

    let mut panels =
        vec![make_panel(&mut f, Float::with_val(bits, 0), Float::with_val(bits, 1))?];
    let mut splits = 0usize;

    loop {
        // Current totals and per-component tolerances τ_j = rel·|I_j| + abs.
        let mut totals = vec![Float::new(bits); k];
        let mut errors = vec![Float::new(bits); k];
        for p in &panels {
            for j in 0..k {
                totals[j] += &p.refined[j];
                errors[j] += &p.defect[j];
            }
        }
        // Accept at a quarter of the promised tolerance: the defect sum is an
        // estimate, and the safety factor keeps the realized error inside the
        // contract bound rel·|I| + abs with room to spare.
        let tau: Vec<Float> = totals
            .iter()
            .map(|t| (t.clone().abs() * &rel + &abs) >> 2u32)
            .collect();

        let converged = errors.iter().zip(&tau).all(|(e, t)| e <= t);
        if converged && splits >= MIN_SPLITS {
            return Ok(totals);
        }
        if splits >= MAX_SPLITS {
            let worst = errors
                .iter()
                .zip(&tau)
                .map(|(e, t)| (e.clone() / t).to_f64())
                .fold(f64::NEG_INFINITY, f64::max);
            return Err(HeqedError::QuadratureDivergence {
                what: "unit-interval adaptive bisection",
                residual: format!("error/tolerance ratio {worst:.3e} at split cap"),
            });
        }

        // Split the panel with the worst normalized defect (leftmost on ties).
        let mut worst_idx = 0usize;
        let mut worst_score = Float::with_val(bits, -1);
        for (idx, p) in panels.iter().enumerate() {
            let mut score = Float::new(bits);
            for j in 0..k {
                let s = p.defect[j].clone() / &tau[j];
                if s > score {
                    score = s;
                }
            }
            if score > worst_score {
                worst_score = score;
                worst_idx = idx;
            }
        }

        let Panel { a, b, .. } = panels.remove(worst_idx);
        let mid = (&a + &b).complete(bits) >> 1u32;
        let left = make_panel(&mut f, a, mid.clone())?;
        let right = make_panel(&mut f, mid, b)?;
        panels.insert(worst_idx, right);
        panels.insert(worst_idx, left);
        splits += 1;
    }
}

/// Applies the exponential substitution x = offset − scale·ln(1−t) to a
/// vector integrand over (offset, ∞), producing a unit-interval integrand.
fn map_semi_infinite<F>(
    mut f: F,
    offset: f64,
    scale: f64,
    bits: u32,
) -> impl FnMut(&Float) -> Vec<Float>
where
    F: FnMut(&Float) -> Vec<Float>,
{
    move |t: &Float| {
        let one_minus = (1i32 - t).complete(bits);
        let x = one_minus.clone().ln() * (-scale) + offset;
        let jacobian = Float::with_val(bits, scale) / one_minus;
        let mut vals = f(&x);
        for v in &mut vals {
            *v *= &jacobian;
        }
        vals
    }
}

/// Smallest x beyond which e^(−rate·x) is invisible at the context
/// tolerance even after polynomial amplification: a truncation point for
/// integrands with a guaranteed exponential envelope.
pub fn decay_cutoff(rate: f64, ctx: &PrecisionContext) -> f64 {
    assert!(rate.is_finite() && rate > 0.0, "decay rate must be positive");
    (f64::from(ctx.digits()) + 12.0) * std::f64::consts::LN_10 / rate
}

/// ∫_a^b f(x) dx for several components sharing one evaluation pass.
///
/// The affine map keeps an analytic integrand analytic on the unit interval,
/// so the fixed-order panels converge spectrally — much faster than pushing
/// an exponential tail substitution to the same tolerance. Use together with
/// [`decay_cutoff`] when the integrand has a known decay envelope.
pub fn integrate_many_finite<F>(
    f: F,
    k: usize,
    a: f64,
    b: f64,
    ctx: &PrecisionContext,
) -> Result<Vec<Float>>
where
    F: FnMut(&Float) -> Vec<Float>,
{
    assert!(a.is_finite() && b.is_finite() && a < b, "interval must be finite and ordered");
    integrate_01_many(map_finite(f, a, b, ctx.bits()), k, ctx)
}

/// Applies the affine substitution x = a + (b−a)·t to a vector integrand
/// over [a, b], producing a unit-interval integrand.
fn map_finite<F>(mut f: F, a: f64, b: f64, bits: u32) -> impl FnMut(&Float) -> Vec<Float>
where
    F: FnMut(&Float) -> Vec<Float>,
{
    move |t: &Float| {
        let width = Float::with_val(bits, b - a);
        let x = width.clone() * t + a;
        let mut vals = f(&x);
        for v in &mut vals {
            *v *= &width;
        }
        vals
    }
}

/// ∫₀^∞ f(x) dx for several components sharing one evaluation pass.
///
/// `scale` tunes the substitution to the integrand's decay: use `1/c` for
/// tails like `e^(−c·x)`. Components converge jointly; each gets its own
/// relative/absolute tolerance from `ctx`.
pub fn integrate_many_semi_infinite<F>(
    f: F,
    k: usize,
    scale: f64,
    ctx: &PrecisionContext,
) -> Result<Vec<Float>>
where
    F: FnMut(&Float) -> Vec<Float>,
{
    assert!(scale.is_finite() && scale > 0.0, "substitution scale must be positive");
    integrate_01_many(map_semi_infinite(f, 0.0, scale, ctx.bits()), k, ctx)
}

/// ∫_offset^∞ f(x) dx with a configurable substitution scale.
pub fn integrate_semi_infinite_with<F>(
    mut f: F,
    offset: f64,
    scale: f64,
    ctx: &PrecisionContext,
) -> Result<Float>
where
    F: FnMut(&Float) -> Float,
{
    assert!(offset.is_finite(), "offset must be finite");
    assert!(scale.is_finite() && scale > 0.0, "substitution scale must be positive");
    let wrapped = move |x: &Float| vec![f(x)];
    let mut out = integrate_01_many(map_semi_infinite(wrapped, offset, scale, ctx.bits()), 1, ctx)?;
    Ok(out.pop().expect("single-component quadrature"))
}

/// ∫₀^∞ f(x) dx with the default substitution scale.
pub fn integrate_semi_infinite<F>(f: F, ctx: &PrecisionContext) -> Result<Float>
where
    F: FnMut(&Float) -> Float,
{
    integrate_semi_infinite_with(f, 0.0, 1.0, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    /// Contract bound for a value of magnitude |target|.
    fn tol(ctx: &PrecisionContext, target: f64) -> rug::Float {
        ctx.quad_rel_tol() * target.abs() + ctx.quad_abs_tol()
    }

    #[test]
    fn exponential_tail_integrates_to_one() {
        let ctx = ctx();
        let i = integrate_semi_infinite(|x| (-x.clone()).exp(), &ctx).unwrap();
        let err = (i - 1i32).abs();
        assert!(err < tol(&ctx, 1.0), "err {err}");
    }

    #[test]
    fn gaussian_half_integral_matches_sqrt_pi_over_two() {
        let ctx = ctx();
        let i = integrate_semi_infinite(|x| (-x.clone().square()).exp(), &ctx).unwrap();
        let target = ctx.pi().sqrt() >> 1u32;
        let err = (i - target).abs();
        assert!(err < tol(&ctx, 0.887), "err {err}");
    }

    #[test]
    fn gamma_moment_with_matched_scale() {
        // ∫ x²e^(−2x) dx = Γ(3)/2³ = 1/4, decay rate 2 → scale 0.5
        let ctx = ctx();
        let i = integrate_semi_infinite_with(
            |x| x.clone().square() * (x.clone() * -2i32).exp(),
            0.0,
            0.5,
            &ctx,
        )
        .unwrap();
        let err = (i - 0.25f64).abs();
        assert!(err < tol(&ctx, 0.25), "err {err}");
    }

    #[test]
    fn offset_domain_starts_at_one() {
        // ∫₁^∞ e^(−x) dx = e^(−1)
        let ctx = ctx();
        let i = integrate_semi_infinite_with(|x| (-x.clone()).exp(), 1.0, 1.0, &ctx).unwrap();
        let target = (-ctx.from_i64(1)).exp();
        let err = (i - target).abs();
        assert!(err < tol(&ctx, 0.37), "err {err}");
    }

    #[test]
    fn finite_interval_matches_closed_forms() {
        // ∫₁³ x³ dx = 20 exactly; an affine map keeps polynomials exact.
        let ctx = ctx();
        let out = integrate_many_finite(
            |x| vec![x.clone().square() * x],
            1,
            1.0,
            3.0,
            &ctx,
        )
        .unwrap();
        let err = (out[0].clone() - 20i32).abs();
        assert!(err < tol(&ctx, 20.0), "err {err}");
    }

    #[test]
    fn decay_cutoff_truncation_is_below_tolerance() {
        // Truncating ∫ x²e^(−2x) dx at the advertised cutoff must reproduce
        // the full half-line value 1/4 within the context tolerance.
        let ctx = ctx();
        let cut = decay_cutoff(2.0, &ctx);
        let i = integrate_many_finite(
            |x| vec![x.clone().square() * (x.clone() * -2i32).exp()],
            1,
            0.0,
            cut,
            &ctx,
        )
        .unwrap();
        let err = (i[0].clone() - 0.25f64).abs();
        assert!(err < tol(&ctx, 0.25), "err {err}");
    }

    #[test]
    fn vector_components_share_one_pass() {
        let ctx = ctx();
        let out = integrate_many_semi_infinite(
            |x| {
                let e = (-x.clone()).exp();
                vec![e.clone(), e * x]
            },
            2,
            1.0,
            &ctx,
        )
        .unwrap();
        assert!((out[0].clone() - 1i32).abs() < tol(&ctx, 1.0));
        assert!((out[1].clone() - 1i32).abs() < tol(&ctx, 1.0));
    }

    #[test]
    fn identical_invocations_are_bit_identical() {
        let ctx = ctx();
        let a = integrate_semi_infinite(|x| (-x.clone().square()).exp(), &ctx).unwrap();
        let b = integrate_semi_infinite(|x| (-x.clone().square()).exp(), &ctx).unwrap();
        assert_eq!(a, b);
    }
}
