//! Special functions and probability densities: the hyperbolic sine
//! integral Shi, Laguerre polynomials, the zone Gaussian ξ², and the
//! Laplace/Erlang convolution family with its rescaled large-n limit.
//!
//! Shi is evaluated by two independent hand-written branches:
//!
//! * |x| ≤ 6 — Taylor series Shi(x) = Σₖ x^(2k+1)/((2k+1)·(2k+1)!)
//! * x > 6 — Shi(x) = (Ei(x) + E₁(x))/2 with Ei from its positive power
//!   series γ + ln x + Σₖ x^k/(k·k!) and E₁ from a continued fraction;
//!   E₁ is dropped once its relative weight e^(−2x) falls below the context
//!   tolerance.
//!
//! The branch switch point sits where the series is still cheap while the
//! split form is already accurate; both branches agree on an overlap band, a
//! property the test suite checks explicitly.

use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{HeqedError, Result};
use crate::numerics::{sum_series, PrecisionContext};

/// Series/split-form switch point for Shi.
const SHI_SWITCH: f64 = 6.0;

/// Arguments beyond this cannot be exponentiated at any supported precision.
const SHI_OVERFLOW: f64 = 7.0e8;

/// Modulus limit for the complex Taylor branch: intermediate terms grow like
/// e^|z| before the factorial takes over, so |z| ≤ 30 keeps the transient
/// growth (≈ 10¹¹) far below the working precision.
const SHI_COMPLEX_RANGE: f64 = 30.0;

/// Hyperbolic sine integral Shi(x) = ∫₀ˣ sinh(t)/t dt, odd in x.
pub fn shi(x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if !x.is_finite() {
        return Err(HeqedError::Domain { what: "shi", why: "argument must be finite".into() });
    }
    if x.clone().abs() > SHI_OVERFLOW {
        return Err(HeqedError::Overflow { what: "shi" });
    }
    if x.is_sign_negative() {
        return Ok(-shi(&(-x.clone()), ctx)?);
    }
    if x.is_zero() {
        return Ok(ctx.zero());
    }
    if *x <= SHI_SWITCH {
        shi_series(x, ctx)
    } else {
        shi_split(x, ctx)
    }
}

/// Taylor branch: Σₖ x^(2k+1)/((2k+1)·(2k+1)!), valid everywhere but cheap
/// only for moderate |x|.
pub(crate) fn shi_series(x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let x2 = x.clone().square();
    // power(k) = x^(2k+1)/(2k+1)! updated incrementally; term = power/(2k+1)
    let mut power = x.clone();
    let mut k_state = 0u64;
    sum_series(
        move |k| {
            debug_assert_eq!(k as u64, k_state);
            if k > 0 {
                let two_k = ctx.from_i64(2 * k as i64);
                let two_k1 = ctx.from_i64(2 * k as i64 + 1);
                power *= &x2;
                power /= two_k * two_k1;
            }
            k_state += 1;
            power.clone() / (2 * k as i64 + 1)
        },
        ctx,
    )
}

/// Split branch: Shi(x) = (Ei(x) + E₁(x))/2 for x > 0.
pub(crate) fn shi_split(x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let ei = exp_integral_ei(x, ctx)?;
    // E₁ carries relative weight ~e^(−2x); skip it once that is invisible
    // at the working tolerance.
    let weight = (x.clone() * -2i32).exp();
    let e1 = if weight < ctx.eps() >> 8u32 {
        ctx.zero()
    } else {
        exp_integral_e1(x, ctx)?
    };
    Ok((ei + e1) >> 1u32)
}

/// Ei(x) for x > 0 via the positive-term series γ + ln x + Σₖ x^k/(k·k!).
fn exp_integral_ei(x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let head = ctx.euler_gamma() + x.clone().ln();
    let mut power = ctx.from_i64(1); // x^k/k! updated incrementally
    let tail = sum_series(
        move |k| {
            let k1 = k as i64 + 1;
            power *= x;
            power /= k1;
            // term index k corresponds to the series index k+1
            power.clone() / k1
        },
        ctx,
    )?;
    Ok(head + tail)
}

/// E₁(x) for x > 0 via the continued fraction
/// E₁(x) = e^(−x)/(x + 1 − 1²/(x + 3 − 2²/(x + 5 − …))) (modified Lentz).
fn exp_integral_e1(x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let bits = ctx.bits();
    let tiny = Float::with_val(bits, 1e-300);
    let eps = ctx.eps() >> 8u32;
    let mut b = x.clone() + 1i32;
    let mut c = Float::with_val(bits, 1e300);
    let mut d = b.clone().recip();
    let mut h = d.clone();
    for i in 1..10_000i64 {
        let a = ctx.from_i64(-i * i);
        b += 2i32;
        // d = 1/(b + a·d), c = b + a/c
        d = (a.clone() * d + &b).recip();
        if d.is_zero() {
            d = tiny.clone().recip();
        }
        c = a / c + &b;
        if c.is_zero() {
            c = tiny.clone();
        }
        let delta = d.clone() * &c;
        h *= &delta;
        if (delta - 1i32).abs() < eps {
            return Ok((-x.clone()).exp() * h);
        }
    }
    Err(HeqedError::NonConvergence {
        what: "exponential-integral continued fraction",
        steps: 10_000,
        last_rel_change: "continued fraction stalled".into(),
    })
}

/// |z| for a complex value, as a real Float.
pub(crate) fn complex_modulus(z: &Complex) -> Float {
    (z.real().clone().square() + z.imag().clone().square()).sqrt()
}

/// Shi continued to the complex plane through the same everywhere-convergent
/// Taylor branch Σₖ z^(2k+1)/((2k+1)·(2k+1)!).
///
/// The series is entire, so the continuation is exact; the modulus guard only
/// bounds the transient term growth. Oddness Shi(−z) = −Shi(z) and the
/// reflection rule Shi(z̄) = conj(Shi(z)) hold term by term.
pub fn shi_complex(z: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    let modulus = complex_modulus(z);
    if !modulus.is_finite() || modulus > SHI_COMPLEX_RANGE {
        return Err(HeqedError::Domain {
            what: "shi_complex",
            why: format!("Taylor branch limited to |z| ≤ {SHI_COMPLEX_RANGE}, got |z| = {modulus}"),
        });
    }
    let bits = ctx.bits();
    if modulus.is_zero() {
        return Ok(Complex::with_val(bits, (0, 0)));
    }
    let peak = modulus.to_f64();
    let eps = ctx.eps();
    let z2 = z.clone() * z;
    let mut power = z.clone(); // z^(2k+1)/(2k+1)!
    let mut sum = z.clone(); // k = 0 term
    for k in 1..10_000i64 {
        power *= &z2;
        power /= ctx.from_i64(2 * k) * ctx.from_i64(2 * k + 1);
        let term = power.clone() / ctx.from_i64(2 * k + 1);
        sum += &term;
        // Terms grow until 2k+1 ≈ |z| and decay factorially afterwards; only
        // judge convergence on the decaying side.
        if (2 * k + 1) as f64 > peak
            && complex_modulus(&term) < eps.clone() * complex_modulus(&sum)
        {
            return Ok(sum);
        }
    }
    Err(HeqedError::NonConvergence {
        what: "complex Shi Taylor branch",
        steps: 10_000,
        last_rel_change: "series failed to settle".into(),
    })
}

/// Laguerre polynomial Lₙ(x) = Σ_{k=0}^n C(n,k)·(−1)^k·x^k/k!.
pub fn laguerre(n: u32, x: &Float, ctx: &PrecisionContext) -> Float {
    let mut term = ctx.from_i64(1);
    let mut sum = term.clone();
    for k in 1..=i64::from(n) {
        // term_k = term_{k−1} · (−x) · (n−k+1)/k²
        term *= x;
        term = -term;
        term *= ctx.from_i64(i64::from(n) - k + 1);
        term /= ctx.from_i64(k * k);
        sum += &term;
    }
    sum
}

/// Zone Gaussian: normalized single-zone displacement density.
#[derive(Debug, Clone)]
pub struct ZoneDensity {
    /// Effective interaction length λ, m.
    pub lambda: Float,
    /// Normalization η² = 2/(√π·λ), 1/m.
    pub eta_sq: Float,
}

impl ZoneDensity {
    /// Builds the density for a positive interaction length.
    pub fn new(lambda: Float, ctx: &PrecisionContext) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0 {
            return Err(HeqedError::Domain {
                what: "ZoneDensity::new",
                why: format!("interaction length must be positive, got {lambda}"),
            });
        }
        let eta_sq = ctx.from_i64(2) / (ctx.pi().sqrt() * &lambda);
        Ok(Self { lambda, eta_sq })
    }

    /// ξ²(δ) = η²·e^(−δ²/λ²), 1/m.
    pub fn xi_squared(&self, delta: &Float) -> Float {
        let u = delta.clone() / &self.lambda;
        self.eta_sq.clone() * (-u.square()).exp()
    }
}

/// n-fold Laplace convolution density, exactly as printed:
/// fₙ(x) = |x|^(n−1)·e^(−|x|/λ) / ((2λ)^(n−1)·(n−1)!).
///
/// Note the printed family integrates to λ·2^(2−n) over ℝ (λ/2^(n−1) over
/// (0,∞)), not to 1; downstream code only uses the rescaled n→∞ limit, which
/// carries its own normalization.
pub fn erlang_density(n: u32, x: &Float, lambda: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if n < 1 {
        return Err(HeqedError::Domain { what: "erlang_density", why: "order must be ≥ 1".into() });
    }
    if !lambda.is_finite() || *lambda <= 0 {
        return Err(HeqedError::Domain {
            what: "erlang_density",
            why: format!("interaction length must be positive, got {lambda}"),
        });
    }
    let ax = x.clone().abs();
    // |x|^(n−1)/(2λ)^(n−1) computed as a single power of the ratio so that
    // huge n stays inside the exponent range symmetrically.
    let ratio_pow = if n == 1 {
        ctx.from_i64(1)
    } else {
        let base = ax.clone() / (lambda.clone() * 2i32);
        base.pow(n - 1)
    };
    let decay = (-(ax / lambda)).exp();
    Ok(ratio_pow * decay / ctx.factorial(n - 1))
}

/// Rescaled zone density ξₙ²(δ) = √(4n)·fₙ(δ·√(4n)): the family whose n→∞
/// member is the zone Gaussian (central-limit shape).
pub fn rescaled_zone_limit(
    n: u32,
    delta: &Float,
    lambda: &Float,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let s = ctx.from_i64(4 * i64::from(n)).sqrt();
    let scaled = delta.clone() * &s;
    Ok(erlang_density(n, &scaled, lambda, ctx)? * s)
}
