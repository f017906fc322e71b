//! Transcendental radial wavefunction family
//!
//!   R(x) = (n−1)!·L_{n−1}(x)·sinh(x) / (x·(1 + c·Shi(x))²),   c = A/α₀,
//!
//! in the scaled coordinate x = α₀·z, together with its damping constant
//! α₀ = n·√(f_E·C_C − B·E), closed-form derivatives, normalization
//! f_N = 1/∫₀^∞ x²R² dx, radial probability densities, the large-x envelope
//! R/(x·e^(−x)) → 2/c², and a complex continuation used by the structural
//! holomorphy checks.
//!
//! Everything here is a pure function of an immutable [`HeState`]; all
//! integrals run in the scaled coordinate and dimensional prefactors are
//! reattached analytically.

use rug::{Complex, Float};

use crate::constants::DerivedConstants;
use crate::error::{HeqedError, Result};
use crate::numerics::{decay_cutoff, integrate_many_finite, PrecisionContext};
use crate::special::{complex_modulus, shi, shi_complex};

/// Series/closed-form switch for sinh(x)/x and its derivatives: below this
/// the subtractive closed forms lose digits, while the even Taylor series
/// converges in a handful of terms.
const SINH_RATIO_SWITCH: f64 = 0.25;

/// Decay rate of x²R² (≈ e^(−2x)); sets the normalization truncation point.
const NORM_DECAY_RATE: f64 = 2.0;

/// One bound electron state of the two-electron model.
///
/// Invariants: `alpha0` = n·√(f_E·C_C − B·E) with a positive radicand, and
/// ∫₀^∞ x²R² dx = 1/f_N in the scaled coordinate x = α₀·z.
#[derive(Debug, Clone)]
pub struct HeState {
    /// Principal index n ∈ {1, 2, 3}.
    pub n: u32,
    /// State energy, J (negative for bound states).
    pub energy: Float,
    /// Spatial damping constant α₀, 1/m.
    pub alpha0: Float,
    /// Normalization 1/∫x²R²dx in the scaled coordinate, dimensionless.
    pub f_n: Float,
    /// Electron–zone coupling factor, dimensionless.
    pub f_e: Float,
    /// Effective interaction length λ, m.
    pub lambda: Float,
}

impl HeState {
    /// Assembles a state from (n, E, f_E, λ): α₀ from the radicand and f_N
    /// from the normalization quadrature.
    pub fn new(
        n: u32,
        energy: Float,
        f_e: Float,
        lambda: Float,
        dc: &DerivedConstants,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        let alpha0 = alpha0_of(n, &energy, &f_e, dc)?;
        let c = dc.a.clone() / &alpha0;
        let f_n = normalize(n, &c, ctx)?;
        Ok(Self { n, energy, alpha0, f_n, f_e, lambda })
    }

    /// Denominator coefficient c = A/α₀ multiplying Shi(x), dimensionless.
    pub fn shi_coefficient(&self, dc: &DerivedConstants) -> Float {
        dc.a.clone() / &self.alpha0
    }
}

/// Damping constant α₀ = n·√(f_E·C_C − B·E), 1/m.
///
/// Errors when the radicand is not positive (the state would not be bound)
/// or the index is outside the supported shells.
pub fn alpha0_of(n: u32, energy: &Float, f_e: &Float, dc: &DerivedConstants) -> Result<Float> {
    check_index(n, "alpha0_of")?;
    let radicand = f_e.clone() * &dc.c_c - dc.b.clone() * energy;
    if !radicand.is_finite() || radicand.cmp0() != Some(std::cmp::Ordering::Greater) {
        return Err(HeqedError::Domain {
            what: "alpha0_of",
            why: format!("radicand f_E·C_C − B·E must be positive, got {radicand}"),
        });
    }
    Ok(radicand.sqrt() * n)
}

/// Unnormalized radial shape R(x) = (n−1)!·L_{n−1}(x)·sinh(x)/(x·(1+c·Shi(x))²)
/// with the x→0 limit taken analytically (sinh(x)/x → 1, Shi(0) = 0).
pub fn radial_r(n: u32, x: &Float, shi_coeff: &Float, ctx: &PrecisionContext) -> Result<Float> {
    check_scaled_radius(x, "radial_r")?;
    let (p, _, _) = spectral_polynomial(n, x, ctx)?;
    let (s, _, _) = sinh_ratio_derivs(x, ctx);
    let den = denominator(x, shi_coeff, ctx)?;
    let r = p * s / den.square();
    if !r.is_finite() {
        return Err(HeqedError::Overflow { what: "radial_r" });
    }
    Ok(r)
}

/// Closed-form first and second derivatives of [`radial_r`] with respect to
/// the scaled coordinate.
///
/// With N = P·s (s = sinh x/x) and D = 1 + c·Shi — so D′ = c·s, D″ = c·s′ —
///
///   R′ = N′/D² − 2N·D′/D³,
///   R″ = N″/D² − (4N′D′ + 2N·D″)/D³ + 6N·D′²/D⁴.
pub fn radial_derivatives(
    n: u32,
    x: &Float,
    shi_coeff: &Float,
    ctx: &PrecisionContext,
) -> Result<(Float, Float)> {
    let (_, r1, r2) = radial_with_derivatives(n, x, shi_coeff, ctx)?;
    Ok((r1, r2))
}

/// R, R′ and R″ in a single pass — one Shi evaluation per point instead of
/// the two a [`radial_r`] + [`radial_derivatives`] pair would spend. This is
/// the evaluator the level integrals iterate, so the shared pass matters.
pub fn radial_with_derivatives(
    n: u32,
    x: &Float,
    shi_coeff: &Float,
    ctx: &PrecisionContext,
) -> Result<(Float, Float, Float)> {
    check_scaled_radius(x, "radial_with_derivatives")?;
    let (p, p1, p2) = spectral_polynomial(n, x, ctx)?;
    let (s, s1, s2) = sinh_ratio_derivs(x, ctx);
    let d = denominator(x, shi_coeff, ctx)?;
    let d1 = shi_coeff.clone() * &s;
    let d2 = shi_coeff.clone() * &s1;
    let nn = p.clone() * &s;
    let n1 = p1.clone() * &s + p.clone() * &s1;
    let n2 = p2 * s + p1 * s1 * 2i32 + p * s2;

    let dd2 = d.clone().square();
    let dd3 = dd2.clone() * &d;
    let dd4 = dd3.clone() * &d;
    let r = nn.clone() / &dd2;
    let r1 = n1.clone() / &dd2 - nn.clone() * &d1 * 2i32 / &dd3;
    let r2 = n2 / dd2 - (n1 * &d1 * 4i32 + nn.clone() * d2 * 2i32) / dd3
        + nn * d1.square() * 6i32 / dd4;
    if !r.is_finite() || !r1.is_finite() || !r2.is_finite() {
        return Err(HeqedError::Overflow { what: "radial_with_derivatives" });
    }
    Ok((r, r1, r2))
}

/// Two-argument real form: R(r₁, r₂) evaluated through the single-variable
/// shape at x = α₀·(r₁ + r₂), so the exchange symmetry R(r₁,r₂) = R(r₂,r₁)
/// is structural.
pub fn radial_r_two_arg(
    n: u32,
    r1: &Float,
    r2: &Float,
    state: &HeState,
    dc: &DerivedConstants,
    ctx: &PrecisionContext,
) -> Result<Float> {
    for (r, name) in [(r1, "r1"), (r2, "r2")] {
        if !r.is_finite() || r.cmp0() == Some(std::cmp::Ordering::Less) {
            return Err(HeqedError::Domain {
                what: "radial_r_two_arg",
                why: format!("{name} must be a nonnegative length, got {r}"),
            });
        }
    }
    let x = (r1.clone() + r2) * &state.alpha0;
    radial_r(n, &x, &state.shi_coefficient(dc), ctx)
}

/// Normalization f_N = 1/∫₀^∞ x²R(x)² dx in the scaled coordinate.
///
/// Requires c > 0: for c ≤ 0 the denominator 1 + c·Shi has a zero on the
/// positive axis and the integral diverges.
pub fn normalize(n: u32, shi_coeff: &Float, ctx: &PrecisionContext) -> Result<Float> {
    check_index(n, "normalize")?;
    if !shi_coeff.is_finite() || shi_coeff.cmp0() != Some(std::cmp::Ordering::Greater) {
        return Err(HeqedError::Domain {
            what: "normalize",
            why: format!("Shi coefficient must be positive, got {shi_coeff}"),
        });
    }
    // x²R² carries an e^(−2x) envelope, so truncating at the decay cutoff
    // loses less than the quadrature tolerance.
    let norm = integrate_many_finite(
        |x| vec![scaled_square_density(n, x, shi_coeff, ctx)],
        1,
        0.0,
        decay_cutoff(NORM_DECAY_RATE, ctx),
        ctx,
    )?
    .pop()
    .expect("one component requested");
    if !norm.is_finite() || norm.cmp0() != Some(std::cmp::Ordering::Greater) {
        return Err(HeqedError::QuadratureDivergence {
            what: "radial normalization integral",
            residual: format!("{norm}"),
        });
    }
    Ok(norm.recip())
}

/// x²R(x)², the normalization integrand. Beyond the Shi overflow guard the
/// integrand is below any representable magnitude (it decays like x⁴e^(−2x)),
/// so that region contributes exactly zero.
fn scaled_square_density(n: u32, x: &Float, shi_coeff: &Float, ctx: &PrecisionContext) -> Float {
    match radial_r(n, x, shi_coeff, ctx) {
        Ok(r) => r.square() * x.clone().square(),
        Err(_) => ctx.zero(),
    }
}

/// Helium radial probability density in the summed coordinate, exactly as
/// printed: f_N·((n−1)!L_{n−1})²·sinh²(α₀·r) / (1 + c·Shi(α₀·r))⁴, which is
/// f_N·x²R(x)² at x = α₀·r. Integrating over r therefore gives 1/α₀, not 1 —
/// the profile is reported in the scaled-coordinate normalization and its
/// maximum location is what carries physical meaning here.
pub fn radial_density_he(
    n: u32,
    r_sum: &Float,
    state: &HeState,
    dc: &DerivedConstants,
    ctx: &PrecisionContext,
) -> Result<Float> {
    if !r_sum.is_finite() || r_sum.cmp0() == Some(std::cmp::Ordering::Less) {
        return Err(HeqedError::Domain {
            what: "radial_density_he",
            why: format!("summed radius must be nonnegative, got {r_sum}"),
        });
    }
    let x = r_sum.clone() * &state.alpha0;
    let c = state.shi_coefficient(dc);
    Ok(scaled_square_density(n, &x, &c, ctx) * &state.f_n)
}

/// Hydrogen-like radial density (2/(π·a₀³))·r²·e^(−2Z·r/a₀); the Z = 2
/// instance is the printed two-electron comparison curve, the Z = 1 instance
/// peaks at the Bohr radius (52.9 pm).
pub fn radial_density_h(
    r: &Float,
    z: u32,
    dc: &DerivedConstants,
    ctx: &PrecisionContext,
) -> Result<Float> {
    if !r.is_finite() || r.cmp0() == Some(std::cmp::Ordering::Less) {
        return Err(HeqedError::Domain {
            what: "radial_density_h",
            why: format!("radius must be nonnegative, got {r}"),
        });
    }
    if z == 0 {
        return Err(HeqedError::Domain {
            what: "radial_density_h",
            why: "nuclear charge must be at least 1".into(),
        });
    }
    let a0 = &dc.bohr_radius;
    let prefactor = ctx.from_i64(2) / (ctx.pi() * a0.clone().square() * a0);
    let decay = (-(r.clone() * (2 * z) / a0)).exp();
    Ok(prefactor * r.clone().square() * decay)
}

/// Electron-side potential energy profile V_E(x) = f_E·(e²/(2πε₀))·f_N·x²R²,
/// with e²/(2πε₀) = 2k_e. Under the f_N convention
/// ∫ V_E/(f_E·2k_e) dx = 1.
pub fn electron_potential_energy(
    x: &Float,
    state: &HeState,
    dc: &DerivedConstants,
    ctx: &PrecisionContext,
) -> Result<Float> {
    check_scaled_radius(x, "electron_potential_energy")?;
    let c = state.shi_coefficient(dc);
    let density = scaled_square_density(state.n, x, &c, ctx) * &state.f_n;
    Ok(density * state.f_e.clone() * &dc.k_e * 2i32)
}

/// Complex continuation R_c(z) of the radial shape through the Taylor
/// branches of sinh(z)/z and Shi(z). R_c is a ratio of entire functions and
/// hence holomorphic wherever the denominator is nonzero; the Wirtinger
/// residual ∂R_c/∂z̄ vanishes there.
pub fn radial_r_complex(
    n: u32,
    z: &Complex,
    shi_coeff: &Float,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    let s = sinh_ratio_complex(z, ctx);
    let shi_z = shi_complex(z, ctx)?;
    let p = spectral_polynomial_complex(n, z, ctx)?;
    let one = Complex::with_val(ctx.bits(), (1, 0));
    let d = one + shi_z * shi_coeff;
    let d2 = d.clone() * &d;
    Ok(p * s / d2)
}

/// ((n−1)!·L_{n−1}(x), first, second derivative) for n ∈ {1, 2, 3}:
/// 1 | 1−x | 2−4x+x².
fn spectral_polynomial(n: u32, x: &Float, ctx: &PrecisionContext) -> Result<(Float, Float, Float)> {
    check_index(n, "spectral_polynomial")?;
    Ok(match n {
        1 => (ctx.from_i64(1), ctx.zero(), ctx.zero()),
        2 => (ctx.from_i64(1) - x, ctx.from_i64(-1), ctx.zero()),
        _ => (
            x.clone().square() - x.clone() * 4i32 + 2i32,
            x.clone() * 2i32 - 4i32,
            ctx.from_i64(2),
        ),
    })
}

/// Complex twin of [`spectral_polynomial`] (values only).
fn spectral_polynomial_complex(n: u32, z: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    check_index(n, "spectral_polynomial_complex")?;
    let bits = ctx.bits();
    Ok(match n {
        1 => Complex::with_val(bits, (1, 0)),
        2 => Complex::with_val(bits, (1, 0)) - z,
        _ => z.clone() * z - z.clone() * 4i32 + Complex::with_val(bits, (2, 0)),
    })
}

/// (s, s′, s″) for s(x) = sinh(x)/x.
///
/// Closed forms s′ = (cosh x − s)/x and s″ = s − 2s′/x cancel catastrophically
/// near 0, so below [`SINH_RATIO_SWITCH`] the three even/odd Taylor series
/// are summed instead (u_k = x^(2k−2)/(2k+1)! gives the k-th term of all
/// three: s += u·x², s′ += 2k·u·x, s″ += 2k(2k−1)·u).
fn sinh_ratio_derivs(x: &Float, ctx: &PrecisionContext) -> (Float, Float, Float) {
    if x.clone().abs() >= SINH_RATIO_SWITCH {
        let sh = x.clone().sinh();
        let ch = x.clone().cosh();
        let s = sh / x;
        let s1 = (ch - &s) / x;
        let s2 = s.clone() - s1.clone() * 2i32 / x;
        return (s, s1, s2);
    }
    let x2 = x.clone().square();
    let eps = ctx.eps();
    let mut s = ctx.from_i64(1);
    let mut s1 = ctx.zero();
    let mut s2 = ctx.zero();
    let mut u = ctx.from_i64(1) / 6i32; // x^(2k−2)/(2k+1)! at k = 1
    for k in 1..200i64 {
        s += u.clone() * &x2;
        s1 += u.clone() * x * (2 * k);
        s2 += u.clone() * (2 * k) * (2 * k - 1);
        let done = u.clone().abs() * (2 * k) * (2 * k) < eps;
        u *= &x2;
        u /= ctx.from_i64(2 * k + 2) * ctx.from_i64(2 * k + 3);
        if done {
            break;
        }
    }
    (s, s1, s2)
}

/// Complex twin of sinh(x)/x with the same Taylor switch.
fn sinh_ratio_complex(z: &Complex, ctx: &PrecisionContext) -> Complex {
    let modulus = complex_modulus(z);
    if modulus >= SINH_RATIO_SWITCH {
        return z.clone().sinh() / z;
    }
    let eps = ctx.eps();
    let z2 = z.clone() * z;
    let mut sum = Complex::with_val(ctx.bits(), (1, 0));
    let mut term = Complex::with_val(ctx.bits(), (1, 0));
    for k in 1..200i64 {
        term *= &z2;
        term /= ctx.from_i64(2 * k) * ctx.from_i64(2 * k + 1);
        sum += &term;
        if complex_modulus(&term) < eps {
            break;
        }
    }
    sum
}

/// 1 + c·Shi(x); Shi's own overflow guard bounds the usable range.
fn denominator(x: &Float, shi_coeff: &Float, ctx: &PrecisionContext) -> Result<Float> {
    Ok(ctx.from_i64(1) + shi_coeff.clone() * shi(x, ctx)?)
}

fn check_index(n: u32, what: &'static str) -> Result<()> {
    if !(1..=3).contains(&n) {
        return Err(HeqedError::Domain {
            what,
            why: format!("principal index must be 1, 2, or 3, got {n}"),
        });
    }
    Ok(())
}

fn check_scaled_radius(x: &Float, what: &'static str) -> Result<()> {
    if !x.is_finite() || x.cmp0() == Some(std::cmp::Ordering::Less) {
        return Err(HeqedError::Domain {
            what,
            why: format!("scaled radius must be nonnegative, got {x}"),
        });
    }
    Ok(())
}
