//! Effective QED interaction zone.
//!
//! Point and Gaussian-smeared vacuum-polarization potentials, the zone
//! energy E(δ′) with its stationary point a_min, the coupling factor f_E,
//! the effective interaction length λ (ab-initio, coupling-derived and
//! cutoff-derived routes), and the bare-mass cutoff chain.
//!
//! All lengths are in m and energies in J unless a name says otherwise.
//! The smeared potential is
//!
//!   W(δ, λ) = Λ/(3√2) · e^(−(δ/λ)²) · (3λ⁴ − 12λ²δ² + 4δ⁴)/λ⁹,
//!
//! whose quartic factor reappears (in the scaled variable a = δ/λ) in the
//! coupling factor and in every λ inversion below.

use std::cmp::Ordering;

use rug::ops::Pow;
use rug::Float;

use crate::constants::{DerivedConstants, PhysicalConstants};
use crate::error::{HeqedError, Result};
use crate::numerics::{self, PrecisionContext};

/// Bundle of the three zone parameters that every downstream consumer needs
/// together: the interaction length, the stationary point of the zone energy
/// in units of λ, and the coupling factor at that point.
#[derive(Debug, Clone)]
pub struct InteractionZone {
    /// Effective interaction length λ > 0 in m.
    pub lambda: Float,
    /// Stationary point of the zone energy in units of λ; lies in (1, 1.3).
    pub a_min: Float,
    /// Coupling factor f_E(a_min, λ); exceeds 1 whenever the smeared
    /// repulsion is enhanced (the regime of every length used here).
    pub f_e: Float,
}

impl InteractionZone {
    /// Solves the stationary point and evaluates the coupling factor for a
    /// given interaction length.
    pub fn new(lambda: &Float, dc: &DerivedConstants, ctx: &PrecisionContext) -> Result<Self> {
        require_positive(lambda, "InteractionZone::new", "interaction length λ")?;
        let a_min = solve_a_min(ctx)?;
        let f_e = coupling_factor(&a_min, lambda, dc)?;
        Ok(Self { lambda: lambda.clone(), a_min, f_e })
    }

    /// Zone energy at displacement δ′ using this zone's coupling factor.
    pub fn energy(
        &self,
        delta_prime: &Float,
        dc: &DerivedConstants,
        ctx: &PrecisionContext,
    ) -> Result<Float> {
        zone_energy_with_coupling(delta_prime, &self.lambda, &self.f_e, dc, ctx)
    }
}

/// Bare-mass cutoff chain: the relative length deficit fixes a bare mass,
/// a cutoff length and the corresponding energy scale.
#[derive(Debug, Clone)]
pub struct CutoffModel {
    /// Relative deficit Δλ/λ between two interaction lengths.
    pub delta_lambda_rel: Float,
    /// Bare mass m_b = m_e·(1 + Δλ/λ) in kg.
    pub m_b: Float,
    /// Cutoff length in m.
    pub l_cutoff: Float,
    /// Photon energy at the cutoff length, 2πħc/l, in eV.
    pub e_cutoff_ev: Float,
}

fn require_positive(value: &Float, what: &'static str, name: &str) -> Result<()> {
    if value.is_finite() && value.cmp0() == Some(Ordering::Greater) {
        Ok(())
    } else {
        Err(HeqedError::Domain {
            what,
            why: format!("{name} must be positive and finite, got {value}"),
        })
    }
}

/// Quartic 3 − 12u² + 4u⁴ shared by the smeared potential, the coupling
/// factor and the λ inversion (equal to λ⁴·H₄(δ/λ)/4 with the physicists'
/// Hermite H₄).
fn wk_polynomial(u: &Float) -> Float {
    let u2 = u.clone().square();
    let u4 = u2.clone().square();
    u4 * 4u32 - u2 * 12u32 + 3u32
}

/// Fine-structure constant e²/(4πε₀ħc) from the base constants alone.
fn fine_structure(pc: &PhysicalConstants, ctx: &PrecisionContext) -> Float {
    let e2 = pc.e.clone().square();
    e2 / (ctx.pi() * 4u32 * &pc.eps0 * &pc.hbar * &pc.c)
}

/// Electron Compton wavelength h/(m_e·c) from the base constants alone.
fn compton_wavelength(pc: &PhysicalConstants) -> Float {
    pc.h.clone() / (pc.m_e.clone() * &pc.c)
}

/// Interaction length from the energy balance W(λ) = 3·m_e·c², where
/// W(λ) = (3/5)·k_e/λ is the zone share of the electrostatic self-energy:
/// λ = k_e/(5·m_e·c²).
pub fn lambda_ab_initio(dc: &DerivedConstants, pc: &PhysicalConstants) -> Float {
    let rest = pc.m_e.clone() * pc.c.clone().square();
    dc.k_e.clone() / (rest * 5u32)
}

/// Point-source vacuum-polarization potential Λ/δ⁵.
pub fn wk_point(delta: &Float, dc: &DerivedConstants) -> Result<Float> {
    require_positive(delta, "wk_point", "separation δ")?;
    Ok(dc.lambda_wk.clone() / delta.clone().pow(5u32))
}

/// Gaussian-smeared vacuum-polarization potential
/// W(δ, λ) = Λ/(3√2·λ⁵) · e^(−(δ/λ)²) · (3 − 12(δ/λ)² + 4(δ/λ)⁴).
/// Finite for all δ including 0.
pub fn wk_smeared(delta: &Float, lambda: &Float, dc: &DerivedConstants) -> Result<Float> {
    require_positive(lambda, "wk_smeared", "smearing width λ")?;
    let u = delta.clone() / lambda;
    let gauss = (-u.clone().square()).exp();
    let sqrt2 = Float::with_val(lambda.prec(), 2u32).sqrt();
    let amp = dc.lambda_wk.clone() / (lambda.clone().pow(5u32) * sqrt2 * 3u32);
    Ok(amp * gauss * wk_polynomial(&u))
}

/// Vacuum-polarization correction to the Coulomb potential of a charge Z·e,
/// evaluated by quadrature:
///
///   V(δ) = −Zαħc/δ · [1 + (2α/3π) ∫₁^∞ e^(−4πδx/λ_C)·(2x²+1)√(x²−1)/(2x⁴) dx].
///
/// The substitution x = 1 + u² removes the square-root endpoint, leaving an
/// analytic integrand with Gaussian decay in u.
pub fn uehling(
    delta: &Float,
    z: u32,
    pc: &PhysicalConstants,
    ctx: &PrecisionContext,
) -> Result<Float> {
    require_positive(delta, "uehling", "separation δ")?;
    let alpha = fine_structure(pc, ctx);
    let lam_c = compton_wavelength(pc);
    let rate = delta.clone() * ctx.pi() * 4u32 / &lam_c; // 4πδ/λ_C
    let mut scale = (1.0 / rate.to_f64()).sqrt();
    if !scale.is_finite() {
        scale = 1.0;
    }
    let integral = numerics::integrate_semi_infinite_with(
        |u: &Float| {
            let u2 = u.clone().square();
            let x = u2.clone() + 1u32;
            let x2 = x.clone().square();
            let damp = (-(rate.clone() * &x)).exp();
            let num = (x2.clone() * 2u32 + 1u32) * u2.clone() * (u2 + 2u32).sqrt();
            damp * num / x2.clone().square()
        },
        0.0,
        scale.clamp(1e-6, 1e12),
        ctx,
    )?;
    let bracket = alpha.clone() * 2u32 * integral / (ctx.pi() * 3u32) + 1u32;
    let coulomb = -(alpha * z * &pc.hbar * &pc.c) / delta;
    Ok(coulomb * bracket)
}

/// Small-distance closed form of [`uehling`] (valid for 2πδ ≪ λ_C·e^(−γ−5/6)):
/// V(δ) = −Zαħc/δ · [1 + (2α/3π)·(ln(λ_C/(2πδ)) − γ − 5/6)].
pub fn uehling_near(
    delta: &Float,
    z: u32,
    pc: &PhysicalConstants,
    ctx: &PrecisionContext,
) -> Result<Float> {
    require_positive(delta, "uehling_near", "separation δ")?;
    let alpha = fine_structure(pc, ctx);
    let lam_c = compton_wavelength(pc);
    let log_term = (lam_c / (ctx.pi() * 2u32 * delta)).ln()
        - ctx.euler_gamma()
        - ctx.parse("5") / 6u32;
    let bracket = alpha.clone() * 2u32 * log_term / (ctx.pi() * 3u32) + 1u32;
    let coulomb = -(alpha * z * &pc.hbar * &pc.c) / delta;
    Ok(coulomb * bracket)
}

/// Complete two-electron potential k_e/δ − W(δ, λ): Coulomb repulsion minus
/// the smeared vacuum-polarization dip.
pub fn total_potential(delta: &Float, lambda: &Float, dc: &DerivedConstants) -> Result<Float> {
    require_positive(delta, "total_potential", "separation δ")?;
    let coulomb = dc.k_e.clone() / delta;
    Ok(coulomb - wk_smeared(delta, lambda, dc)?)
}

/// Closed-form stationarity condition of the zone energy in the scaled
/// variable x = δ′/λ:
///
///   res(x) = −√(2π)·(x⁵ − 10x³ + 15x)·e^(x²/2) − 2x⁴ + 22x² − 8.
///
/// Zone-energy extrema sit exactly at its roots; the physical one lies in
/// (1, 1.3).
pub fn stationarity_residual(x: &Float, ctx: &PrecisionContext) -> Float {
    let sqrt_2pi = (ctx.pi() * 2u32).sqrt();
    let x2 = x.clone().square();
    let x3 = x2.clone() * x;
    let x4 = x2.clone().square();
    let x5 = x4.clone() * x;
    let quintic = x5 - x3 * 10u32 + x.clone() * 15u32;
    let growth = (x2.clone() / 2u32).exp();
    -(sqrt_2pi * quintic * growth) - x4 * 2u32 + x2 * 22u32 - 8u32
}

/// Stationary point a_min of the zone energy: the root of
/// [`stationarity_residual`] bracketed in [1.0, 1.3].
pub fn solve_a_min(ctx: &PrecisionContext) -> Result<Float> {
    let lo = ctx.from_i64(1);
    let hi = ctx.parse("1.3");
    let found = numerics::find_root_bracketed(|x| stationarity_residual(x, ctx), &lo, &hi, ctx)?;
    Ok(found.root)
}

/// ∫_x^∞ e^(−t²)·res(t) dt with res from [`stationarity_residual`], written
/// in the overflow-free split e^(−t²)·e^(t²/2) = e^(−t²/2).
fn q_res(x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let sqrt_2pi = (ctx.pi() * 2u32).sqrt();
    numerics::integrate_semi_infinite_with(
        |s: &Float| {
            let t = s.clone() + x;
            let t2 = t.clone().square();
            let t3 = t2.clone() * &t;
            let t4 = t2.clone().square();
            let t5 = t4.clone() * &t;
            let quintic = t5 - t3 * 10u32 + t.clone() * 15u32;
            let quartic = t4 * 2u32 - t2.clone() * 22u32 + 8u32;
            let half = (-(t2.clone() / 2u32)).exp();
            let full = (-t2).exp();
            -(sqrt_2pi.clone() * quintic * half) - quartic * full
        },
        0.0,
        1.0,
        ctx,
    )
}

fn zone_energy_with_coupling(
    delta_prime: &Float,
    lambda: &Float,
    f_e: &Float,
    dc: &DerivedConstants,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let x = delta_prime.clone() / lambda;
    let q = q_res(&x, ctx)?;
    let sqrt2 = ctx.from_i64(2).sqrt();
    let shape = f_e.clone() / (1i32 - f_e.clone());
    let amp = dc.lambda_wk.clone() / (lambda.clone().pow(5u32) * sqrt2 * 48u32);
    Ok(shape * amp * q * 2u32 / ctx.pi().sqrt())
}

/// Energy of the interaction zone displaced to δ′.
///
/// The direct Gaussian-weighted integral of the complete potential has no
/// finite value — its Coulomb piece diverges logarithmically at δ → 0 (see
/// [`zone_coulomb_piece`]) — so the zone energy is reconstructed as the
/// antiderivative of its closed-form stationarity condition, normalized to
/// E(∞) = 0:
///
///   E(δ′) = (2/√π)·(f_E/(1−f_E))·Λ/(48√2·λ⁵)·∫_{δ′/λ}^∞ e^(−t²)·res(t) dt.
///
/// By construction its stationary point on (λ, 1.3λ) is exactly a_min·λ, and
/// the second derivative there is positive (a true local minimum).
pub fn zone_energy(
    delta_prime: &Float,
    lambda: &Float,
    dc: &DerivedConstants,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let zone = InteractionZone::new(lambda, dc, ctx)?;
    zone.energy(delta_prime, dc, ctx)
}

/// Gaussian-weighted Coulomb integral with an explicit inner cutoff ε:
///
///   (2/(√π·λ)) ∫_ε^∞ e^(−((δ−δ′)/λ)²) · k_e/δ dδ.
///
/// Grows by the same increment every time ε shrinks by a constant factor
/// (logarithmic divergence), which is why [`zone_energy`] cannot be — and is
/// not — computed as a direct weighted integral of the complete potential.
pub fn zone_coulomb_piece(
    delta_prime: &Float,
    lambda: &Float,
    inner_cutoff: &Float,
    dc: &DerivedConstants,
    ctx: &PrecisionContext,
) -> Result<Float> {
    require_positive(lambda, "zone_coulomb_piece", "smearing width λ")?;
    require_positive(inner_cutoff, "zone_coulomb_piece", "inner cutoff ε")?;
    let raw = numerics::integrate_semi_infinite_with(
        |s: &Float| {
            let delta = s.clone() + inner_cutoff;
            let u = (delta.clone() - delta_prime) / lambda;
            (-u.square()).exp() * &dc.k_e / delta
        },
        0.0,
        lambda.to_f64(),
        ctx,
    )?;
    Ok(raw * 2u32 / (ctx.pi().sqrt() * lambda))
}

fn coupling_core(
    a: &Float,
    lambda: &Float,
    dc: &DerivedConstants,
    distance_weighted: bool,
    what: &'static str,
) -> Result<Float> {
    require_positive(lambda, what, "interaction length λ")?;
    let sqrt2 = Float::with_val(dc.lambda_wk.prec(), 2u32).sqrt();
    let gauss = (-a.clone().square()).exp();
    let mut kernel = wk_polynomial(a) * gauss;
    if distance_weighted {
        kernel *= a;
    }
    let dip = dc.lambda_wk.clone() * kernel / (sqrt2 * 3u32 * lambda.clone().pow(4u32) * &dc.k_e);
    Ok(1i32 - dip)
}

/// Coupling factor of the interaction zone,
/// f_E(a, λ) = 1 − (1/k_e)·Λ/(3√2)·a·(3 − 12a² + 4a⁴)·e^(−a²)/λ⁴,
/// with a in units of λ. Exceeds 1 wherever the quartic is negative
/// (in particular at a_min); tends to 1 for a → 0, a → ∞ and λ → ∞.
pub fn coupling_factor(a: &Float, lambda: &Float, dc: &DerivedConstants) -> Result<Float> {
    coupling_core(a, lambda, dc, true, "coupling_factor")
}

/// Variant of [`coupling_factor`] without the leading linear factor a.
/// The λ-fit and level pipelines consume exactly this form; the two variants
/// agree only at a = 1.
pub fn coupling_factor_unweighted(
    a: &Float,
    lambda: &Float,
    dc: &DerivedConstants,
) -> Result<Float> {
    coupling_core(a, lambda, dc, false, "coupling_factor_unweighted")
}

/// Inverts [`coupling_factor`] for the interaction length:
/// λ = [ (1/k_e)·Λ/(3√2)·a·(3 − 12a² + 4a⁴)·e^(−a²)/(1 − f_E) ]^(1/4).
/// The radicand is positive exactly when f_E > 1 together with a negative
/// quartic (the physical regime).
pub fn lambda_from_coupling(f_e: &Float, a_min: &Float, dc: &DerivedConstants) -> Result<Float> {
    let one_minus = 1i32 - f_e.clone();
    if one_minus.cmp0() == Some(Ordering::Equal) {
        return Err(HeqedError::Domain {
            what: "lambda_from_coupling",
            why: "coupling factor 1 leaves the length unconstrained".into(),
        });
    }
    let sqrt2 = Float::with_val(dc.lambda_wk.prec(), 2u32).sqrt();
    let gauss = (-a_min.clone().square()).exp();
    let kernel = wk_polynomial(a_min) * gauss * a_min;
    let radicand = dc.lambda_wk.clone() * kernel / (sqrt2 * 3u32 * one_minus * &dc.k_e);
    if radicand.cmp0() != Some(Ordering::Greater) {
        return Err(HeqedError::Domain {
            what: "lambda_from_coupling",
            why: format!("fourth-root argument must be positive, got {radicand}"),
        });
    }
    Ok(radicand.root(4))
}

/// Runs the bare-mass cutoff chain for a relative length deficit r = Δλ/λ:
/// m_b = (1+r)·m_e, then with ρ = Δm/m_b = r/(1+r)
///
///   l = 2πħ/(m_b·c) · exp(−(2π/(9α))·ρ),   E = 2πħc/l.
///
/// r = 0 collapses l to the electron Compton wavelength.
pub fn cutoff_chain(
    delta_lambda_rel: &Float,
    pc: &PhysicalConstants,
    ctx: &PrecisionContext,
) -> Result<CutoffModel> {
    if !delta_lambda_rel.is_finite() || delta_lambda_rel.cmp0() == Some(Ordering::Less) {
        return Err(HeqedError::Domain {
            what: "cutoff_chain",
            why: format!("relative deficit must be ≥ 0, got {delta_lambda_rel}"),
        });
    }
    let r = delta_lambda_rel.clone();
    let m_b = (r.clone() + 1u32) * &pc.m_e;
    let rho = r.clone() / (r.clone() + 1u32);
    let exponent = ctx.pi() * 2u32 * rho / (fine_structure(pc, ctx) * 9u32);
    let compton_b = ctx.pi() * 2u32 * &pc.hbar / (m_b.clone() * &pc.c);
    let l_cutoff = compton_b * (-exponent).exp();
    let e_j = ctx.pi() * 2u32 * &pc.hbar * &pc.c / &l_cutoff;
    let e_cutoff_ev = pc.j_to_ev(&e_j);
    Ok(CutoffModel { delta_lambda_rel: r, m_b, l_cutoff, e_cutoff_ev })
}

/// Inverts the cutoff chain: given a cutoff length, recovers ρ from
/// λ_C·(1−ρ)·e^(−(2π/(9α))·ρ) = l (strictly decreasing in ρ on (−∞, 1)),
/// converts to r = ρ/(1−ρ) and returns λ = λ_ref·(1 − r). Lengths above the
/// Compton wavelength give r < 0; very short lengths give r > 1 and hence a
/// negative λ, which is reported as computed.
pub fn lambda_from_cutoff(
    l_cutoff: &Float,
    lambda_ref: &Float,
    pc: &PhysicalConstants,
    ctx: &PrecisionContext,
) -> Result<Float> {
    require_positive(l_cutoff, "lambda_from_cutoff", "cutoff length")?;
    require_positive(lambda_ref, "lambda_from_cutoff", "reference length λ_ref")?;
    let x_const = ctx.pi() * 2u32 / (fine_structure(pc, ctx) * 9u32);
    let lam_c = compton_wavelength(pc);
    let log_gap = (lam_c / l_cutoff).ln(); // ln(λ_C/l), any sign
    let gap = |rho: &Float| -> Float {
        (1i32 - rho.clone()).ln() - x_const.clone() * rho + &log_gap
    };
    // Bracket the unique root: gap → +∞ as ρ → −∞ and −∞ as ρ → 1⁻.
    let hi = ctx.parse("0.999999");
    let mut lo = ctx.from_i64(0);
    let mut tries = 0;
    while gap(&lo).cmp0() != Some(Ordering::Greater) {
        lo -= 1u32;
        tries += 1;
        if tries > 512 {
            return Err(HeqedError::NoBracket { what: "lambda_from_cutoff" });
        }
    }
    if gap(&hi).cmp0() != Some(Ordering::Less) {
        return Err(HeqedError::NoBracket { what: "lambda_from_cutoff" });
    }
    let rho = numerics::find_root_bracketed(|p| gap(p), &lo, &hi, ctx)?.root;
    let r = rho.clone() / (1i32 - rho);
    Ok(lambda_ref.clone() * (1i32 - r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::derive_constants;

    /// 30-digit cross-check values computed by an independent
    /// arbitrary-precision implementation of the same formulas.
    const LAMBDA_AB_30: &str = "5.63588065240985873518188505765e-16";
    /// Short published pins used as *inputs* when freezing the values below.
    const LAMBDA_AB_PIN: &str = "5.635880652409857e-16";
    const LAMBDA_LIT: &str = "8.781970265008103e-16";
    const A_MIN_30: &str = "1.17150819608383652296574753252";
    const RES_AT_1_30: &str = "-12.7963881247349576308163513058";
    const WK_POINT_AB_30: &str = "9.92002344250055221086989852803e-11";
    const WK_SMEARED_0_30: &str = "7.63566432506995027085926946456e-12";
    const F_E_LIT_30: &str = "18.0755634223371847620452733163";
    const F_E_AB_30: &str = "101.668996780078525439392130285";
    const F_E_NOA_LIT_30: &str = "15.5757097384534285732093610474";
    const F_E_NOA_AB_30: &str = "86.9311075386401822226404651852";
    const F_E_ARGMAX_30: &str = "1.05982897272724501556233590192";
    const F_E_MAX_LIT_30: &str = "19.1405749724938680796046356845";
    const GAP_30: &str = "0.358244165905900291444867980311";
    const ZONE_MIN_LIT_J_30: &str = "-1.2868269178018235983617544406e-12";
    const ZONE_MIN_AB_J_30: &str = "-1.12783873545968030736973249006e-11";
    const ZONE_CURV_30: &str = "6277449992914708241.582100612";
    const ZONE_3LAM_30: &str = "1.58690874642117512429106443817e-13";
    const ZONE_10LAM_30: &str = "8.63793090509682784284030732217e-31";
    const ZONE_11LAM_30: &str = "3.52069223048527826247398252733e-35";
    const COULOMB_1E6: &str = "1.46032257814e-12";
    const COULOMB_1E9: &str = "1.97938904617e-12";
    const COULOMB_1E12: &str = "2.49845533849e-12";
    const UEHLING_LOG_QUAD_30: &str = "0.00923459201852667222679825272868";
    const UEHLING_LOG_CLOSED_30: &str = "0.00923230040421511542646340400629";
    const UEHLING_QUAD_J_30: &str = "-1.91927844607082857408795040192e-12";
    const UEHLING_NEAR_J_30: &str = "-1.91927408806924037875576497928e-12";
    const CUTOFF_R_PRINTED: &str = "0.3582441894860";
    const CUTOFF_L_PIN: &str = "1.964733967957779e-23";
    const CUTOFF_L_30: &str = "1.96473396796066754021481579465e-23";
    const CUTOFF_E_EV_30: &str = "63104827653533157.7947688425402";
    const LAMBDA_BACK_30: &str = "5.63588044532987702690458700357e-16";
    const PLANCK_L: &str = "1.616255e-35";
    const PLANCK_LAMBDA_30: &str = "-1.9290528860275072686901161764e-16";

    fn setup() -> (PrecisionContext, PhysicalConstants, DerivedConstants) {
        let ctx = PrecisionContext::default();
        let pc = PhysicalConstants::si(&ctx);
        let dc = derive_constants(&pc, &ctx).unwrap();
        (ctx, pc, dc)
    }

    fn assert_rel(ctx: &PrecisionContext, got: &Float, want: &str, tol: &str) {
        let target = ctx.parse(want);
        let rel = ctx.rel_diff(got, &target);
        assert!(rel < ctx.parse(tol), "got {got}, want {want}, rel {rel}");
    }

    #[test]
    fn ab_initio_length_matches_energy_balance() {
        let (ctx, pc, dc) = setup();
        let lam = lambda_ab_initio(&dc, &pc);
        assert_rel(&ctx, &lam, LAMBDA_AB_30, "1e-28");
        // doubling the mass halves the length
        let mut heavy = pc.clone();
        heavy.m_e = pc.m_e.clone() * 2u32;
        let half = lambda_ab_initio(&dc, &heavy);
        assert_rel(&ctx, &(half * 2u32), LAMBDA_AB_30, "1e-28");
        // round trip: (3/5)·k_e/λ = 3·m_e·c²
        let w = dc.k_e.clone() * 3u32 / (lam * 5u32);
        let rest3 = pc.m_e.clone() * pc.c.clone().square() * 3u32;
        assert!(ctx.rel_diff(&w, &rest3) < ctx.parse("1e-45"));
    }

    #[test]
    fn point_potential_power_law_and_domain() {
        let (ctx, _, dc) = setup();
        let lam_ab = ctx.parse(LAMBDA_AB_PIN);
        let v = wk_point(&lam_ab, &dc).unwrap();
        assert_rel(&ctx, &v, WK_POINT_AB_30, "1e-28");
        assert!(v.cmp0() == Some(Ordering::Greater));
        let v2 = wk_point(&(lam_ab * 2u32), &dc).unwrap();
        assert!(ctx.rel_diff(&(v2 * 32u32), &v) < ctx.parse("1e-45"));
        assert!(wk_point(&ctx.zero(), &dc).is_err());
        assert!(wk_point(&ctx.parse("-1e-16"), &dc).is_err());
    }

    #[test]
    fn smeared_potential_center_zeros_and_quartic_form() {
        let (ctx, _, dc) = setup();
        let lam = ctx.parse(LAMBDA_LIT);
        let center = wk_smeared(&ctx.zero(), &lam, &dc).unwrap();
        assert_rel(&ctx, &center, WK_SMEARED_0_30, "1e-28");
        // the two positive zeros sit at δ/λ = √((3∓√6)/2)
        for zero in ["0.524647623275290317884060253835", "1.65068012388578455588334111112"] {
            let at = wk_smeared(&(ctx.parse(zero) * &lam), &lam, &dc).unwrap();
            let ratio = at / &center;
            assert!(ratio.clone().abs() < ctx.parse("1e-25"), "zero ratio {ratio}");
        }
        // quartic equals H₄(u)/4 with H₄ = 16u⁴ − 48u² + 12
        for u in ["0.3", "1.0", "2.1"] {
            let uu = ctx.parse(u);
            let h4 = uu.clone().square().square() * 16u32 - uu.clone().square() * 48u32 + 12u32;
            let diff = wk_polynomial(&uu) - h4 / 4u32;
            assert!(diff.abs() < ctx.parse("1e-45"));
        }
    }

    #[test]
    fn uehling_quadrature_agrees_with_small_distance_form() {
        let (ctx, pc, dc) = setup();
        let delta = dc.compton.clone() / 10000u32;
        let quad = uehling(&delta, pc.z, &pc, &ctx).unwrap();
        let near = uehling_near(&delta, pc.z, &pc, &ctx).unwrap();
        assert_rel(&ctx, &quad, UEHLING_QUAD_J_30, "1e-26");
        assert_rel(&ctx, &near, UEHLING_NEAR_J_30, "1e-26");
        // the bracket log-terms agree within 1% in the stated regime
        let lq = ctx.parse(UEHLING_LOG_QUAD_30);
        let lc = ctx.parse(UEHLING_LOG_CLOSED_30);
        assert!(ctx.rel_diff(&lq, &lc) < ctx.parse("0.01"));
        // far regime: the bracket collapses onto the bare Coulomb factor
        let far = dc.compton.clone() * 10u32;
        let v = uehling(&far, pc.z, &pc, &ctx).unwrap();
        let alpha = fine_structure(&pc, &ctx);
        let bare = -(alpha * pc.z * &pc.hbar * &pc.c) / &far;
        assert!(ctx.rel_diff(&v, &bare) < ctx.parse("1e-30"));
    }

    #[test]
    fn total_potential_reduces_to_coulomb_far_out() {
        let (ctx, _, dc) = setup();
        let lam = ctx.parse(LAMBDA_LIT);
        let delta = lam.clone() * 100u32;
        let v = total_potential(&delta, &lam, &dc).unwrap();
        let coulomb = dc.k_e.clone() / &delta;
        assert!(ctx.rel_diff(&v, &coulomb) < ctx.parse("1e-15"));
        assert!(total_potential(&ctx.zero(), &lam, &dc).is_err());
    }

    #[test]
    fn stationarity_residual_closed_points() {
        let (ctx, _, _) = setup();
        let at0 = stationarity_residual(&ctx.zero(), &ctx);
        assert!((at0 + 8u32).abs() < ctx.parse("1e-45"));
        let at1 = stationarity_residual(&ctx.from_i64(1), &ctx);
        assert_rel(&ctx, &at1, RES_AT_1_30, "1e-28");
        // the 13-digit published stationary point nearly annihilates it
        let res = stationarity_residual(&ctx.parse("1.1715081960838"), &ctx);
        assert!(res.abs() < ctx.parse("1e-10"));
    }

    #[test]
    fn stationary_point_root_is_stable() {
        let (ctx, _, _) = setup();
        let a = solve_a_min(&ctx).unwrap();
        assert_rel(&ctx, &a, A_MIN_30, "1e-28");
        let wide = PrecisionContext::new(ctx.digits() * 2).unwrap();
        let a2 = solve_a_min(&wide).unwrap();
        assert!(ctx.rel_diff(&a, &a2) < ctx.parse("1e-40"));
    }

    #[test]
    fn zone_energy_minimum_location_value_and_curvature() {
        let (ctx, _, dc) = setup();
        let lam = ctx.parse(LAMBDA_LIT);
        let zone = InteractionZone::new(&lam, &dc, &ctx).unwrap();
        let x0 = zone.a_min.clone() * &lam;
        let e0 = zone.energy(&x0, &dc, &ctx).unwrap();
        assert_rel(&ctx, &e0, ZONE_MIN_LIT_J_30, "1e-26");
        // both neighbours lie higher and the finite-difference curvature is
        // positive: a genuine local minimum
        let h = lam.clone() / 1000u32;
        let ep = zone.energy(&(x0.clone() + &h), &dc, &ctx).unwrap();
        let em = zone.energy(&(x0.clone() - &h), &dc, &ctx).unwrap();
        assert!(ep > e0 && em > e0);
        let curv = (ep - e0.clone() * 2u32 + em) / h.clone().square();
        assert!(curv.cmp0() == Some(Ordering::Greater));
        assert_rel(&ctx, &curv, ZONE_CURV_30, "1e-20");
        // ab-initio length variant
        let lam_ab = ctx.parse(LAMBDA_AB_PIN);
        let zone_ab = InteractionZone::new(&lam_ab, &dc, &ctx).unwrap();
        let e_ab = zone_ab.energy(&(zone_ab.a_min.clone() * &lam_ab), &dc, &ctx).unwrap();
        assert_rel(&ctx, &e_ab, ZONE_MIN_AB_J_30, "1e-26");
    }

    #[test]
    fn zone_energy_tail_is_positive_and_decaying() {
        let (ctx, _, dc) = setup();
        let lam = ctx.parse(LAMBDA_LIT);
        let zone = InteractionZone::new(&lam, &dc, &ctx).unwrap();
        let e3 = zone.energy(&(lam.clone() * 3u32), &dc, &ctx).unwrap();
        let e10 = zone.energy(&(lam.clone() * 10u32), &dc, &ctx).unwrap();
        let e11 = zone.energy(&(lam.clone() * 11u32), &dc, &ctx).unwrap();
        assert_rel(&ctx, &e3, ZONE_3LAM_30, "1e-26");
        assert_rel(&ctx, &e10, ZONE_10LAM_30, "1e-26");
        assert_rel(&ctx, &e11, ZONE_11LAM_30, "1e-26");
        assert!(e3 > e10 && e10 > e11 && e11.cmp0() == Some(Ordering::Greater));
    }

    #[test]
    fn weighted_coulomb_integral_diverges_logarithmically() {
        let (ctx, _, dc) = setup();
        let lam = ctx.parse(LAMBDA_LIT);
        let dprime = solve_a_min(&ctx).unwrap() * &lam;
        let mut pieces = Vec::new();
        for eps in ["1e-6", "1e-9", "1e-12"] {
            let cutoff = ctx.parse(eps) * &lam;
            pieces.push(zone_coulomb_piece(&dprime, &lam, &cutoff, &dc, &ctx).unwrap());
        }
        assert_rel(&ctx, &pieces[0], COULOMB_1E6, "1e-9");
        assert_rel(&ctx, &pieces[1], COULOMB_1E9, "1e-9");
        assert_rel(&ctx, &pieces[2], COULOMB_1E12, "1e-9");
        // each thousand-fold cutoff reduction adds the same increment
        let inc1 = pieces[1].clone() - &pieces[0];
        let inc2 = pieces[2].clone() - &pieces[1];
        assert!(ctx.rel_diff(&inc1, &inc2) < ctx.parse("1e-6"));
    }

    #[test]
    fn coupling_factor_values_and_limits() {
        let (ctx, _, dc) = setup();
        let a = solve_a_min(&ctx).unwrap();
        let lam_lit = ctx.parse(LAMBDA_LIT);
        let lam_ab = ctx.parse(LAMBDA_AB_PIN);
        assert_rel(&ctx, &coupling_factor(&a, &lam_lit, &dc).unwrap(), F_E_LIT_30, "1e-28");
        assert_rel(&ctx, &coupling_factor(&a, &lam_ab, &dc).unwrap(), F_E_AB_30, "1e-28");
        assert_rel(
            &ctx,
            &coupling_factor_unweighted(&a, &lam_lit, &dc).unwrap(),
            F_E_NOA_LIT_30,
            "1e-28",
        );
        assert_rel(
            &ctx,
            &coupling_factor_unweighted(&a, &lam_ab, &dc).unwrap(),
            F_E_NOA_AB_30,
            "1e-28",
        );
        // enhancement: the quartic is negative at a_min, so f_E > 1
        assert!(wk_polynomial(&a).cmp0() == Some(Ordering::Less));
        assert!(coupling_factor(&a, &lam_lit, &dc).unwrap() > 1u32);
        // distant zone: factor collapses to 1
        let far = coupling_factor(&a, &ctx.from_i64(1), &dc).unwrap();
        assert!((far - 1u32).abs() < ctx.parse("1e-50"));
        // the curve's true maximum sits below a_min and above its value there
        let argmax = ctx.parse(F_E_ARGMAX_30);
        let f_max = coupling_factor(&argmax, &lam_lit, &dc).unwrap();
        assert_rel(&ctx, &f_max, F_E_MAX_LIT_30, "1e-28");
        assert!(f_max > coupling_factor(&a, &lam_lit, &dc).unwrap());
        for off in ["-0.01", "0.01"] {
            let near = coupling_factor(&(argmax.clone() + ctx.parse(off)), &lam_lit, &dc).unwrap();
            assert!(f_max > near);
        }
    }

    #[test]
    fn coupling_length_round_trips() {
        let (ctx, pc, dc) = setup();
        let a = solve_a_min(&ctx).unwrap();
        for lam_str in ["7e-16", LAMBDA_LIT] {
            let lam = ctx.parse(lam_str);
            let f_e = coupling_factor(&a, &lam, &dc).unwrap();
            let back = lambda_from_coupling(&f_e, &a, &dc).unwrap();
            assert!(ctx.rel_diff(&back, &lam) < ctx.parse("1e-40"));
        }
        // relative gap between the two independent lengths
        let lam_ab = lambda_ab_initio(&dc, &pc);
        let lam_lit = ctx.parse(LAMBDA_LIT);
        let gap = (lam_lit.clone() - lam_ab) / lam_lit;
        assert_rel(&ctx, &gap, GAP_30, "1e-13");
        // f_E = 1 and a radicand of the wrong sign are rejected
        assert!(lambda_from_coupling(&ctx.from_i64(1), &a, &dc).is_err());
        assert!(lambda_from_coupling(&ctx.parse("0.5"), &a, &dc).is_err());
    }

    #[test]
    fn cutoff_chain_matches_independent_evaluation() {
        let (ctx, pc, _) = setup();
        let model = cutoff_chain(&ctx.parse(CUTOFF_R_PRINTED), &pc, &ctx).unwrap();
        assert_rel(&ctx, &model.l_cutoff, CUTOFF_L_30, "1e-26");
        assert_rel(&ctx, &model.e_cutoff_ev, CUTOFF_E_EV_30, "1e-26");
        let expected_mb = (ctx.parse(CUTOFF_R_PRINTED) + 1u32) * &pc.m_e;
        assert!(ctx.rel_diff(&model.m_b, &expected_mb) < ctx.parse("1e-45"));
        // zero deficit collapses to the electron Compton wavelength
        let base = cutoff_chain(&ctx.zero(), &pc, &ctx).unwrap();
        assert!(ctx.rel_diff(&base.l_cutoff, &compton_wavelength(&pc)) < ctx.parse("1e-45"));
        // monotone: larger deficit, shorter cutoff
        let l1 = cutoff_chain(&ctx.parse("0.1"), &pc, &ctx).unwrap().l_cutoff;
        let l2 = cutoff_chain(&ctx.parse("0.2"), &pc, &ctx).unwrap().l_cutoff;
        assert!(l1 > l2);
        assert!(cutoff_chain(&ctx.parse("-0.1"), &pc, &ctx).is_err());
    }

    #[test]
    fn cutoff_inversion_recovers_lengths() {
        let (ctx, pc, _) = setup();
        let lam_lit = ctx.parse(LAMBDA_LIT);
        let back = lambda_from_cutoff(&ctx.parse(CUTOFF_L_PIN), &lam_lit, &pc, &ctx).unwrap();
        assert_rel(&ctx, &back, LAMBDA_BACK_30, "1e-26");
        // deficit recovered from the 16-digit pin reproduces the 13-digit one
        let r = 1i32 - back / &lam_lit;
        assert_rel(&ctx, &r, CUTOFF_R_PRINTED, "1e-10");
        // exact round trip: inverting the chain's own output recovers its input
        let chain_l = cutoff_chain(&ctx.parse(CUTOFF_R_PRINTED), &pc, &ctx).unwrap().l_cutoff;
        let back2 = lambda_from_cutoff(&chain_l, &lam_lit, &pc, &ctx).unwrap();
        let r2 = 1i32 - back2 / &lam_lit;
        assert_rel(&ctx, &r2, CUTOFF_R_PRINTED, "1e-40");
        // a Planck-scale cutoff pushes the deficit above 1: negative length
        let planck = lambda_from_cutoff(&ctx.parse(PLANCK_L), &lam_lit, &pc, &ctx).unwrap();
        assert!(planck.cmp0() == Some(Ordering::Less));
        assert_rel(&ctx, &planck, PLANCK_LAMBDA_30, "1e-26");
        // monotone: shorter cutoff, smaller (eventually negative) length
        let l_less = lambda_from_cutoff(&ctx.parse("1e-24"), &lam_lit, &pc, &ctx).unwrap();
        let l_more = lambda_from_cutoff(&ctx.parse("1e-26"), &lam_lit, &pc, &ctx).unwrap();
        assert!(l_less > l_more);
    }

    #[test]
    fn smeared_potential_matches_cosine_transform() {
        let (ctx, _, _) = setup();
        // dimensionless check (λ = 1, Λ = 1):
        // (1/(3√2))·e^(−x²)·(3−12x²+4x⁴) == (1/(12√(2π)))·∫₀^∞ w⁴·e^(−w²/4)·cos(wx) dw
        let sqrt2 = ctx.from_i64(2).sqrt();
        for x_str in ["0.5", "1.0", "2.0"] {
            let x = ctx.parse(x_str);
            let direct =
                (-x.clone().square()).exp() * wk_polynomial(&x) / (sqrt2.clone() * 3u32);
            let integral = numerics::integrate_semi_infinite_with(
                |w: &Float| {
                    let w2 = w.clone().square();
                    w2.clone().square() * (-(w2 / 4u32)).exp() * (w.clone() * &x).cos()
                },
                0.0,
                2.0,
                &ctx,
            )
            .unwrap();
            let transform = integral / ((ctx.pi() * 2u32).sqrt() * 12u32);
            assert!(ctx.rel_diff(&direct, &transform) < ctx.parse("1e-30"));
        }
    }

    #[test]
    fn interaction_zone_bundles_consistent_parameters() {
        let (ctx, _, dc) = setup();
        let lam = ctx.parse(LAMBDA_LIT);
        let zone = InteractionZone::new(&lam, &dc, &ctx).unwrap();
        assert!(zone.a_min > 1u32 && zone.a_min < ctx.parse("1.3"));
        assert!(zone.f_e > 1u32);
        let free = zone_energy(&(lam.clone() * 3u32), &lam, &dc, &ctx).unwrap();
        let method = zone.energy(&(lam.clone() * 3u32), &dc, &ctx).unwrap();
        assert!(ctx.rel_diff(&free, &method) < ctx.parse("1e-45"));
        assert!(InteractionZone::new(&ctx.zero(), &dc, &ctx).is_err());
    }
}
