//! Self-consistent S-level solver: radial moments, the energy combination,
//! the damped fixed-point iteration for the 1S₀/2S₀/3S₀ levels, and the fit
//! of the interaction length λ against a reference ground energy.
//!
//! The radial shape of [`crate::wavefunction`] leaves two scalars open: the
//! damping constant α₀, fixed by the trial energy through the dispersion
//! α₀ = n·√(f_E·C_C − B·E), and the normalization f_N. Five moments of the
//! shape — ∫x²R², ∫x²R·R″, ∫x·R·R′, ∫x·R² and ∫x⁴R⁴ — combine with the
//! couplings into a scalar energy. Iterating a trial energy against that
//! combination under a small damper yields the S levels; fitting λ so the
//! ground level lands on its reference value yields the length every level
//! run consumes.
//!
//! Two sign conventions of the combination are kept deliberately.
//! [`RadialIntegrals::calibrated_energy`] reproduces the exactly solvable
//! one-electron atom from the same moments (the build gate in the tests),
//! while [`RadialIntegrals::level_map_energy`] is the combination whose
//! damped fixed points reproduce the reference helium levels of
//! [`ReferenceEnergies`]. The two disagree — iterating the calibrated form
//! at n = 1 drives the dispersion radicand negative — and the tests pin
//! both behaviors instead of hiding the tension.

use rug::Float;

use crate::constants::{DerivedConstants, ReferenceEnergies};
use crate::error::{HeqedError, Result};
use crate::numerics::{decay_cutoff, integrate_many_finite, PrecisionContext};
use crate::wavefunction::{alpha0_of, radial_with_derivatives};
use crate::zone::{coupling_factor_unweighted, solve_a_min};

/// Slowest decay rate among the five moment integrands (x²R² ≈ e^(−2x));
/// sets the shared truncation point of the moment quadrature.
const MOMENT_DECAY_RATE: f64 = 2.0;

/// The five radial moments the energy combination consumes, all taken over
/// the scaled coordinate x ∈ [0, ∞):
///
///   norm = ∫x²R²,  i1 = ∫x²R·R″,  i2 = ∫x·R·R′,  i3 = ∫x·R²,  i4 = ∫x⁴R⁴.
#[derive(Debug, Clone)]
pub struct RadialIntegrals {
    /// Normalization moment ∫x²R² (reciprocal of f_N).
    pub norm: Float,
    /// Curvature moment ∫x²R·R″.
    pub i1: Float,
    /// Slope moment ∫x·R·R′.
    pub i2: Float,
    /// Attraction moment ∫x·R².
    pub i3: Float,
    /// Pair moment ∫x⁴R⁴ (weighted by f_N twice in the combination).
    pub i4: Float,
}

impl RadialIntegrals {
    /// Normalization factor f_N = 1/∫x²R².
    pub fn normalization(&self) -> Result<Float> {
        if !self.norm.is_finite() || self.norm.cmp0() != Some(std::cmp::Ordering::Greater) {
            return Err(HeqedError::QuadratureDivergence {
                what: "radial normalization moment",
                residual: format!("nonpositive moment {}", self.norm),
            });
        }
        Ok(self.norm.clone().recip())
    }

    /// Energy combination calibrated on the one-electron atom,
    ///
    ///   E = −f_N·(α²I₁ + 2α²I₂ + A·α·I₃ − f_N·f_E·C_C·α·I₄)/B   (J),
    ///
    /// returned together with f_N. With the closed hydrogen moments and
    /// A = C_C, α = C_C/2, f_E = 0 this collapses to −C_C²/(4B) — the exact
    /// one-electron ground energy — which the tests assert.
    pub fn calibrated_energy(
        &self,
        alpha: &Float,
        nuclear_coeff: &Float,
        f_e: &Float,
        dc: &DerivedConstants,
    ) -> Result<(Float, Float)> {
        let f_n = self.normalization()?;
        let bracket = self.bracket(alpha, nuclear_coeff, f_e, &f_n, dc, true);
        let energy = -(f_n.clone() * bracket) / &dc.b;
        Ok((energy, f_n))
    }

    /// Energy combination iterated by the level pipelines,
    ///
    ///   E = +f_N·(α²I₁ + 2α²I₂ − A·α·I₃ + f_N·f_E·C_C·α·I₄)/B   (J).
    ///
    /// Differs from [`Self::calibrated_energy`] by the overall sign and the
    /// signs of the attraction and pair terms. Its damped fixed points under
    /// [`solve_energy`] reproduce the reference helium levels; on the
    /// one-electron atom it returns three times the true ground energy.
    pub fn level_map_energy(
        &self,
        alpha: &Float,
        nuclear_coeff: &Float,
        f_e: &Float,
        dc: &DerivedConstants,
    ) -> Result<(Float, Float)> {
        let f_n = self.normalization()?;
        let bracket = self.bracket(alpha, nuclear_coeff, f_e, &f_n, dc, false);
        let energy = f_n.clone() * bracket / &dc.b;
        Ok((energy, f_n))
    }

    /// α²I₁ + 2α²I₂ ± A·α·I₃ ∓ f_N·f_E·C_C·α·I₄ — the shared core of the two
    /// energy combinations; `attraction_positive` picks the calibrated signs.
    fn bracket(
        &self,
        alpha: &Float,
        nuclear_coeff: &Float,
        f_e: &Float,
        f_n: &Float,
        dc: &DerivedConstants,
        attraction_positive: bool,
    ) -> Float {
        let alpha_sq = alpha.clone().square();
        let kinetic = alpha_sq.clone() * &self.i1 + alpha_sq * &self.i2 * 2i32;
        let attraction = nuclear_coeff.clone() * alpha * &self.i3;
        let pair = f_n.clone() * f_e * &dc.c_c * alpha * &self.i4;
        if attraction_positive {
            kinetic + attraction - pair
        } else {
            kinetic - attraction + pair
        }
    }
}

/// The five moments of an arbitrary trial shape, integrated in one shared
/// pass. `f` returns (R, R′, R″) at a scaled radius; the x⁴R⁴ component is
/// the square of the x²R² one, so the pass costs four extra multiplications
/// per node, not a second shape evaluation.
pub fn trial_integrals<F>(mut f: F, ctx: &PrecisionContext) -> Result<RadialIntegrals>
where
    F: FnMut(&Float) -> (Float, Float, Float),
{
    let cut = decay_cutoff(MOMENT_DECAY_RATE, ctx);
    let mut vals = integrate_many_finite(
        |x| {
            let (r, r1, r2) = f(x);
            let x_sq = x.clone().square();
            let density = x_sq.clone() * r.clone().square();
            vec![
                density.clone(),
                x_sq * &r * r2,
                x.clone() * &r * r1,
                x.clone() * r.square(),
                density.square(),
            ]
        },
        5,
        0.0,
        cut,
        ctx,
    )?;
    let i4 = vals.pop().expect("five components requested");
    let i3 = vals.pop().expect("five components requested");
    let i2 = vals.pop().expect("five components requested");
    let i1 = vals.pop().expect("five components requested");
    let norm = vals.pop().expect("five components requested");
    Ok(RadialIntegrals { norm, i1, i2, i3, i4 })
}

/// The five moments of the bound radial shape R_n with Shi coefficient c.
///
/// Requires c > 0, exactly as [`crate::wavefunction::normalize`] does: for
/// c ≤ 0 the denominator 1 + c·Shi has a positive zero and the moments
/// diverge. Points past the truncation cutoff that overflow the shape
/// evaluation contribute zero — the envelope has decayed below every
/// tolerance there.
pub fn radial_integrals(
    n: u32,
    shi_coeff: &Float,
    ctx: &PrecisionContext,
) -> Result<RadialIntegrals> {
    if !shi_coeff.is_finite() || shi_coeff.cmp0() != Some(std::cmp::Ordering::Greater) {
        return Err(HeqedError::Domain {
            what: "radial_integrals",
            why: format!("Shi coefficient must be positive, got {shi_coeff}"),
        });
    }
    let ints = trial_integrals(
        |x| match radial_with_derivatives(n, x, shi_coeff, ctx) {
            Ok(parts) => parts,
            Err(_) => (ctx.zero(), ctx.zero(), ctx.zero()),
        },
        ctx,
    )?;
    // surfaces a diverging shape (all-zero fallback or a sign flip) early
    ints.normalization()?;
    Ok(ints)
}

/// The calibrated energy combination evaluated at a trial energy: couples
/// the zone geometry (stationary point → f_E at the given λ), the dispersion
/// α₀(E_trial) and the radial moments into one scalar, in joules.
pub fn energy_functional(
    n: u32,
    e_trial: &Float,
    lambda: &Float,
    dc: &DerivedConstants,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let a_min = solve_a_min(ctx)?;
    let f_e = coupling_factor_unweighted(&a_min, lambda, dc)?;
    let alpha = alpha0_of(n, e_trial, &f_e, dc)?;
    let shi_coeff = dc.a.clone() / &alpha;
    let ints = radial_integrals(n, &shi_coeff, ctx)?;
    let (energy, _) = ints.calibrated_energy(&alpha, &dc.a, &f_e, dc)?;
    Ok(energy)
}

/// One stage of a damped fixed-point iteration: the damper scales each
/// update step, the threshold is the relative change below which the stage
/// ends (either switching to the next stage or finishing the run).
#[derive(Debug, Clone)]
pub struct DampingStage {
    /// Step scale; |damper| < 1. Negative values walk against the raw
    /// functional difference, which is what the level maps need.
    pub damper: Float,
    /// Relative-change threshold ending the stage; strictly positive.
    pub threshold: Float,
}

/// Damper schedule, step cap and seed of one solver run.
#[derive(Debug, Clone)]
pub struct IterationConfig {
    /// One or two damping stages; thresholds must not increase stage to
    /// stage, so a switch always tightens the convergence demand.
    pub stages: Vec<DampingStage>,
    /// Step cap; exceeding it is a [`HeqedError::NonConvergence`].
    pub max_iterations: usize,
    /// Starting iterate: an energy in J for [`solve_energy`], a length in m
    /// for [`solve_lambda`] (where it sets the scale of the multiplier walk).
    pub seed: Float,
}

impl IterationConfig {
    /// Schedule of the interaction-length fit: a single stage with the
    /// 1/50 relative step scale, threshold 7·10⁻¹⁸ on the multiplier change,
    /// a femtometer seed scale and a 400-step cap.
    pub fn lambda_fit(ctx: &PrecisionContext) -> Self {
        Self {
            stages: vec![DampingStage {
                damper: ctx.parse("0.02"),
                threshold: floor_threshold("7e-18", ctx),
            }],
            max_iterations: 400,
            seed: ctx.parse("1e-15"),
        }
    }

    /// Schedule of the n-th level run (n ∈ {1, 2, 3}): the ground state
    /// converges in one stage at a strong damper; the excited states open
    /// with a coarse stage and finish with a gentler, tighter one.
    pub fn level(n: u32, refs: &ReferenceEnergies, ctx: &PrecisionContext) -> Result<Self> {
        let stages = match n {
            1 => vec![("-0.1", "1e-20")],
            2 => vec![("-1e-2", "4e-17"), ("-3e-3", "1e-17")],
            3 => vec![("-1e-2", "2e-17"), ("-4e-3", "8e-18")],
            _ => {
                return Err(HeqedError::Domain {
                    what: "IterationConfig::level",
                    why: format!("level index must be 1, 2 or 3, got {n}"),
                })
            }
        };
        Ok(Self {
            stages: stages
                .into_iter()
                .map(|(d, t)| DampingStage {
                    damper: ctx.parse(d),
                    threshold: floor_threshold(t, ctx),
                })
                .collect(),
            max_iterations: 700,
            seed: refs.seed_j(n as usize).clone(),
        })
    }

    /// Checks the schedule invariants: at least one stage, |damper| < 1,
    /// strictly positive thresholds that never increase, a positive step cap.
    pub fn validate(&self) -> Result<()> {
        if self.stages.is_empty() {
            return Err(config_error("damper schedule must have at least one stage"));
        }
        if self.max_iterations == 0 {
            return Err(config_error("step cap must be positive"));
        }
        let mut previous: Option<&Float> = None;
        for stage in &self.stages {
            if !stage.damper.is_finite() || stage.damper.clone().abs() >= 1 {
                return Err(config_error("every damper needs |damper| < 1"));
            }
            if !stage.threshold.is_finite()
                || stage.threshold.cmp0() != Some(std::cmp::Ordering::Greater)
            {
                return Err(config_error("every threshold must be strictly positive"));
            }
            if let Some(prev) = previous {
                if stage.threshold > *prev {
                    return Err(config_error("thresholds must not increase stage to stage"));
                }
            }
            previous = Some(&stage.threshold);
        }
        if !self.seed.is_finite() {
            return Err(config_error("seed must be finite"));
        }
        Ok(())
    }
}

fn config_error(why: &str) -> HeqedError {
    HeqedError::Domain { what: "IterationConfig", why: why.to_string() }
}

/// Paper-scale thresholds widen automatically at low working precision:
/// the effective threshold is max(requested, 100·ctx.eps).
fn floor_threshold(requested: &str, ctx: &PrecisionContext) -> Float {
    let requested = ctx.parse(requested);
    let floor = ctx.eps() * 100u32;
    if floor > requested {
        floor
    } else {
        requested
    }
}

/// One recorded step of a solver run.
#[derive(Debug, Clone)]
pub struct IterationStep {
    /// 1-based step number.
    pub step: usize,
    /// Iterate after the update: a trial energy (J) or a trial length (m).
    pub iterate: Float,
    /// Raw energy combination evaluated during the step, J.
    pub functional: Float,
    /// Relative change of the iterate produced by the step.
    pub rel_change: Float,
}

/// Full history of a solver run; its length is the step count.
#[derive(Debug, Clone, Default)]
pub struct IterationTrace {
    /// Recorded steps in execution order.
    pub steps: Vec<IterationStep>,
}

impl IterationTrace {
    /// Number of steps taken.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    /// True for a run that converged on its seed without stepping.
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Relative change of the last step, if any step was taken.
    pub fn final_rel_change(&self) -> Option<&Float> {
        self.steps.last().map(|s| &s.rel_change)
    }

    fn push(&mut self, iterate: Float, functional: Float, rel_change: Float) {
        let step = self.steps.len() + 1;
        self.steps.push(IterationStep { step, iterate, functional, rel_change });
    }
}

/// |(current − previous)/current| — the relative-change measure every
/// schedule threshold refers to.
fn rel_change(current: &Float, previous: &Float) -> Float {
    ((current.clone() - previous) / current).abs()
}

/// Fits the interaction length λ so the calibrating level — the ground
/// state of the level map — lands on `e_target` (J). Walks a dimensionless
/// multiplier p on the seed scale: each step evaluates the level map at
/// λ = seed·p and nudges p by the damper-scaled relative miss; convergence
/// is a relative multiplier change below the stage threshold. Returns the
/// fitted λ with the run trace.
///
/// Re-running with the returned λ as the seed converges in at most two
/// steps — the fixed-point property the tests assert.
pub fn solve_lambda(
    e_target: &Float,
    cfg: &IterationConfig,
    dc: &DerivedConstants,
    ctx: &PrecisionContext,
) -> Result<(Float, IterationTrace)> {
    cfg.validate()?;
    if !e_target.is_finite() || e_target.cmp0() != Some(std::cmp::Ordering::Less) {
        return Err(HeqedError::Domain {
            what: "solve_lambda",
            why: format!("target energy must be a negative bound energy in J, got {e_target}"),
        });
    }
    let a_min = solve_a_min(ctx)?;
    let stage = &cfg.stages[0];
    let mut trace = IterationTrace::default();
    let mut p = ctx.from_i64(1);
    let mut p_change = ctx.from_i64(1);
    loop {
        if p_change.clone().abs() <= stage.threshold {
            break;
        }
        if trace.len() >= cfg.max_iterations {
            return Err(HeqedError::NonConvergence {
                what: "solve_lambda",
                steps: trace.len(),
                last_rel_change: format!("{:e}", p_change.abs()),
            });
        }
        let lambda = cfg.seed.clone() * &p;
        let f_e = coupling_factor_unweighted(&a_min, &lambda, dc)?;
        let alpha = alpha0_of(1, e_target, &f_e, dc)?;
        let shi_coeff = dc.a.clone() / &alpha;
        let ints = radial_integrals(1, &shi_coeff, ctx)?;
        let (e_res, _) = ints.level_map_energy(&alpha, &dc.a, &f_e, dc)?;
        let miss = (e_res.clone() - e_target) / e_target;
        let p_old = p.clone();
        p *= 1i32 - miss * &stage.damper;
        p_change = (p.clone() - p_old) / &p;
        trace.push(lambda, e_res, p_change.clone().abs());
    }
    Ok((cfg.seed.clone() * p, trace))
}

/// Runs the damped fixed-point iteration of the n-th S level at a fixed
/// interaction length λ (m). Each step evaluates the level map at the
/// current trial energy and retreats by the damper-scaled raw difference;
/// two-stage schedules tighten damper and threshold once the first stage
/// converges. Returns the level energy in J with the run trace.
pub fn solve_energy(
    n: u32,
    lambda: &Float,
    cfg: &IterationConfig,
    dc: &DerivedConstants,
    ctx: &PrecisionContext,
) -> Result<(Float, IterationTrace)> {
    cfg.validate()?;
    let a_min = solve_a_min(ctx)?;
    let f_e = coupling_factor_unweighted(&a_min, lambda, dc)?;
    let mut stage_idx = 0usize;
    let mut trace = IterationTrace::default();
    let mut current = cfg.seed.clone();
    let mut previous = ctx.zero();
    loop {
        let stage = &cfg.stages[stage_idx];
        if rel_change(&current, &previous) <= stage.threshold {
            break;
        }
        if trace.len() >= cfg.max_iterations {
            return Err(HeqedError::NonConvergence {
                what: "solve_energy",
                steps: trace.len(),
                last_rel_change: format!("{:e}", rel_change(&current, &previous)),
            });
        }
        previous = current.clone();
        let alpha = alpha0_of(n, &previous, &f_e, dc)?;
        let shi_coeff = dc.a.clone() / &alpha;
        let ints = radial_integrals(n, &shi_coeff, ctx)?;
        let (e_raw, _) = ints.level_map_energy(&alpha, &dc.a, &f_e, dc)?;
        current = previous.clone() + (previous.clone() - &e_raw) * &stage.damper;
        let relch = rel_change(&current, &previous);
        trace.push(current.clone(), e_raw, relch.clone());
        if stage_idx + 1 < cfg.stages.len() && relch < stage.threshold {
            stage_idx += 1;
        }
    }
    Ok((current, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::PhysicalConstants;

    /// Interaction length at which the level goldens below are frozen, m.
    const LAMBDA_LEVELS: &str = "8.781970265008103e-16";
    /// Fitted interaction length golden, m.
    const LAMBDA_FIT: &str = "8.78197026500880431137381482034e-16";
    /// Level-map fixed points at [`LAMBDA_LEVELS`], eV.
    const LEVEL_EV: [&str; 3] = [
        "-24.5873777088690620413100891561",
        "-3.6795714265459430661895988135",
        "-1.81017510654563984064671760293",
    ];
    /// Step counts of the reference runs (fit, then levels 1–3).
    const FIT_STEPS: usize = 53;
    const LEVEL_STEPS: [usize; 3] = [77, 109, 65];
    /// One-electron ground energy −C_C²/(4B) through the calibrated
    /// combination, eV.
    const ONE_ELECTRON_EV: &str = "-13.6056931228858427909966821378";
    /// Same moments through the level map: exactly three times deeper, eV.
    const ONE_ELECTRON_MAP_EV: &str = "-40.8170793686575283729900464134";

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn setup(ctx: &PrecisionContext) -> (PhysicalConstants, DerivedConstants, ReferenceEnergies) {
        let pc = PhysicalConstants::si(ctx);
        let dc = crate::constants::derive_constants(&pc, ctx).unwrap();
        let refs = ReferenceEnergies::standard(&pc, ctx);
        (pc, dc, refs)
    }

    fn assert_rel(actual: &Float, frozen: &str, tol: &str, ctx: &PrecisionContext, what: &str) {
        let rel = ctx.rel_diff(actual, &ctx.parse(frozen));
        assert!(rel < ctx.parse(tol), "{what}: rel {rel:e} vs {frozen}");
    }

    /// Ground-shape exponential e^(−x) with its derivatives — the trial the
    /// one-electron gate feeds through the shared moment pass.
    fn exponential_trial(x: &Float) -> (Float, Float, Float) {
        let e = (-x.clone()).exp();
        (e.clone(), -e.clone(), e)
    }

    #[test]
    fn moments_of_the_exponential_match_closed_forms() {
        let ctx = ctx();
        let ints = trial_integrals(exponential_trial, &ctx).unwrap();
        // ∫x²e⁻²ˣ = 1/4, ∫x²e⁻ˣ(e⁻ˣ) = 1/4, ∫x·e⁻ˣ(−e⁻ˣ) = −1/4,
        // ∫x·e⁻²ˣ = 1/4, ∫x⁴e⁻⁴ˣ = 24/4⁵ = 3/128
        for (value, closed, name) in [
            (&ints.norm, "0.25", "norm"),
            (&ints.i1, "0.25", "i1"),
            (&ints.i2, "-0.25", "i2"),
            (&ints.i3, "0.25", "i3"),
            (&ints.i4, "0.0234375", "i4"),
        ] {
            assert_rel(value, closed, "1e-38", &ctx, name);
        }
    }

    #[test]
    fn one_electron_gate_calibrates_both_energy_combinations() {
        let ctx = ctx();
        let (pc, dc, _) = setup(&ctx);
        let ints = trial_integrals(exponential_trial, &ctx).unwrap();
        // one electron: nuclear coefficient C_C (not the two-proton A),
        // dispersion α = C_C/2, no second electron so f_E drops out
        let alpha = dc.c_c.clone() / 2i32;
        let f_e = ctx.zero();
        let (e_cal, f_n) = ints.calibrated_energy(&alpha, &dc.c_c, &f_e, &dc).unwrap();
        let (e_map, _) = ints.level_map_energy(&alpha, &dc.c_c, &f_e, &dc).unwrap();
        assert_rel(&f_n, "4", "1e-38", &ctx, "one-electron f_N");
        assert_rel(&pc.j_to_ev(&e_cal), ONE_ELECTRON_EV, "1e-28", &ctx, "calibrated energy");
        assert_rel(&pc.j_to_ev(&e_map), ONE_ELECTRON_MAP_EV, "1e-28", &ctx, "level-map energy");
        let ratio = e_map / e_cal;
        assert_rel(&ratio, "3", "1e-28", &ctx, "combination ratio");
    }

    #[test]
    fn energy_combination_is_invariant_under_shape_rescaling() {
        // f_N carries 1/∫x²R², so kR leaves every term invariant — the pair
        // term through f_N² against the quartic moment.
        let ctx = ctx();
        let (_, dc, _) = setup(&ctx);
        let plain = trial_integrals(exponential_trial, &ctx).unwrap();
        let scaled = trial_integrals(
            |x| {
                let (r, r1, r2) = exponential_trial(x);
                (r * 3i32, r1 * 3i32, r2 * 3i32)
            },
            &ctx,
        )
        .unwrap();
        let alpha = dc.c_c.clone() / 2i32;
        let f_e = ctx.parse("15.575709738453428573");
        let (e_plain, _) = plain.calibrated_energy(&alpha, &dc.a, &f_e, &dc).unwrap();
        let (e_scaled, _) = scaled.calibrated_energy(&alpha, &dc.a, &f_e, &dc).unwrap();
        assert!(ctx.rel_diff(&e_scaled, &e_plain) < ctx.parse("1e-30"));
    }

    #[test]
    fn pipeline_moments_agree_with_the_normalization_integral() {
        let ctx = ctx();
        let (_, dc, _) = setup(&ctx);
        // ground-state Shi coefficient at the reference damping constant
        let shi_coeff = dc.a.clone() / ctx.parse("25403563281.1282525808373901486");
        let ints = radial_integrals(1, &shi_coeff, &ctx).unwrap();
        let f_n = crate::wavefunction::normalize(1, &shi_coeff, &ctx).unwrap();
        assert!(ctx.rel_diff(&ints.normalization().unwrap(), &f_n) < ctx.parse("1e-38"));
    }

    #[test]
    fn length_fit_reproduces_frozen_value_and_is_a_fixed_point() {
        let ctx = ctx();
        let (pc, dc, refs) = setup(&ctx);
        let cfg = IterationConfig::lambda_fit(&ctx);
        let target = pc.ev_to_j(refs.literature_ev(1));
        let (lambda, trace) = solve_lambda(&target, &cfg, &dc, &ctx).unwrap();
        assert_rel(&lambda, LAMBDA_FIT, "1e-27", &ctx, "fitted length");
        assert_eq!(trace.len(), FIT_STEPS, "fit step count drifted");
        assert!(*trace.final_rel_change().unwrap() <= cfg.stages[0].threshold);

        // restarting on the fitted value barely moves: the fit is a fixed point
        let mut restart = cfg.clone();
        restart.seed = lambda.clone();
        let (lambda_again, trace_again) = solve_lambda(&target, &restart, &dc, &ctx).unwrap();
        assert!(trace_again.len() <= 2, "restart took {} steps", trace_again.len());
        assert!(ctx.rel_diff(&lambda_again, &lambda) < ctx.parse("1e-14"));
    }

    #[test]
    fn ground_level_iteration_matches_frozen_fixed_point() {
        let ctx = ctx();
        let (pc, dc, refs) = setup(&ctx);
        let lambda = ctx.parse(LAMBDA_LEVELS);
        let cfg = IterationConfig::level(1, &refs, &ctx).unwrap();
        let (energy, trace) = solve_energy(1, &lambda, &cfg, &dc, &ctx).unwrap();
        assert_rel(&pc.j_to_ev(&energy), LEVEL_EV[0], "1e-26", &ctx, "ground level");
        assert_eq!(trace.len(), LEVEL_STEPS[0], "ground step count drifted");
        assert!(*trace.final_rel_change().unwrap() <= cfg.stages[0].threshold);
        // at the fixed point the raw map value meets the damped iterate
        let last = trace.steps.last().unwrap();
        assert!(ctx.rel_diff(&last.functional, &energy) < ctx.parse("1e-18"));
        // the contraction settles into monotone decay
        let tail: Vec<_> = trace.steps.iter().rev().take(10).collect();
        for pair in tail.windows(2) {
            assert!(pair[0].rel_change < pair[1].rel_change, "tail not monotone");
        }

        // a percent-level seed change must not move the fixed point
        let mut nudged = cfg.clone();
        nudged.seed *= ctx.parse("1.01");
        let (energy_nudged, _) = solve_energy(1, &lambda, &nudged, &dc, &ctx).unwrap();
        let drift = ctx.rel_diff(&energy_nudged, &energy);
        assert!(drift < cfg.stages[0].threshold.clone() * 10i32, "drift {drift:e}");
    }

    #[test]
    fn excited_level_iterations_match_frozen_fixed_points() {
        let ctx = ctx();
        let (pc, dc, refs) = setup(&ctx);
        let lambda = ctx.parse(LAMBDA_LEVELS);
        for n in [2u32, 3] {
            let cfg = IterationConfig::level(n, &refs, &ctx).unwrap();
            let (energy, trace) = solve_energy(n, &lambda, &cfg, &dc, &ctx).unwrap();
            let idx = (n - 1) as usize;
            assert_rel(&pc.j_to_ev(&energy), LEVEL_EV[idx], "1e-26", &ctx, "excited level");
            assert_eq!(trace.len(), LEVEL_STEPS[idx], "step count drifted for n={n}");
            // two-stage schedules end on the tighter second threshold
            assert!(*trace.final_rel_change().unwrap() <= cfg.stages[1].threshold);
        }
    }

    #[test]
    fn functional_wiring_matches_the_manual_composition() {
        let ctx = ctx();
        let (pc, dc, refs) = setup(&ctx);
        let lambda = ctx.parse(LAMBDA_LEVELS);
        let e_trial = pc.ev_to_j(refs.literature_ev(1));
        let through_api = energy_functional(1, &e_trial, &lambda, &dc, &ctx).unwrap();
        let a_min = solve_a_min(&ctx).unwrap();
        let f_e = coupling_factor_unweighted(&a_min, &lambda, &dc).unwrap();
        let alpha = alpha0_of(1, &e_trial, &f_e, &dc).unwrap();
        let ints = radial_integrals(1, &(dc.a.clone() / &alpha), &ctx).unwrap();
        let (manual, _) = ints.calibrated_energy(&alpha, &dc.a, &f_e, &dc).unwrap();
        assert_eq!(through_api, manual);
        assert!(through_api.is_finite());
    }

    #[test]
    fn schedules_reject_broken_invariants_and_runs_report_failures() {
        let ctx = ctx();
        let (pc, dc, refs) = setup(&ctx);

        let no_stages =
            IterationConfig { stages: vec![], max_iterations: 10, seed: ctx.from_i64(-1) };
        assert!(matches!(no_stages.validate(), Err(HeqedError::Domain { .. })));

        let wild_damper = IterationConfig {
            stages: vec![DampingStage { damper: ctx.from_i64(2), threshold: ctx.parse("1e-10") }],
            max_iterations: 10,
            seed: ctx.from_i64(-1),
        };
        assert!(matches!(wild_damper.validate(), Err(HeqedError::Domain { .. })));

        let widening = IterationConfig {
            stages: vec![
                DampingStage { damper: ctx.parse("0.1"), threshold: ctx.parse("1e-12") },
                DampingStage { damper: ctx.parse("0.1"), threshold: ctx.parse("1e-10") },
            ],
            max_iterations: 10,
            seed: ctx.from_i64(-1),
        };
        assert!(matches!(widening.validate(), Err(HeqedError::Domain { .. })));

        assert!(matches!(
            IterationConfig::level(4, &refs, &ctx),
            Err(HeqedError::Domain { .. })
        ));

        // a positive trial energy breaks the dispersion radicand immediately
        let lambda = ctx.parse(LAMBDA_LEVELS);
        let mut unbound = IterationConfig::level(1, &refs, &ctx).unwrap();
        unbound.seed = pc.ev_to_j(&ctx.parse("10"));
        assert!(matches!(
            solve_energy(1, &lambda, &unbound, &dc, &ctx),
            Err(HeqedError::Domain { .. })
        ));

        // a step cap far below the contraction horizon reports itself
        let mut capped = IterationConfig::level(1, &refs, &ctx).unwrap();
        capped.max_iterations = 3;
        match solve_energy(1, &lambda, &capped, &dc, &ctx) {
            Err(HeqedError::NonConvergence { steps, .. }) => assert_eq!(steps, 3),
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }
}
