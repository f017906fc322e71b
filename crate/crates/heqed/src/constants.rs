//! Exact input constants and the composite constants derived from them —
//! the single source of truth for every dimensioned symbol in the library.
//!
//! Inputs are the 2018 exact-SI values (ħ, c, e, mₑ, ε₀) for a nucleus of
//! charge Z = 2. The composite family used throughout is
//!
//! * `k_e = e²/(4πε₀)` — Coulomb coupling, J·m
//! * `B = 2mₑ/ħ²` — kinetic-to-energy conversion, 1/(J·m²)
//! * `C_C = B·k_e` — Coulomb constant in scaled form, 1/m
//! * `A = Z·C_C` — nuclear attraction constant, 1/m
//! * `Λ_WK = 2ħe⁸/(225π·mₑ⁴·c⁷·(4πε₀)⁴)` — quintic-singular vacuum
//!   polarization strength, J·m⁵
//!
//! plus the fine-structure constant α, the Compton wavelength λ_C, the Bohr
//! radius a₀, and the Schwinger field E_S for the vacuum-polarization module.

use rug::Float;

use crate::error::Result;
use crate::numerics::PrecisionContext;

/// Exact-SI input constants (2018 redefinition values).
#[derive(Debug, Clone)]
pub struct PhysicalConstants {
    /// Planck constant h, J·s (exact).
    pub h: Float,
    /// Reduced Planck constant ħ = h/2π, J·s.
    pub hbar: Float,
    /// Speed of light c, m/s (exact).
    pub c: Float,
    /// Elementary charge e, C (exact).
    pub e: Float,
    /// Electron mass mₑ, kg.
    pub m_e: Float,
    /// Vacuum permittivity ε₀, A·s/(V·m).
    pub eps0: Float,
    /// Nuclear charge number (2 for helium).
    pub z: u32,
}

impl PhysicalConstants {
    /// The frozen SI values used by every computation in this crate.
    pub fn si(ctx: &PrecisionContext) -> Self {
        let h = ctx.parse("6.62607015e-34");
        let two_pi = ctx.pi() * 2u32;
        let hbar = h.clone() / two_pi;
        Self {
            h,
            hbar,
            c: ctx.parse("299792458"),
            e: ctx.parse("1.602176634e-19"),
            m_e: ctx.parse("9.1093837015e-31"),
            eps0: ctx.parse("8.8541878128e-12"),
            z: 2,
        }
    }

    /// Converts joules to electron-volts.
    pub fn j_to_ev(&self, energy_j: &Float) -> Float {
        energy_j.clone() / &self.e
    }

    /// Converts electron-volts to joules.
    pub fn ev_to_j(&self, energy_ev: &Float) -> Float {
        energy_ev.clone() * &self.e
    }
}

/// Composite constants computed once from [`PhysicalConstants`].
#[derive(Debug, Clone)]
pub struct DerivedConstants {
    /// Coulomb coupling e²/(4πε₀), J·m.
    pub k_e: Float,
    /// 2mₑ/ħ², 1/(J·m²).
    pub b: Float,
    /// B·k_e, 1/m.
    pub c_c: Float,
    /// Z·C_C, 1/m.
    pub a: Float,
    /// Quintic vacuum-polarization strength, J·m⁵.
    pub lambda_wk: Float,
    /// Fine-structure constant k_e/(ħc), dimensionless.
    pub alpha_fs: Float,
    /// Compton wavelength h/(mₑc), m.
    pub compton: Float,
    /// Bohr radius ħ/(mₑ·c·α), m.
    pub bohr_radius: Float,
    /// Schwinger critical field mₑ²c³/(e·ħ), V/m.
    pub schwinger_field: Float,
}

/// Populates every composite constant from the exact formulas; no rounding
/// beyond the context digits.
pub fn derive_constants(pc: &PhysicalConstants, ctx: &PrecisionContext) -> Result<DerivedConstants> {
    let pi = ctx.pi();
    let four_pi_eps0 = pi.clone() * 4u32 * &pc.eps0;
    let k_e = pc.e.clone().square() / &four_pi_eps0;
    let b = pc.m_e.clone() * 2u32 / pc.hbar.clone().square();
    let c_c = b.clone() * &k_e;
    let a = c_c.clone() * pc.z;
    // 2ħe⁸ / (225π·mₑ⁴·c⁷·(4πε₀)⁴)
    let e8 = pc.e.clone().square().square().square();
    let numer = pc.hbar.clone() * 2u32 * e8;
    let denom = pi.clone()
        * 225u32
        * pc.m_e.clone().square().square()
        * pow_i(&pc.c, 7, ctx)
        * four_pi_eps0.clone().square().square();
    let lambda_wk = numer / denom;
    let alpha_fs = k_e.clone() / (pc.hbar.clone() * &pc.c);
    let compton = pc.h.clone() / (pc.m_e.clone() * &pc.c);
    let bohr_radius = pc.hbar.clone() / (pc.m_e.clone() * &pc.c * &alpha_fs);
    let schwinger_field =
        pc.m_e.clone().square() * pow_i(&pc.c, 3, ctx) / (pc.e.clone() * &pc.hbar);
    Ok(DerivedConstants {
        k_e,
        b,
        c_c,
        a,
        lambda_wk,
        alpha_fs,
        compton,
        bohr_radius,
        schwinger_field,
    })
}

/// Small positive integer power by repeated multiplication (exact shape, no
/// exp/ln round trip).
fn pow_i(x: &Float, n: u32, ctx: &PrecisionContext) -> Float {
    let mut out = ctx.from_i64(1);
    for _ in 0..n {
        out *= x;
    }
    out
}

/// Literature S-state energies and the solver seed energies.
#[derive(Debug, Clone)]
pub struct ReferenceEnergies {
    /// Literature energies for n = 1, 2, 3 in eV (all negative).
    pub literature_ev: [Float; 3],
    /// Solver seed energies for n = 1, 2, 3 in J (all negative).
    pub seeds_j: [Float; 3],
    /// Ground seed without the +2 810 881 500 Hz frequency adjustment, J.
    /// This is the energy at which the reference damping constant of the
    /// ground-state wavefunction is quoted.
    pub ground_unshifted_j: Float,
    /// Reference interaction length every level run consumes, m — the
    /// published 16-digit value of the ground-level fit.
    pub interaction_length_m: Float,
}

impl ReferenceEnergies {
    /// The frozen reference set.
    pub fn standard(pc: &PhysicalConstants, ctx: &PrecisionContext) -> Self {
        let literature_ev = [
            ctx.parse("-24.587377708894326"),
            ctx.parse("-3.679570726646890"),
            ctx.parse("-1.810188776363249"),
        ];
        // Ground seed as a photon-frequency form: (base + shift)·h.
        let base = ctx.parse("-5945204290000000");
        let shift = ctx.parse("2810881500");
        let seed1 = (base.clone() + shift) * &pc.h;
        let seeds_j = [
            seed1,
            ctx.parse("-5.895322241384048e-19"),
            ctx.parse("-2.900242160618248e-19"),
        ];
        let ground_unshifted_j = base * &pc.h;
        let interaction_length_m = ctx.parse("8.781970265008103e-16");
        Self { literature_ev, seeds_j, ground_unshifted_j, interaction_length_m }
    }

    /// Literature energy for the n-th S state (n ∈ {1,2,3}), eV.
    pub fn literature_ev(&self, n: usize) -> &Float {
        &self.literature_ev[n - 1]
    }

    /// Solver seed for the n-th S state (n ∈ {1,2,3}), J.
    pub fn seed_j(&self, n: usize) -> &Float {
        &self.seeds_j[n - 1]
    }
}
