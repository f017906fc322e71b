//! heqed — a configurable-precision model of helium S states built from a
//! QED effective-interaction zone.
//!
//! The library computes, at any requested decimal precision:
//!
//! * the smeared Wichmann–Kroll and Uehling vacuum-polarization potentials,
//! * the stationary point a_min of the interaction-zone energy and the
//!   dimensionless coupling factor f_E it induces,
//! * the effective interaction length λ (ab initio, fitted, or derived from
//!   a self-energy cutoff),
//! * a closed-form transcendental radial wavefunction family
//!   R(x) ∝ L_{n−1}(x)·sinh(x)/(x·(1 + c·Shi(x))²) with its derivatives,
//!   normalization, and densities, and
//! * the 1S₀/2S₀/3S₀ energies from a damped fixed-point iteration over a
//!   radial energy functional.
//!
//! Every quantity is cross-checked in the test suite against values frozen
//! from an independent arbitrary-precision implementation. The `examples/`
//! directory exercises each capability end to end; the thin `heqed` binary
//! exposes the same operations as subcommands.

pub mod constants;
pub mod special;
pub mod error;
pub mod numerics;
pub mod cli;
pub mod solver;
pub mod wavefunction;
pub mod zone;

pub use error::{HeqedError, Result};
pub use numerics::PrecisionContext;
