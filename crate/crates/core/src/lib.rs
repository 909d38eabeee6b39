//! Pseudo-spectral 2D Navier–Stokes on the periodic torus, instrumented with
//! Littlewood–Paley/Besov norm tooling and exact rational admissibility checks
//! for the parameter systems of rough-data well-posedness.
//!
//! The crate is `no_std` (with `alloc`). Every transform goes through the
//! [`fft::Fft2`] trait, so callers pick the FFT backend; [`fft::NaiveDft`] is
//! a dependency-free reference backend suitable for small grids and tests.
//!
//! Module map:
//!
//! * [`field`]: divergence-free fields on the `e_k` basis, grid transforms,
//!   stream function, random ensembles.
//! * [`besov`]: `L_p`, `H^s_p` and `B^s_{p,q}` norms via dyadic blocks,
//!   embedding and interpolation checks.
//! * [`stokes`]: the Stokes operator, its semigroup and closed-form Duhamel
//!   solves.
//! * [`nonlinear`]: the bilinear operator `B(u,v)`, its convolution oracle,
//!   trilinear forms and estimate harnesses.
//! * [`admissibility`]: exact parameter feasibility.
//! * [`solver`]: integrating-factor RK4, local Picard solve, data splitting,
//!   energy/Gronwall monitoring and the uniqueness probe.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod admissibility;
pub mod besov;
pub mod error;
pub mod fft;
pub mod field;
mod math;
pub mod nonlinear;
pub mod rational;
pub mod solver;
pub mod stokes;
pub mod timenorm;

pub use error::{Error, Result};
pub use fft::{Fft2, NaiveDft};
pub use field::{GridField, ModeIndex, ScalarGrid, Spectral, SpectralField};
pub use num_complex::Complex64;
pub use rational::Rational;

/// Version of this crate, embedded in artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
