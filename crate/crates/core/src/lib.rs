//! Pseudo-spectral LANS-α solver on the periodic torus, with a
//! Littlewood–Paley/Besov toolkit and an inequality verification harness.
//!
//! The torus `[0, 2π)^n` carries the normalized measure throughout, so a single
//! Fourier mode has unit `L^p` norm for every `p`.

mod fft;

pub mod error;
pub mod field;
pub mod grid;
pub mod lab;
pub mod lp;
pub mod multiplier;
pub mod quadrature;
pub mod random;
pub mod snapshot;
pub mod solver;

pub use error::FieldError;
pub use field::{RealField, SpectralField};
pub use grid::Grid;
pub use multiplier::{apply_multiplier, helmholtz_inverse, leray_project, stokes_project, MultiplierSymbol};
