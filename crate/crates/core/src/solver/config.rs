//! Solver configuration and initial data.

use serde::{Deserialize, Serialize};

use crate::error::SolverError;
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::lp::norms::exponent;
use crate::random::{random_solenoidal, taylor_green};

/// Physical and numerical parameters of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Filter length `α ≥ 0`; `α = 0` is Navier–Stokes.
    pub alpha: f64,
    /// Viscosity `ν > 0`.
    #[serde(default = "default_nu")]
    pub nu: f64,
    /// Spatial dimension `n` (2 or 3).
    pub dim: usize,
    /// Points per axis `N`.
    pub size: usize,
    /// Time step of the production stepper.
    pub dt: f64,
    /// Time horizon `T`.
    pub t_final: f64,
    /// Relative tolerance on successive Picard iterates.
    #[serde(default = "default_picard_tol")]
    pub picard_tol: f64,
    #[serde(default = "default_picard_max_iter")]
    pub picard_max_iter: usize,
    /// Gauss–Legendre nodes per Duhamel interval.
    #[serde(default = "default_quadrature_nodes")]
    pub quadrature_nodes: usize,
    /// Number of time intervals carried by Picard iterates.
    #[serde(default = "default_picard_intervals")]
    pub picard_intervals: usize,
    /// Grading exponent `γ` of the Picard time nodes `t_m = T (m/M)^γ`.
    #[serde(default = "default_grading")]
    pub grading: f64,
    /// Store a field sample every this many steps (0: about 20 samples per run).
    #[serde(default)]
    pub sample_stride: usize,
    #[serde(default)]
    pub seed: u64,
    /// Besov indices of the solution space and of the auxiliary space.
    #[serde(default)]
    pub indices: BesovIndices,
}

/// `(r, p, q)` of `B^r_{p,q}` and `(s, p̃, a)` of the weighted auxiliary space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BesovIndices {
    pub r: f64,
    #[serde(with = "exponent")]
    pub p: f64,
    #[serde(with = "exponent")]
    pub q: f64,
    pub s: f64,
    #[serde(with = "exponent")]
    pub p_tilde: f64,
    pub a: f64,
}

impl Default for BesovIndices {
    fn default() -> Self {
        BesovIndices { r: 2.5, p: 2.0, q: 2.0, s: 3.0, p_tilde: 2.0, a: 0.25 }
    }
}

fn default_nu() -> f64 {
    1.0
}
fn default_picard_tol() -> f64 {
    1e-10
}
fn default_picard_max_iter() -> usize {
    50
}
fn default_quadrature_nodes() -> usize {
    16
}
fn default_picard_intervals() -> usize {
    32
}
fn default_grading() -> f64 {
    1.0
}

impl SolverConfig {
    /// Configuration with the documented defaults for everything but the
    /// grid, `α`, step and horizon.
    pub fn new(dim: usize, size: usize, alpha: f64, dt: f64, t_final: f64) -> Self {
        SolverConfig {
            alpha,
            nu: default_nu(),
            dim,
            size,
            dt,
            t_final,
            picard_tol: default_picard_tol(),
            picard_max_iter: default_picard_max_iter(),
            quadrature_nodes: default_quadrature_nodes(),
            picard_intervals: default_picard_intervals(),
            grading: default_grading(),
            sample_stride: 0,
            seed: 0,
            indices: BesovIndices::default(),
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: String| Err(SolverError::InvalidConfig(m));
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be >= 0, got {}", self.alpha));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return bad(format!("nu must be > 0, got {}", self.nu));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be > 0, got {}", self.dt));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return bad(format!("t_final must be > 0, got {}", self.t_final));
        }
        if self.picard_tol.is_nan() || self.picard_tol <= 0.0 {
            return bad(format!("picard_tol must be > 0, got {}", self.picard_tol));
        }
        if self.picard_max_iter == 0 || self.quadrature_nodes == 0 || self.picard_intervals == 0 {
            return bad("picard_max_iter, quadrature_nodes and picard_intervals must be positive".into());
        }
        if !(self.grading >= 1.0 && self.grading.is_finite()) {
            return bad(format!("grading must be >= 1, got {}", self.grading));
        }
        self.grid()?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid, SolverError> {
        Ok(Grid::new(self.dim, self.size)?)
    }

    /// Number of production steps: `⌈T/dt⌉`, with the last step shortened.
    pub fn steps(&self) -> usize {
        ((self.t_final / self.dt) - 1e-9).ceil().max(1.0) as usize
    }
}

/// Initial velocity field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    Zero,
    TaylorGreen { amplitude: f64 },
    /// Seeded random divergence-free field with `1 ≤ |k| ≤ k_max`, scaled to
    /// `L²` norm `amplitude`.
    RandomSolenoidal { amplitude: f64, k_max: f64 },
}

impl InitialCondition {
    pub fn build(&self, grid: &Grid, seed: u64) -> SpectralField {
        match *self {
            InitialCondition::Zero => SpectralField::zeros(grid, grid.dim()),
            InitialCondition::TaylorGreen { amplitude } => taylor_green(grid, amplitude).to_spectral().dealias(),
            InitialCondition::RandomSolenoidal { amplitude, k_max } => {
                random_solenoidal(seed, grid, k_max, amplitude).dealias()
            }
        }
    }

    /// Same shape with the amplitude replaced.
    pub fn with_amplitude(&self, a: f64) -> Self {
        match self {
            InitialCondition::Zero => InitialCondition::Zero,
            InitialCondition::TaylorGreen { .. } => InitialCondition::TaylorGreen { amplitude: a },
            InitialCondition::RandomSolenoidal { k_max, .. } => {
                InitialCondition::RandomSolenoidal { amplitude: a, k_max: *k_max }
            }
        }
    }
}
