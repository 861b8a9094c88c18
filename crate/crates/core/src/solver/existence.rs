//! Empirical existence time: the longest horizon on which the Picard
//! iteration converges, found by bisection.

use serde::{Deserialize, Serialize};

use crate::error::SolverError;
use crate::field::SpectralField;
use crate::lp::family::DyadicFamily;
use crate::lp::norms::{besov_norm, BesovIndex};
use crate::solver::config::{InitialCondition, SolverConfig};
use crate::solver::picard::picard_solve;

/// Bisection controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExistenceSearch {
    /// Largest horizon tried; reaching it stands in for `T = ∞`.
    pub t_max: f64,
    pub bisection_steps: usize,
}

impl Default for ExistenceSearch {
    fn default() -> Self {
        ExistenceSearch { t_max: 4.0, bisection_steps: 8 }
    }
}

/// One row of the existence-time table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExistenceRow {
    pub amplitude: f64,
    /// `‖u₀‖_{B^r_{p,q}}`.
    pub data_norm: f64,
    /// Largest horizon certified by a converged Picard run.
    pub certified_t: f64,
    /// Whether `certified_t` hit `t_max`.
    pub capped: bool,
}

fn converges(u0: &SpectralField, cfg: &SolverConfig, t: f64) -> Result<bool, SolverError> {
    let mut c = cfg.clone();
    c.t_final = t;
    match picard_solve(u0, &c) {
        Ok(_) => Ok(true),
        Err(SolverError::NotConverged(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Certified horizon for one initial field.
pub fn certified_horizon(u0: &SpectralField, cfg: &SolverConfig, search: ExistenceSearch) -> Result<(f64, bool), SolverError> {
    if converges(u0, cfg, search.t_max)? {
        return Ok((search.t_max, true));
    }
    let (mut lo, mut hi) = (0.0, search.t_max);
    for _ in 0..search.bisection_steps {
        let mid = 0.5 * (lo + hi);
        if converges(u0, cfg, mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, false))
}

/// Existence-time table over an amplitude sweep of one initial-data shape.
pub fn estimate_existence_time(
    amplitudes: &[f64],
    shape: &InitialCondition,
    cfg: &SolverConfig,
    search: ExistenceSearch,
) -> Result<Vec<ExistenceRow>, SolverError> {
    cfg.validate()?;
    if search.t_max.is_nan() || search.t_max <= 0.0 {
        return Err(SolverError::InvalidConfig("t_max must be positive".into()));
    }
    let grid = cfg.grid()?;
    let family = DyadicFamily::for_grid(&grid);
    let idx = BesovIndex::new(cfg.indices.r, cfg.indices.p, cfg.indices.q)?;
    amplitudes
        .iter()
        .map(|&amplitude| {
            let u0 = shape.with_amplitude(amplitude).build(&grid, cfg.seed);
            let (certified_t, capped) = certified_horizon(&u0, cfg, search)?;
            Ok(ExistenceRow { amplitude, data_norm: besov_norm(&family, &u0, idx), certified_t, capped })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_amplitude_hits_the_cap() {
        let cfg = SolverConfig::new(2, 16, 1.0, 0.01, 1.0);
        let mut cfg = cfg;
        cfg.indices = crate::solver::config::BesovIndices { r: 1.5, p: 2.0, q: 2.0, s: 2.0, p_tilde: 2.0, a: 0.25 };
        let rows = estimate_existence_time(
            &[0.0],
            &InitialCondition::TaylorGreen { amplitude: 1.0 },
            &cfg,
            ExistenceSearch { t_max: 2.0, bisection_steps: 3 },
        )
        .unwrap();
        assert_eq!(rows[0].certified_t, 2.0);
        assert!(rows[0].capped);
        assert_eq!(rows[0].data_norm, 0.0);
    }
}
