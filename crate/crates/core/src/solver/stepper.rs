//! Integrating-factor Runge–Kutta time stepper.
//!
//! Writes the projected equation as `∂_t u = νΔu + N(u)` with
//! `N(u) = −P V(u)` and integrates the stiff linear part exactly through
//! `E(h) = e^{νhΔ}` (Lawson's fourth-order scheme).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::SolverError;
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::solver::config::SolverConfig;
use crate::solver::stress::projected_nonlinearity;
use crate::solver::trajectory::{NormRecorder, Trajectory};

/// `L²` norm above which a run is declared blown up.
pub const BLOW_UP_THRESHOLD: f64 = 1e6;

/// `N(u) = −P V(u)`.
pub fn projected_forcing(u: &SpectralField, alpha: f64) -> SpectralField {
    projected_nonlinearity(u, alpha)
}

struct Factors {
    half: Vec<f64>,
    full: Vec<f64>,
}

impl Factors {
    fn new(grid: &Grid, nu: f64, h: f64) -> Self {
        let table = |t: f64| (0..=grid.max_k2()).map(|q| (-nu * t * q as f64).exp()).collect();
        Factors { half: table(0.5 * h), full: table(h) }
    }
}

/// Coefficientwise `Σ_i c_i(k) · f_i(k)` where each `c_i` is a `|k|²` table
/// (or `None` for 1) scaled by a constant.
fn combine(grid: &Grid, terms: &[(&SpectralField, Option<&[f64]>, f64)]) -> SpectralField {
    let ncomp = terms[0].0.ncomp();
    let comps = (0..ncomp)
        .map(|c| {
            (0..grid.len())
                .into_par_iter()
                .map(|x| {
                    let q = grid.k2(x) as usize;
                    terms
                        .iter()
                        .map(|(f, tab, s)| f.component(c)[x] * (tab.map_or(1.0, |t| t[q]) * s))
                        .sum::<Complex64>()
                })
                .collect()
        })
        .collect();
    SpectralField::new(grid, comps).expect("sizes match")
}

/// One Lawson RK4 step of size `h`.
pub fn lawson_rk4_step(u: &SpectralField, h: f64, nu: f64, alpha: f64) -> SpectralField {
    let grid = u.grid();
    let e = Factors::new(grid, nu, h);
    let (eh, ef) = (Some(e.half.as_slice()), Some(e.full.as_slice()));
    let a = projected_forcing(u, alpha);
    let u1 = combine(grid, &[(u, eh, 1.0), (&a, eh, 0.5 * h)]);
    let b = projected_forcing(&u1, alpha);
    let u2 = combine(grid, &[(u, eh, 1.0), (&b, None, 0.5 * h)]);
    let c = projected_forcing(&u2, alpha);
    let u3 = combine(grid, &[(u, ef, 1.0), (&c, eh, h)]);
    let d = projected_forcing(&u3, alpha);
    combine(
        grid,
        &[(u, ef, 1.0), (&a, ef, h / 6.0), (&b, eh, h / 3.0), (&c, eh, h / 3.0), (&d, None, h / 6.0)],
    )
}

/// Integrates from `u0` at `t = 0` to `cfg.t_final`.
///
/// A norm record is kept for every step; fields are stored every
/// `cfg.sample_stride` steps (about 20 samples when 0) plus the final state.
pub fn solve_ivp(u0: &SpectralField, cfg: &SolverConfig) -> Result<Trajectory, SolverError> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    if *u0.grid() != grid || !u0.is_vector() {
        return Err(SolverError::InvalidConfig("initial field does not match the configured grid".into()));
    }
    let recorder = NormRecorder::new(&grid, cfg.alpha, cfg.indices.r, cfg.indices.q);
    let steps = cfg.steps();
    let stride = if cfg.sample_stride == 0 { (steps / 20).max(1) } else { cfg.sample_stride };

    let mut traj = Trajectory::new();
    let mut u = u0.clone();
    traj.push(0.0, u.clone())?;
    traj.push_record(recorder.record(0.0, &u));
    for step in 1..=steps {
        let t_prev = (step - 1) as f64 * cfg.dt;
        let t = if step == steps { cfg.t_final } else { step as f64 * cfg.dt };
        u = lawson_rk4_step(&u, t - t_prev, cfg.nu, cfg.alpha);
        let rec = recorder.record(t, &u);
        if !rec.l2.is_finite() || rec.l2 > BLOW_UP_THRESHOLD {
            return Err(SolverError::BlowUp { t, norm: rec.l2, threshold: BLOW_UP_THRESHOLD });
        }
        traj.push_record(rec);
        if step % stride == 0 || step == steps {
            traj.push(t, u.clone())?;
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::taylor_green;
    use crate::solver::semigroup::semigroup_apply;

    #[test]
    fn fused_forcing_matches_projecting_afterwards() {
        for (n, alpha) in [(3, 0.7), (3, 0.0), (2, 1.3)] {
            let g = Grid::new(n, 16).unwrap();
            let u = crate::random::random_solenoidal(5, &g, 5.0, 2.0);
            let reference = crate::multiplier::leray_project(&crate::solver::stress::nonlinearity_v(&u, alpha)).scale(-1.0);
            let err = projected_forcing(&u, alpha).sub(&reference).l2_norm();
            assert!(err <= 1e-14 * reference.l2_norm(), "n={n} alpha={alpha}: {err}");
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let cfg = SolverConfig::new(2, 16, 1.0, 0.05, 0.2);
        let g = cfg.grid().unwrap();
        let tr = solve_ivp(&SpectralField::zeros(&g, 2), &cfg).unwrap();
        assert!(tr.fields().iter().all(|f| f.l2_norm() == 0.0));
        assert_eq!(tr.records().len(), 5);
        assert!((tr.last().unwrap().0 - 0.2).abs() < 1e-15);
    }

    #[test]
    fn tiny_data_follows_the_heat_flow() {
        let mut cfg = SolverConfig::new(3, 16, 1.0, 0.01, 0.1);
        cfg.indices.r = 2.5;
        let g = cfg.grid().unwrap();
        let u0 = crate::random::random_solenoidal(9, &g, 4.0, 1e-9);
        let tr = solve_ivp(&u0, &cfg).unwrap();
        let want = semigroup_apply(&u0, 0.1, 1.0).unwrap();
        let got = tr.last().unwrap().1;
        assert!(got.sub(&want).l2_norm() <= 1e-8 * want.l2_norm());
    }

    #[test]
    fn step_halving_shows_fourth_order() {
        let g = Grid::new(2, 16).unwrap();
        let u0 = taylor_green(&g, 1.0).to_spectral().add(&crate::random::random_solenoidal(4, &g, 3.0, 1.0));
        let run = |h: f64, n: usize| (0..n).fold(u0.clone(), |u, _| lawson_rk4_step(&u, h, 0.1, 0.5));
        let reference = run(0.0125, 32);
        let e1 = run(0.1, 4).sub(&reference).l2_norm();
        let e2 = run(0.05, 8).sub(&reference).l2_norm();
        assert!(e1 / e2 > 12.0, "ratio {}", e1 / e2);
    }
}
