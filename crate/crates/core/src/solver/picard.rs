//! Picard iteration of the mild formulation `u = Γu₀ − G P V(u)`.
//!
//! Iterates live on the fixed time nodes `t_m = T (m/M)^γ`. Distances are
//! measured in the mixed norm
//! `‖w‖ = sup_t ‖w(t)‖_{B^r_{p,q}} + sup_{t>0} t^a ‖w(t)‖_{B^s_{p̃,q}}`,
//! and each iterate `v` must stay in the ball
//! `sup_t ‖v − Γu₀‖_{B^r_{p,q}} + sup_t t^a ‖v‖_{B^s_{p̃,q}} ≤ M`
//! with `M = 2‖Γu₀‖` unless configured otherwise.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::SolverError;
use crate::field::SpectralField;
use crate::lp::family::DyadicFamily;
use crate::lp::norms::{besov_norm, BesovIndex};
use crate::multiplier::leray_project;
use crate::solver::admissibility::check_admissible;
use crate::solver::config::SolverConfig;
use crate::solver::semigroup::{graded_nodes, semigroup_apply, DuhamelOperator};
use crate::solver::stress::nonlinearity_v;
use crate::solver::trajectory::{NormRecorder, Trajectory};

/// Relative residual above which the iteration is abandoned as divergent.
const DIVERGENCE_LIMIT: f64 = 1e3;

/// Outcome of a Picard run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardReport {
    pub iterations: usize,
    /// `‖u^{m+1} − u^m‖ / ‖Γu₀‖` in the mixed norm (0 when `Γu₀ = 0`).
    pub residuals: Vec<f64>,
    /// `residual_m / residual_{m−1}`.
    pub contraction_ratios: Vec<f64>,
    /// Ball functional of each iterate, to compare with `radius`.
    pub membership: Vec<f64>,
    pub radius: f64,
    pub horizon: f64,
    /// Mixed norm of `Γu₀`.
    pub linear_norm: f64,
    pub tolerance: f64,
    pub converged: bool,
    pub failure: Option<String>,
}

/// Mixed-norm evaluator on a fixed node set.
struct MixedNorm<'a> {
    family: &'a DyadicFamily,
    nodes: &'a [f64],
    idx_r: BesovIndex,
    idx_s: BesovIndex,
    a: f64,
}

impl MixedNorm<'_> {
    /// `(sup_t ‖w‖_{B^r}, sup_t t^a ‖w‖_{B^s})` of the per-node fields.
    fn parts(&self, w: &[SpectralField]) -> (f64, f64) {
        w.par_iter()
            .zip(self.nodes.par_iter())
            .map(|(f, &t)| {
                let r = besov_norm(self.family, f, self.idx_r);
                let s = if t > 0.0 { t.powf(self.a) * besov_norm(self.family, f, self.idx_s) } else { 0.0 };
                (r, s)
            })
            .reduce(|| (0.0, 0.0), |x, y| (x.0.max(y.0), x.1.max(y.1)))
    }

    fn norm(&self, w: &[SpectralField]) -> f64 {
        let (r, s) = self.parts(w);
        r + s
    }

    fn membership(&self, v: &[SpectralField], linear: &[SpectralField]) -> f64 {
        let diff: Vec<SpectralField> = v.par_iter().zip(linear).map(|(a, b)| a.sub(b)).collect();
        self.parts(&diff).0 + self.parts(v).1
    }
}

/// Runs the iteration with the indices in `cfg.indices` and ball radius
/// `2‖Γu₀‖`.
pub fn picard_solve(u0: &SpectralField, cfg: &SolverConfig) -> Result<(Trajectory, PicardReport), SolverError> {
    picard_solve_with_radius(u0, cfg, None)
}

/// As [`picard_solve`] with an explicit ball radius.
pub fn picard_solve_with_radius(
    u0: &SpectralField,
    cfg: &SolverConfig,
    radius: Option<f64>,
) -> Result<(Trajectory, PicardReport), SolverError> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    if *u0.grid() != grid || !u0.is_vector() {
        return Err(SolverError::InvalidConfig("initial field does not match the configured grid".into()));
    }
    let idx = cfg.indices;
    let adm = check_admissible(grid.dim(), &idx)?;
    let family = DyadicFamily::for_grid(&grid);
    let nodes = graded_nodes(cfg.t_final, cfg.picard_intervals, cfg.grading);
    let norm = MixedNorm {
        family: &family,
        nodes: &nodes,
        idx_r: BesovIndex::new(idx.r, idx.p, idx.q)?,
        idx_s: BesovIndex::new(idx.s, idx.p_tilde, idx.q)?,
        a: adm.a,
    };
    let duhamel = DuhamelOperator::new(&grid, &nodes, cfg.nu, cfg.quadrature_nodes)?;

    let u0 = u0.dealias();
    let linear: Vec<SpectralField> =
        nodes.iter().map(|&t| semigroup_apply(&u0, t, cfg.nu)).collect::<Result<_, _>>()?;
    let linear_norm = norm.norm(&linear);
    let radius = radius.unwrap_or(2.0 * linear_norm);
    let scale = if linear_norm > 0.0 { 1.0 / linear_norm } else { 0.0 };

    let mut report = PicardReport {
        iterations: 0,
        residuals: Vec::new(),
        contraction_ratios: Vec::new(),
        membership: vec![norm.membership(&linear, &linear)],
        radius,
        horizon: cfg.t_final,
        linear_norm,
        tolerance: cfg.picard_tol,
        converged: false,
        failure: None,
    };

    let mut current = linear.clone();
    while report.iterations < cfg.picard_max_iter {
        let forcing: Vec<SpectralField> =
            current.par_iter().map(|u| leray_project(&nonlinearity_v(u, cfg.alpha))).collect();
        let duh = duhamel.apply_all(&forcing);
        let next: Vec<SpectralField> = linear.par_iter().zip(&duh).map(|(l, d)| l.sub(d)).collect();
        let diff: Vec<SpectralField> = next.par_iter().zip(&current).map(|(a, b)| a.sub(b)).collect();
        let residual = norm.norm(&diff) * scale;
        report.iterations += 1;
        if let Some(&prev) = report.residuals.last() {
            report.contraction_ratios.push(if prev > 0.0 { residual / prev } else { 0.0 });
        }
        report.residuals.push(residual);
        let member = norm.membership(&next, &linear);
        report.membership.push(member);
        current = next;

        if !residual.is_finite() || residual > DIVERGENCE_LIMIT {
            report.failure = Some(format!("residual {residual:e} diverged"));
            break;
        }
        if member > radius * (1.0 + 1e-12) {
            report.failure = Some(format!("iterate left the ball: {member:e} > {radius:e}"));
            break;
        }
        if residual <= cfg.picard_tol {
            report.converged = true;
            break;
        }
    }
    if !report.converged {
        if report.failure.is_none() {
            report.failure = Some(format!("no convergence within {} iterations", cfg.picard_max_iter));
        }
        return Err(SolverError::NotConverged(Box::new(report)));
    }

    let recorder = NormRecorder::new(&grid, cfg.alpha, idx.r, idx.q);
    let mut traj = Trajectory::new();
    for (&t, u) in nodes.iter().zip(current) {
        traj.push_record(recorder.record(t, &u));
        traj.push(t, u)?;
    }
    Ok((traj, report))
}
