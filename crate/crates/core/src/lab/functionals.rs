//! Time-weighted and time-integrated Besov functionals of a trajectory.
//!
//! `‖f‖_{a;s,p,q} = sup_t t^a ‖f(t)‖_{B^s_{p,q}}` and
//! `‖f‖_{L^σ(B^s_{p,q})} = (∫ ‖f(t)‖^σ_{B^s_{p,q}} dt)^{1/σ}`, both over the
//! trajectory's own samples; the integral uses composite Simpson.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::FieldError;
use crate::lp::family::DyadicFamily;
use crate::lp::norms::{besov_norm, BesovIndex};
use crate::quadrature::simpson;
use crate::solver::trajectory::Trajectory;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalKind {
    SupWeighted,
    Integral,
}

/// A sup-weighted (`a ≥ 0`) or integral (`σ ≥ 1`) functional.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeFunctional {
    pub kind: FunctionalKind,
    pub exponent: f64,
    pub idx: BesovIndex,
}

impl TimeFunctional {
    pub fn sup_weighted(a: f64, idx: BesovIndex) -> Result<Self, FieldError> {
        idx.validate()?;
        if !(a >= 0.0 && a.is_finite()) {
            return Err(FieldError::InvalidExponent(format!("time weight must be >= 0, got {a}")));
        }
        Ok(TimeFunctional { kind: FunctionalKind::SupWeighted, exponent: a, idx })
    }

    pub fn integral(sigma: f64, idx: BesovIndex) -> Result<Self, FieldError> {
        idx.validate()?;
        if !(sigma >= 1.0 && sigma.is_finite()) {
            return Err(FieldError::InvalidExponent(format!("integrability must be >= 1, got {sigma}")));
        }
        Ok(TimeFunctional { kind: FunctionalKind::Integral, exponent: sigma, idx })
    }

    pub fn evaluate(&self, traj: &Trajectory) -> f64 {
        match self.kind {
            FunctionalKind::SupWeighted => ct_norm(traj, self.exponent, self.idx),
            FunctionalKind::Integral => lsigma_norm(traj, self.exponent, self.idx),
        }
    }
}

/// Besov norms of every stored sample.
pub fn sample_norms(traj: &Trajectory, idx: BesovIndex) -> Vec<f64> {
    let Some((_, first)) = traj.last() else {
        return Vec::new();
    };
    let fam = DyadicFamily::for_grid(first.grid());
    traj.fields().par_iter().map(|f| besov_norm(&fam, f, idx)).collect()
}

/// `sup_t t^a ‖f(t)‖`. A sample at `t = 0` counts with weight 1 when `a = 0`
/// and is skipped otherwise. Negative `a` is accepted for the operator checks
/// whose target weight can be negative.
pub fn ct_norm(traj: &Trajectory, a: f64, idx: BesovIndex) -> f64 {
    weighted_sup(traj.times(), &sample_norms(traj, idx), a)
}

pub(crate) fn weighted_sup(times: &[f64], norms: &[f64], a: f64) -> f64 {
    times
        .iter()
        .zip(norms)
        .filter(|(t, _)| **t > 0.0 || a == 0.0)
        .map(|(t, v)| if a == 0.0 { *v } else { t.powf(a) * v })
        .fold(0.0, f64::max)
}

/// `(∫ ‖f(t)‖^σ dt)^{1/σ}` over the sample span.
pub fn lsigma_norm(traj: &Trajectory, sigma: f64, idx: BesovIndex) -> f64 {
    integral_norm(traj.times(), &sample_norms(traj, idx), sigma)
}

pub(crate) fn integral_norm(times: &[f64], norms: &[f64], sigma: f64) -> f64 {
    if times.len() < 2 {
        return 0.0;
    }
    let y: Vec<f64> = norms.iter().map(|v| v.powf(sigma)).collect();
    simpson(times, &y).max(0.0).powf(1.0 / sigma)
}
