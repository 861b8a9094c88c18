//! Checks on solution trajectories: energy decay, the differential inequality
//! for `‖u‖^q_{B̃^r_{2,q}}`, and the exponential a priori bound.
//!
//! All three read the per-step norm records, so they see every time level of a
//! stepper run, not only the stored field samples.

use serde_json::json;

use crate::lab::report::{gate, ratio, CheckError, CheckReport};
use crate::quadrature::cumulative_simpson;
use crate::solver::trajectory::Trajectory;

/// Per-step `E(t_{i+1}) / E(t_i)` with `E = ‖u‖² + α²‖∇u‖²`. Passes when every
/// step satisfies `E(t_{i+1}) ≤ E(t_i)(1 + C·dt⁴)` and every record satisfies
/// `‖Ψ∗u‖₂ ≤ ‖u‖_{H^{1,2}}`.
pub fn check_energy_monotone(traj: &Trajectory, alpha: f64, tol_constant: f64) -> Result<CheckReport, CheckError> {
    const ID: &str = "energy_monotone";
    gate(ID, tol_constant >= 0.0, || format!("need a nonnegative tolerance constant, got {tol_constant}"))?;
    let recs = traj.records();
    let energy: Vec<f64> = recs.iter().map(|r| r.l2 * r.l2 + alpha * alpha * r.grad_l2 * r.grad_l2).collect();
    let mut ratios = Vec::with_capacity(recs.len().saturating_sub(1));
    let mut worst_excess: f64 = 0.0;
    for (i, w) in energy.windows(2).enumerate() {
        let dt = recs[i + 1].t - recs[i].t;
        let allowed = w[0] * (1.0 + tol_constant * dt.powi(4));
        worst_excess = worst_excess.max(w[1] - allowed);
        ratios.push(ratio(w[1], w[0]));
    }
    let low_ok = recs.iter().all(|r| {
        let h1 = (r.l2 * r.l2 + r.grad_l2 * r.grad_l2).sqrt();
        r.block_l2.first().is_none_or(|low| *low <= h1 * (1.0 + 1e-12))
    });
    Ok(CheckReport::new(ID, json!({"alpha": alpha, "tol_constant": tol_constant, "steps": ratios.len()}), 1, ratios)
        .require(worst_excess <= 0.0, format!("energy rose by {worst_excess:.3e} beyond the step tolerance"))
        .require(low_ok, "low-pass norm exceeded the H^{1,2} norm"))
}

/// Shared gate of the `r > 2` checks.
pub(crate) fn gate_indices(id: &str, r: f64, q: f64) -> Result<(), CheckError> {
    gate(id, r > 2.0, || format!("requires r > 2, got r={r}"))?;
    gate(id, (1.0..f64::INFINITY).contains(&q), || format!("need 1 <= q < inf, got {q}"))
}

/// Implied constant of `d/dt y ≤ C ‖u‖_{B̃^{1+n/2}_{2,q}} y` for
/// `y = ‖u‖^q_{B̃^r_{2,q}}`: `C(t_i) = max(ẏ, 0) / rhs` at interior records,
/// `ẏ` a centered difference.
pub fn check_gronwall_differential(traj: &Trajectory, r: f64, q: f64) -> Result<CheckReport, CheckError> {
    const ID: &str = "gronwall_differential";
    gate_indices(ID, r, q)?;
    let recs = traj.records();
    let n = traj.fields().first().map_or(3, |f| f.grid().dim()) as f64;
    let y: Vec<f64> = recs.iter().map(|rec| rec.besov_2q(r, q).1.powf(q)).collect();
    let top: Vec<f64> = recs.iter().map(|rec| rec.besov_2q(1.0 + 0.5 * n, q).1).collect();
    let ratios: Vec<f64> = (1..recs.len().saturating_sub(1))
        .map(|i| {
            let dy = (y[i + 1] - y[i - 1]) / (recs[i + 1].t - recs[i - 1].t);
            ratio(dy.max(0.0), top[i] * y[i])
        })
        .collect();
    Ok(CheckReport::new(ID, json!({"r": r, "q": q, "n": n}), 1, ratios))
}

/// `C_impl(t) = log(‖u(t)‖_{B^r_{2,q}} / ‖u₀‖_{B^r_{2,q}}) / ∫₀^t ‖u‖_{B^{1+n/2}_{2,q}}`
/// at every record with `t > 0`; skipped when `u₀ = 0`.
pub fn apriori_profile(traj: &Trajectory, r: f64, q: f64) -> Result<Vec<(f64, f64)>, CheckError> {
    gate_indices("apriori_bound", r, q)?;
    let recs = traj.records();
    let n = traj.fields().first().map_or(3, |f| f.grid().dim()) as f64;
    let full = |rec: &crate::solver::trajectory::NormRecord, s: f64| {
        let (lo, hi) = rec.besov_2q(s, q);
        lo + hi
    };
    let Some(first) = recs.first() else {
        return Ok(Vec::new());
    };
    let b0 = full(first, r);
    if b0 == 0.0 {
        return Ok(Vec::new());
    }
    let t: Vec<f64> = recs.iter().map(|rec| rec.t).collect();
    let top: Vec<f64> = recs.iter().map(|rec| full(rec, 1.0 + 0.5 * n)).collect();
    let integral = cumulative_simpson(&t, &top);
    Ok(recs
        .iter()
        .zip(&integral)
        .skip(1)
        .map(|(rec, int)| (rec.t, (full(rec, r) / b0).ln() / int))
        .collect())
}

/// Sup over time of `C_impl` for one run.
pub fn check_apriori_bound(traj: &Trajectory, r: f64, q: f64) -> Result<CheckReport, CheckError> {
    let prof = apriori_profile(traj, r, q)?;
    let sup = prof.iter().map(|(_, c)| *c).fold(f64::NEG_INFINITY, f64::max);
    let ratios = if prof.is_empty() { Vec::new() } else { vec![sup] };
    let mut report = CheckReport::new("apriori_bound", json!({"r": r, "q": q}), 1, ratios);
    if prof.is_empty() {
        report = report.note("zero initial data: degenerate, skipped");
    }
    Ok(report)
}

/// `sup_t C_impl` across an amplitude sweep; passes when each is finite and
/// their magnitudes lie within one order of magnitude of each other.
pub fn check_apriori_sweep(runs: &[(f64, Trajectory)], r: f64, q: f64) -> Result<CheckReport, CheckError> {
    let mut sups = Vec::with_capacity(runs.len());
    for (_, traj) in runs {
        let prof = apriori_profile(traj, r, q)?;
        if !prof.is_empty() {
            sups.push(prof.iter().map(|(_, c)| *c).fold(f64::NEG_INFINITY, f64::max));
        }
    }
    let mags: Vec<f64> = sups.iter().map(|c| c.abs()).collect();
    let lo = mags.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = mags.iter().copied().fold(0.0, f64::max);
    let spread = if mags.is_empty() || hi == 0.0 { 1.0 } else { hi / lo };
    let amps: Vec<f64> = runs.iter().map(|(a, _)| *a).collect();
    Ok(CheckReport::new("apriori_bound", json!({"r": r, "q": q, "amplitudes": amps}), runs.len(), sups)
        .require(spread < 10.0, format!("sup C_impl magnitudes spread by {spread:.3e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SpectralField;
    use crate::random::{random_solenoidal, taylor_green};
    use crate::solver::config::SolverConfig;
    use crate::solver::stepper::solve_ivp;

    fn heat_only(cfg: &SolverConfig) -> Trajectory {
        // Tiny data: the nonlinearity is negligible and the flow is the heat flow.
        let g = cfg.grid().unwrap();
        solve_ivp(&random_solenoidal(3, &g, 5.0, 1e-8), cfg).unwrap()
    }

    #[test]
    fn dissipative_runs_pass_every_dynamic_check() {
        let cfg = SolverConfig::new(3, 16, 0.5, 0.01, 0.3);
        let tr = heat_only(&cfg);
        let e = check_energy_monotone(&tr, 0.5, 1.0).unwrap();
        assert!(e.pass && e.max_ratio < 1.0);
        let gr = check_gronwall_differential(&tr, 2.5, 2.0).unwrap();
        assert!(gr.pass && gr.max_ratio == 0.0, "{:?}", gr.max_ratio);
        let ap = check_apriori_bound(&tr, 2.5, 2.0).unwrap();
        assert!(ap.pass && ap.max_ratio <= 0.0);
    }

    #[test]
    fn zero_runs_are_trivial_and_gates_reject_low_regularity() {
        let cfg = SolverConfig::new(2, 16, 1.0, 0.05, 0.2);
        let g = cfg.grid().unwrap();
        let tr = solve_ivp(&SpectralField::zeros(&g, 2), &cfg).unwrap();
        assert!(check_energy_monotone(&tr, 1.0, 1.0).unwrap().pass);
        let ap = check_apriori_bound(&tr, 2.5, 2.0).unwrap();
        assert!(ap.ratios.is_empty() && !ap.notes.is_empty());
        for r in [1.5, 2.0] {
            assert!(matches!(check_apriori_bound(&tr, r, 2.0), Err(CheckError::ParameterGate { .. })));
            assert!(matches!(check_gronwall_differential(&tr, r, 2.0), Err(CheckError::ParameterGate { .. })));
        }
    }

    #[test]
    fn taylor_green_profile_is_finite() {
        let mut cfg = SolverConfig::new(3, 16, 1.0, 0.01, 0.5);
        cfg.indices.r = 2.5;
        let g = cfg.grid().unwrap();
        let tr = solve_ivp(&taylor_green(&g, 0.2).to_spectral(), &cfg).unwrap();
        let prof = apriori_profile(&tr, 2.5, 2.0).unwrap();
        assert_eq!(prof.len(), 50);
        assert!(prof.iter().all(|(_, c)| c.is_finite()));
    }
}
