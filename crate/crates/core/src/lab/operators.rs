//! Mapping properties of `Γ`, `V` and `G` between time-weighted and
//! time-integrated Besov spaces, evaluated on semigroup trajectories.
//!
//! For initial data `u₀` the test trajectory is `u = Γu₀` on graded nodes;
//! `V` is applied to it pointwise in time, and `G` to the projected forcing
//! `P V(Γu₀)`. Each check reports `‖output‖ / ‖input‖` in the relevant
//! functionals, one ratio per initial field.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::field::SpectralField;
use crate::lab::estimates::{stress_gate, SmoothingParams, StressParams};
use crate::lab::functionals::{integral_norm, weighted_sup};
use crate::lab::report::{gate, ratio, CheckError, CheckReport};
use crate::lp::family::DyadicFamily;
use crate::lp::norms::{besov_norm, BesovIndex};
use crate::multiplier::leray_project;
use crate::solver::semigroup::{graded_nodes, semigroup_apply, DuhamelOperator};
use crate::solver::stress::nonlinearity_v;

/// Time discretization shared by the operator checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeNodes {
    pub horizon: f64,
    pub intervals: usize,
    pub grading: f64,
    pub nu: f64,
    pub quadrature_nodes: usize,
}

impl Default for TimeNodes {
    fn default() -> Self {
        TimeNodes { horizon: 1.0, intervals: 48, grading: 3.0, nu: 1.0, quadrature_nodes: 8 }
    }
}

impl TimeNodes {
    pub fn nodes(&self) -> Vec<f64> {
        graded_nodes(self.horizon, self.intervals, self.grading)
    }
}

fn validate_nodes(id: &str, tn: &TimeNodes) -> Result<Vec<f64>, CheckError> {
    gate(id, tn.horizon > 0.0 && tn.intervals >= 2 && tn.grading >= 1.0 && tn.nu > 0.0, || {
        "need horizon > 0, intervals >= 2, grading >= 1, nu > 0".into()
    })?;
    Ok(tn.nodes())
}

fn semigroup_samples(u0: &SpectralField, nodes: &[f64], nu: f64) -> Result<Vec<SpectralField>, CheckError> {
    Ok(nodes.iter().map(|&t| semigroup_apply(u0, t, nu)).collect::<Result<_, _>>()?)
}

fn norms(fam: &DyadicFamily, fields: &[SpectralField], idx: BesovIndex) -> Vec<f64> {
    fields.par_iter().map(|f| besov_norm(fam, f, idx)).collect()
}

fn heat_gate(id: &str, hp: &SmoothingParams) -> Result<(), CheckError> {
    gate(id, hp.s0 <= hp.s1, || format!("need s0 <= s1, got {} > {}", hp.s0, hp.s1))?;
    gate(id, 1.0 <= hp.p0 && hp.p0 <= hp.p1 && hp.p1.is_finite(), || {
        format!("need 1 <= p0 <= p1 < inf, got p0={}, p1={}", hp.p0, hp.p1)
    })
}

fn per_field(
    id: &str,
    params: serde_json::Value,
    fields: &[SpectralField],
    f: impl Fn(&SpectralField) -> Result<f64, CheckError> + Sync,
) -> Result<CheckReport, CheckError> {
    let live: Vec<&SpectralField> = fields.iter().filter(|u| u.l2_norm() > 0.0).collect();
    let ratios = live.par_iter().map(|u| f(u)).collect::<Result<Vec<_>, _>>()?;
    Ok(CheckReport::new(id, params, fields.len(), ratios))
}

/// `Γ: B^{s₀}_{p₀,q} → Ċ_{σ/2; s₁,p₁,q}`:
/// `sup_t t^{σ/2}‖Γu₀(t)‖_{B^{s₁}_{p₁,q}} / ‖u₀‖_{B^{s₀}_{p₀,q}}`.
pub fn check_gamma_ct(
    fam: &DyadicFamily,
    fields: &[SpectralField],
    hp: SmoothingParams,
    tn: TimeNodes,
) -> Result<CheckReport, CheckError> {
    const ID: &str = "gamma_ct";
    heat_gate(ID, &hp)?;
    let nodes = validate_nodes(ID, &tn)?;
    let sigma = hp.sigma(fam.grid().dim());
    let (src, dst) = (BesovIndex::new(hp.s0, hp.p0, hp.q)?, BesovIndex::new(hp.s1, hp.p1, hp.q)?);
    per_field(ID, json!({"params": hp, "sigma": sigma, "nodes": tn}), fields, |u| {
        let traj = semigroup_samples(u, &nodes, tn.nu)?;
        Ok(ratio(weighted_sup(&nodes, &norms(fam, &traj, dst), 0.5 * sigma), besov_norm(fam, u, src)))
    })
}

/// `Γ: B^{s₀}_{p₀,q} → L^σ(B^{s₁}_{p₁,q})` with
/// `1/σ = (s₁ − s₀ + n/p₀ − n/p₁)/2`, on `(0, T]`.
pub fn check_gamma_lsigma(
    fam: &DyadicFamily,
    fields: &[SpectralField],
    hp: SmoothingParams,
    tn: TimeNodes,
) -> Result<CheckReport, CheckError> {
    const ID: &str = "gamma_lsigma";
    heat_gate(ID, &hp)?;
    gate(ID, hp.p0 > 1.0 && hp.q.is_finite(), || "need p0 > 1 and q < inf".into())?;
    let nodes = validate_nodes(ID, &tn)?;
    let inv = 0.5 * hp.sigma(fam.grid().dim());
    gate(ID, inv > 0.0 && inv <= 1.0, || format!("need 0 < 1/sigma <= 1, got 1/sigma = {inv}"))?;
    let sigma = 1.0 / inv;
    let (src, dst) = (BesovIndex::new(hp.s0, hp.p0, hp.q)?, BesovIndex::new(hp.s1, hp.p1, hp.q)?);
    per_field(ID, json!({"params": hp, "sigma": sigma, "nodes": tn}), fields, |u| {
        let traj = semigroup_samples(u, &nodes, tn.nu)?;
        Ok(ratio(integral_norm(&nodes, &norms(fam, &traj, dst), sigma), besov_norm(fam, u, src)))
    })
}

/// `V: Ċ_{a; s,p,q} → Ċ_{2a; s−1,p̄,q}`:
/// `‖V(u)‖_{2a; s−1,p̄,q} / ‖u‖²_{a; s,p,q}` on `u = Γu₀`, under the stress
/// parameter conditions with `r = s`.
pub fn check_v_ct(
    fam: &DyadicFamily,
    fields: &[SpectralField],
    sp: StressParams,
    a: f64,
    tn: TimeNodes,
) -> Result<CheckReport, CheckError> {
    const ID: &str = "v_ct";
    stress_gate(fam.grid().dim(), &sp).map_err(|e| regate(ID, e))?;
    gate(ID, a >= 0.0, || format!("need a >= 0, got {a}"))?;
    let nodes = validate_nodes(ID, &tn)?;
    let (src, dst) = (BesovIndex::new(sp.r, sp.p, sp.q)?, BesovIndex::new(sp.r - 1.0, sp.p_bar, sp.q)?);
    per_field(ID, json!({"params": sp, "a": a, "nodes": tn}), fields, |u| {
        let traj = semigroup_samples(u, &nodes, tn.nu)?;
        let v: Vec<SpectralField> = traj.par_iter().map(|w| nonlinearity_v(w, sp.alpha)).collect();
        let num = weighted_sup(&nodes, &norms(fam, &v, dst), 2.0 * a);
        Ok(ratio(num, weighted_sup(&nodes, &norms(fam, &traj, src), a).powi(2)))
    })
}

/// `V: L^σ(B^s_{p,q}) → L^{σ/2}(B^{s−1}_{p̄,q})` on `u = Γu₀`, `σ ≥ 2`.
pub fn check_v_lsigma(
    fam: &DyadicFamily,
    fields: &[SpectralField],
    sp: StressParams,
    sigma: f64,
    tn: TimeNodes,
) -> Result<CheckReport, CheckError> {
    const ID: &str = "v_lsigma";
    stress_gate(fam.grid().dim(), &sp).map_err(|e| regate(ID, e))?;
    gate(ID, sigma >= 2.0 && sigma.is_finite(), || format!("need 2 <= sigma < inf, got {sigma}"))?;
    let nodes = validate_nodes(ID, &tn)?;
    let (src, dst) = (BesovIndex::new(sp.r, sp.p, sp.q)?, BesovIndex::new(sp.r - 1.0, sp.p_bar, sp.q)?);
    per_field(ID, json!({"params": sp, "sigma": sigma, "nodes": tn}), fields, |u| {
        let traj = semigroup_samples(u, &nodes, tn.nu)?;
        let v: Vec<SpectralField> = traj.par_iter().map(|w| nonlinearity_v(w, sp.alpha)).collect();
        let num = integral_norm(&nodes, &norms(fam, &v, dst), 0.5 * sigma);
        Ok(ratio(num, integral_norm(&nodes, &norms(fam, &traj, src), sigma).powi(2)))
    })
}

/// Forcing `P V(Γu₀)` and its Duhamel integral on the nodes.
fn forcing_and_response(
    u0: &SpectralField,
    nodes: &[f64],
    tn: &TimeNodes,
    alpha: f64,
) -> Result<(Vec<SpectralField>, Vec<SpectralField>), CheckError> {
    let traj = semigroup_samples(u0, nodes, tn.nu)?;
    let forcing: Vec<SpectralField> = traj.par_iter().map(|w| leray_project(&nonlinearity_v(w, alpha))).collect();
    let op = DuhamelOperator::new(u0.grid(), nodes, tn.nu, tn.quadrature_nodes)?;
    let response = op.apply_all(&forcing);
    Ok((forcing, response))
}

/// `‖G g‖_{k₁; s₁,p₁,q} / ‖g‖_{k₀; s₀,p₀,q}` with `k₁ = k₀ + σ/2 − 1`,
/// `0 < σ/2 < 1`, `0 ≤ k₀ < 1`.
pub fn check_g_ct(
    fam: &DyadicFamily,
    fields: &[SpectralField],
    hp: SmoothingParams,
    k0: f64,
    alpha: f64,
    tn: TimeNodes,
) -> Result<CheckReport, CheckError> {
    const ID: &str = "g_ct";
    heat_gate(ID, &hp)?;
    let half = 0.5 * hp.sigma(fam.grid().dim());
    gate(ID, 0.0 < half && half < 1.0, || format!("need 0 < sigma/2 < 1, got {half}"))?;
    gate(ID, (0.0..1.0).contains(&k0), || format!("need 0 <= k0 < 1, got {k0}"))?;
    let k1 = k0 + half - 1.0;
    let nodes = validate_nodes(ID, &tn)?;
    let (src, dst) = (BesovIndex::new(hp.s0, hp.p0, hp.q)?, BesovIndex::new(hp.s1, hp.p1, hp.q)?);
    per_field(ID, json!({"params": hp, "k0": k0, "k1": k1, "alpha": alpha, "nodes": tn}), fields, |u| {
        let (g, gg) = forcing_and_response(u, &nodes, &tn, alpha)?;
        let num = weighted_sup(&nodes, &norms(fam, &gg, dst), k1);
        Ok(ratio(num, weighted_sup(&nodes, &norms(fam, &g, src), k0)))
    })
}

/// `G: L^{σ₀}(B^{s₀}_{p₀,q}) → L^{σ₁}(B^{s₁}_{p₁,q})` with
/// `1/σ₀ − 1/σ₁ = 1 − σ/2`, `1 < σ₀ < σ₁ < ∞`.
pub fn check_g_lsigma(
    fam: &DyadicFamily,
    fields: &[SpectralField],
    hp: SmoothingParams,
    sigma0: f64,
    alpha: f64,
    tn: TimeNodes,
) -> Result<CheckReport, CheckError> {
    const ID: &str = "g_lsigma";
    heat_gate(ID, &hp)?;
    gate(ID, hp.q.is_finite(), || "need q < inf".into())?;
    let inv1 = 1.0 / sigma0 - 1.0 + 0.5 * hp.sigma(fam.grid().dim());
    gate(ID, sigma0 > 1.0 && inv1 > 0.0 && inv1 < 1.0 / sigma0, || {
        format!("need 1 < sigma0 < sigma1 < inf, got sigma0={sigma0}, 1/sigma1={inv1}")
    })?;
    let sigma1 = 1.0 / inv1;
    let nodes = validate_nodes(ID, &tn)?;
    let (src, dst) = (BesovIndex::new(hp.s0, hp.p0, hp.q)?, BesovIndex::new(hp.s1, hp.p1, hp.q)?);
    per_field(ID, json!({"params": hp, "sigma0": sigma0, "sigma1": sigma1, "alpha": alpha, "nodes": tn}), fields, |u| {
        let (g, gg) = forcing_and_response(u, &nodes, &tn, alpha)?;
        let num = integral_norm(&nodes, &norms(fam, &gg, dst), sigma1);
        Ok(ratio(num, integral_norm(&nodes, &norms(fam, &g, src), sigma0)))
    })
}

/// `G: L^σ(B^{s₀}_{p₀,q}) → BC(B^{s₁}_{p₁,q})` with `1/σ = 1 − σ_h/2`
/// (`σ_h` the smoothing exponent) and `1/p₁ ≤ 1/σ`.
pub fn check_g_bc(
    fam: &DyadicFamily,
    fields: &[SpectralField],
    hp: SmoothingParams,
    alpha: f64,
    tn: TimeNodes,
) -> Result<CheckReport, CheckError> {
    const ID: &str = "g_bc";
    heat_gate(ID, &hp)?;
    gate(ID, hp.p0 > 1.0 && hp.q.is_finite(), || "need p0 > 1 and q < inf".into())?;
    let inv = 1.0 - 0.5 * hp.sigma(fam.grid().dim());
    gate(ID, inv > 0.0 && inv <= 1.0 && 1.0 / hp.p1 <= inv, || {
        format!("need 1/p1 <= 1/sigma <= 1 with 1/sigma = {inv}")
    })?;
    let sigma = 1.0 / inv;
    let nodes = validate_nodes(ID, &tn)?;
    let (src, dst) = (BesovIndex::new(hp.s0, hp.p0, hp.q)?, BesovIndex::new(hp.s1, hp.p1, hp.q)?);
    per_field(ID, json!({"params": hp, "sigma": sigma, "alpha": alpha, "nodes": tn}), fields, |u| {
        let (g, gg) = forcing_and_response(u, &nodes, &tn, alpha)?;
        let num = norms(fam, &gg, dst).into_iter().fold(0.0, f64::max);
        Ok(ratio(num, integral_norm(&nodes, &norms(fam, &g, src), sigma)))
    })
}

fn regate(id: &str, e: CheckError) -> CheckError {
    match e {
        CheckError::ParameterGate { reason, .. } => CheckError::ParameterGate { check_id: id.to_string(), reason },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::random::random_solenoidal;

    fn setup() -> (DyadicFamily, Vec<SpectralField>) {
        let g = Grid::new(3, 16).unwrap();
        let fam = DyadicFamily::for_grid(&g);
        let fields = (0..2).map(|s| random_solenoidal(s, &g, 5.0, 1.0)).collect();
        (fam, fields)
    }

    #[test]
    fn operator_checks_report_finite_constants() {
        let (fam, fields) = setup();
        let tn = TimeNodes { intervals: 24, ..TimeNodes::default() };
        let hp = SmoothingParams { s0: 1.0, p0: 2.0, s1: 2.0, p1: 2.0, q: 2.0, nu: 1.0 };
        let sp = StressParams { r: 2.6, p: 2.0, p_bar: 2.0, q: 2.0, alpha: 1.0 };
        for r in [
            check_gamma_ct(&fam, &fields, hp, tn).unwrap(),
            check_gamma_lsigma(&fam, &fields, SmoothingParams { s1: 1.5, ..hp }, tn).unwrap(),
            check_v_ct(&fam, &fields, sp, 0.25, tn).unwrap(),
            check_v_lsigma(&fam, &fields, sp, 4.0, tn).unwrap(),
            check_g_ct(&fam, &fields, hp, 0.0, 1.0, tn).unwrap(),
            check_g_lsigma(&fam, &fields, hp, 1.5, 1.0, tn).unwrap(),
            check_g_bc(&fam, &fields, hp, 1.0, tn).unwrap(),
        ] {
            assert!(r.pass && r.max_ratio > 0.0, "{}: {:?}", r.check_id, r.max_ratio);
        }
    }

    #[test]
    fn gamma_ct_of_a_single_mode_has_a_closed_form() {
        // u₀ = cos x (|k|² = 1, only in the low/first blocks), s₀ = s₁:
        // sup_t e^{−t} = 1 at t = 0⁺, so σ = 0 gives ratio 1.
        let g = Grid::new(3, 16).unwrap();
        let fam = DyadicFamily::for_grid(&g);
        let u = SpectralField::cosine_mode(&g, 3, 1, &[1, 0, 0], 1.0);
        let hp = SmoothingParams { s0: 1.0, p0: 2.0, s1: 1.0, p1: 2.0, q: 2.0, nu: 1.0 };
        let r = check_gamma_ct(&fam, &[u], hp, TimeNodes::default()).unwrap();
        assert!((r.max_ratio - 1.0).abs() < 1e-14, "{}", r.max_ratio);
    }

    #[test]
    fn gates_reject_out_of_range_parameters() {
        let (fam, fields) = setup();
        let tn = TimeNodes::default();
        let hp = SmoothingParams { s0: 1.0, p0: 2.0, s1: 2.0, p1: 2.0, q: 2.0, nu: 1.0 };
        assert!(check_gamma_ct(&fam, &fields, SmoothingParams { s1: 0.5, ..hp }, tn).is_err());
        assert!(check_g_ct(&fam, &fields, SmoothingParams { s1: 3.5, ..hp }, 0.0, 1.0, tn).is_err());
        assert!(check_g_lsigma(&fam, &fields, hp, 0.9, 1.0, tn).is_err());
        let sp = StressParams { r: 2.4, p: 2.0, p_bar: 2.0, q: 2.0, alpha: 1.0 };
        match check_v_ct(&fam, &fields, sp, 0.25, tn) {
            Err(CheckError::ParameterGate { check_id, .. }) => assert_eq!(check_id, "v_ct"),
            other => panic!("{other:?}"),
        }
    }
}
