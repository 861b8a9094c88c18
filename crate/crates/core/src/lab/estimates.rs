//! Static estimates with unnamed constants: heat smoothing, product and
//! Leibniz bounds, the stress bound, and the paraproduct block bounds.
//!
//! Each check reports the ratio `lhs / rhs` per trial; the supremum is the
//! empirical constant.

use rayon::prelude::*;
use serde_json::json;

use crate::field::{dealiased_product, SpectralField};
use crate::lab::report::{gate, ratio, CheckError, CheckReport};
use crate::lp::family::DyadicFamily;
use crate::lp::norms::{besov_norm, lp_norm_spectral, BesovIndex};
use crate::lp::paraproduct::decompose_product_block;
use crate::solver::semigroup::semigroup_apply;
use crate::solver::stress::reynolds_stress;

/// Heat-smoothing parameters: `e^{νtΔ}: B^{s₀}_{p₀,q} → B^{s₁}_{p₁,q}`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SmoothingParams {
    pub s0: f64,
    pub p0: f64,
    pub s1: f64,
    pub p1: f64,
    pub q: f64,
    #[serde(default = "one")]
    pub nu: f64,
}

fn one() -> f64 {
    1.0
}

impl SmoothingParams {
    /// `σ = s₁ − s₀ + n(1/p₀ − 1/p₁)`.
    pub fn sigma(&self, n: usize) -> f64 {
        self.s1 - self.s0 + n as f64 * (1.0 / self.p0 - 1.0 / self.p1)
    }
}

/// `t ↦ t^{σ/2} ‖e^{νtΔ}u‖_{B^{s₁}_{p₁,q}} / ‖u‖_{B^{s₀}_{p₀,q}}` on `t_grid`.
pub fn heat_smoothing_profile(
    fam: &DyadicFamily,
    u: &SpectralField,
    hp: SmoothingParams,
    t_grid: &[f64],
) -> Result<Vec<f64>, CheckError> {
    let sigma = hp.sigma(fam.grid().dim());
    let target = BesovIndex::new(hp.s1, hp.p1, hp.q)?;
    let base = besov_norm(fam, u, BesovIndex::new(hp.s0, hp.p0, hp.q)?);
    t_grid
        .par_iter()
        .map(|&t| {
            let v = semigroup_apply(u, t, hp.nu)?;
            Ok(ratio(t.powf(0.5 * sigma) * besov_norm(fam, &v, target), base))
        })
        .collect()
}

/// Sup over `t_grid` of the smoothing profile, per field.
///
/// For `σ = 0` every value must stay below `1 + 1e−10`. For `σ > 0` the
/// profile must increase on `t ≤ σ/(2νK)` (`K` the largest `|k|²` carried by
/// the field), where `d/dt log` of the weighted norm is provably nonnegative
/// for `p₁ = 2`, so that it decreases to 0 as `t → 0`.
pub fn check_heat_smoothing(
    fam: &DyadicFamily,
    fields: &[SpectralField],
    hp: SmoothingParams,
    t_grid: &[f64],
) -> Result<CheckReport, CheckError> {
    const ID: &str = "heat_smoothing";
    gate(ID, hp.s1 >= hp.s0 && hp.p1 >= hp.p0, || {
        format!("need s1 >= s0 and p1 >= p0, got s=({}, {}), p=({}, {})", hp.s0, hp.s1, hp.p0, hp.p1)
    })?;
    gate(ID, hp.p0 >= 1.0 && hp.p1.is_finite() && hp.nu > 0.0, || "need 1 <= p0 <= p1 < inf, nu > 0".into())?;
    gate(ID, !t_grid.is_empty() && t_grid.windows(2).all(|w| w[0] < w[1]) && t_grid[0] > 0.0, || {
        "time grid must be positive and increasing".into()
    })?;
    let g = fam.grid();
    let sigma = hp.sigma(g.dim());
    let mut report_notes = Vec::new();
    let mut ok = true;
    let mut ratios = Vec::with_capacity(fields.len());
    for (i, u) in fields.iter().enumerate() {
        let prof = heat_smoothing_profile(fam, u, hp, t_grid)?;
        let sup = prof.iter().copied().fold(0.0, f64::max);
        ratios.push(sup);
        if sigma == 0.0 {
            if sup > 1.0 + 1e-10 {
                ok = false;
                report_notes.push(format!("field {i}: contraction violated, {sup:.3e}"));
            }
            continue;
        }
        let k_top = (0..g.len())
            .filter(|&x| (0..u.ncomp()).any(|c| u.component(c)[x].norm() > 1e-14))
            .map(|x| g.k2(x))
            .max()
            .unwrap_or(0);
        let t_star = if k_top == 0 { f64::INFINITY } else { sigma / (2.0 * hp.nu * k_top as f64) };
        let region: Vec<f64> = t_grid.iter().zip(&prof).filter(|(t, _)| **t <= t_star).map(|(_, w)| *w).collect();
        if region.len() < 2 {
            report_notes.push(format!("field {i}: no grid points below t* = {t_star:.3e}"));
        } else if region.windows(2).any(|w| w[1] < w[0] * (1.0 - 1e-12)) {
            ok = false;
            report_notes.push(format!("field {i}: weighted norm not increasing on t <= {t_star:.3e}"));
        }
    }
    let mut report = CheckReport::new(
        ID,
        json!({"params": hp, "sigma": sigma, "t_min": t_grid[0], "t_max": t_grid[t_grid.len() - 1]}),
        fields.len(),
        ratios,
    )
    .require(ok, "profile violated its shape condition");
    report.notes.extend(report_notes);
    Ok(report)
}

/// `‖u²‖_{B^s_{p,q}} / ‖u‖²_{B^s_{p₁,q}}` under `p < p₁ ≤ 2p`,
/// `s > n(2/p₁ − 1/p)`, `s > 0`. Squares are dealiased, so they are exact for
/// fields supported in `|k_i| < N/6`.
pub fn check_product(
    fam: &DyadicFamily,
    fields: &[SpectralField],
    s: f64,
    p: f64,
    p1: f64,
    q: f64,
) -> Result<CheckReport, CheckError> {
    const ID: &str = "product";
    let n = fam.grid().dim() as f64;
    gate(ID, p < p1 && p1 <= 2.0 * p, || format!("need p < p1 <= 2p, got p={p}, p1={p1}"))?;
    gate(ID, s > 0.0 && s > n * (2.0 / p1 - 1.0 / p), || {
        format!("need s > max(0, n(2/p1 - 1/p)) = {}, got {s}", (n * (2.0 / p1 - 1.0 / p)).max(0.0))
    })?;
    let (lhs, rhs) = (BesovIndex::new(s, p, q)?, BesovIndex::new(s, p1, q)?);
    let ratios = fields
        .par_iter()
        .map(|u| {
            let sq = dealiased_product(u, u);
            ratio(besov_norm(fam, &sq, lhs), besov_norm(fam, u, rhs).powi(2))
        })
        .collect();
    Ok(CheckReport::new(ID, json!({"n": n, "s": s, "p": p, "p1": p1, "q": q}), fields.len(), ratios))
}

/// Exponents of the fractional Leibniz rule.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LeibnizParams {
    pub s: f64,
    pub p: f64,
    pub p1: f64,
    pub p2: f64,
    pub r1: f64,
    pub r2: f64,
    pub q: f64,
}

/// `‖fg‖_{B^s_{p,q}} / (‖f‖_{L^{p₁}}‖g‖_{B^s_{p₂,q}} + ‖g‖_{L^{r₁}}‖f‖_{B^s_{r₂,q}})`
/// with `1/p = 1/p₁ + 1/p₂ = 1/r₁ + 1/r₂`, `s > 0`.
pub fn check_moser(
    fam: &DyadicFamily,
    pairs: &[(SpectralField, SpectralField)],
    lp: LeibnizParams,
) -> Result<CheckReport, CheckError> {
    const ID: &str = "moser";
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    gate(ID, lp.s > 0.0, || format!("need s > 0, got {}", lp.s))?;
    for (name, v) in [("p", lp.p), ("p1", lp.p1), ("p2", lp.p2), ("r1", lp.r1), ("r2", lp.r2)] {
        gate(ID, v >= 1.0, || format!("need {name} >= 1, got {v}"))?;
    }
    gate(ID, (inv(lp.p) - inv(lp.p1) - inv(lp.p2)).abs() < 1e-12, || "need 1/p = 1/p1 + 1/p2".into())?;
    gate(ID, (inv(lp.p) - inv(lp.r1) - inv(lp.r2)).abs() < 1e-12, || "need 1/p = 1/r1 + 1/r2".into())?;
    let lhs = BesovIndex::new(lp.s, lp.p, lp.q)?;
    let (g_idx, f_idx) = (BesovIndex::new(lp.s, lp.p2, lp.q)?, BesovIndex::new(lp.s, lp.r2, lp.q)?);
    let ratios = pairs
        .par_iter()
        .map(|(f, g)| {
            let fg = dealiased_product(f, g);
            let rhs = lp_norm_spectral(f, lp.p1) * besov_norm(fam, g, g_idx)
                + lp_norm_spectral(g, lp.r1) * besov_norm(fam, f, f_idx);
            ratio(besov_norm(fam, &fg, lhs), rhs)
        })
        .collect();
    Ok(CheckReport::new(ID, serde_json::to_value(lp).unwrap_or_default(), pairs.len(), ratios))
}

/// Exponents of the stress bound `‖div τ(u)‖_{B^r_{p̄,q}} ≤ C‖u‖²_{B^r_{p,q}}`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StressParams {
    pub r: f64,
    pub p: f64,
    pub p_bar: f64,
    pub q: f64,
    pub alpha: f64,
}

/// Rejects tuples outside `r > 1`, `1 ≤ q < ∞`, `p, p̄ ∈ (1, ∞)`, `p ≤ 2p̄`,
/// `0 ≤ n(2/p − 1/p̄) < r − 1`.
pub fn stress_gate(n: usize, sp: &StressParams) -> Result<f64, CheckError> {
    const ID: &str = "tau";
    let StressParams { r, p, p_bar, q, .. } = *sp;
    let s_bar = n as f64 * (2.0 / p - 1.0 / p_bar);
    gate(ID, r > 1.0, || format!("need r > 1, got {r}"))?;
    gate(ID, (1.0..f64::INFINITY).contains(&q), || format!("need 1 <= q < inf, got {q}"))?;
    gate(ID, p > 1.0 && p.is_finite() && p_bar > 1.0 && p_bar.is_finite(), || {
        format!("need p, p_bar in (1, inf), got {p}, {p_bar}")
    })?;
    gate(ID, p <= 2.0 * p_bar, || format!("need p <= 2 p_bar, got p={p}, p_bar={p_bar}"))?;
    gate(ID, 0.0 <= s_bar && s_bar < r - 1.0, || format!("need 0 <= s_bar < r - 1, got s_bar={s_bar}, r={r}"))?;
    Ok(s_bar)
}

/// `‖div τ(u)‖_{B^r_{p̄,q}} / ‖u‖²_{B^r_{p,q}}`; zero fields are skipped.
pub fn check_tau(fam: &DyadicFamily, fields: &[SpectralField], sp: StressParams) -> Result<CheckReport, CheckError> {
    let s_bar = stress_gate(fam.grid().dim(), &sp)?;
    let (lhs, rhs) = (BesovIndex::new(sp.r, sp.p_bar, sp.q)?, BesovIndex::new(sp.r, sp.p, sp.q)?);
    let live: Vec<&SpectralField> = fields.iter().filter(|u| u.l2_norm() > 0.0).collect();
    let ratios = live
        .par_iter()
        .map(|u| {
            let div = reynolds_stress(u, sp.alpha).divergence();
            ratio(besov_norm(fam, &div, lhs), besov_norm(fam, u, rhs).powi(2))
        })
        .collect();
    let skipped = fields.len() - live.len();
    let mut report =
        CheckReport::new("tau", json!({"params": sp, "s_bar": s_bar}), fields.len(), ratios);
    if skipped > 0 {
        report = report.note(format!("{skipped} zero fields skipped"));
    }
    Ok(report)
}

/// `‖I‖_p/rhs_I`, `‖II‖_p/rhs_II`, `‖III‖_p/rhs_III` for every pair and block
/// `j ∈ j_range`. Per-scale maxima are reported; the bound asks only for a
/// constant uniform in `j`, so they are not required to agree.
pub fn check_paraproduct_bounds(
    fam: &DyadicFamily,
    pairs: &[(SpectralField, SpectralField)],
    j_range: (usize, usize),
    p: f64,
) -> Result<CheckReport, CheckError> {
    const ID: &str = "paraproduct_bounds";
    gate(ID, j_range.0 <= j_range.1 && j_range.1 <= fam.j_max(), || {
        format!("block range {:?} outside [0, {}]", j_range, fam.j_max())
    })?;
    gate(ID, p >= 1.0, || format!("need p >= 1, got {p}"))?;
    let js: Vec<usize> = (j_range.0..=j_range.1).collect();
    let per_pair: Vec<Vec<(usize, f64)>> = pairs
        .par_iter()
        .map(|(f, g)| {
            let mut out = Vec::new();
            for &j in &js {
                let b = decompose_product_block(fam, f, g, j, p)?;
                for (piece, rhs) in [(&b.i, b.rhs_i), (&b.ii, b.rhs_ii), (&b.iii, b.rhs_iii)] {
                    let lhs = lp_norm_spectral(piece, p);
                    // 0 ≤ 0 is a satisfied bound, not a trial.
                    if rhs == 0.0 && lhs <= 1e-14 {
                        continue;
                    }
                    out.push((j, ratio(lhs, rhs)));
                }
            }
            Ok(out)
        })
        .collect::<Result<_, CheckError>>()?;
    let flat: Vec<(usize, f64)> = per_pair.concat();
    let maxima = js
        .iter()
        .map(|j| flat.iter().filter(|(k, _)| k == j).map(|(_, r)| *r).fold(0.0, f64::max))
        .collect();
    let ratios = flat.iter().map(|(_, r)| *r).collect();
    let mut report = CheckReport::new(ID, json!({"j_range": [j_range.0, j_range.1], "p": p}), pairs.len(), ratios);
    report.scale_maxima = Some(maxima);
    Ok(report)
}

/// Partial sums `Σ_{k=−2}^{K} 2^{k(2−r)}` for `K = −2..=k_max`.
pub fn k2_tail_partial_sums(r: f64, k_max: i32) -> Vec<f64> {
    let mut acc = 0.0;
    (-2..=k_max)
        .map(|k| {
            acc += (k as f64 * (2.0 - r)).exp2();
            acc
        })
        .collect()
}

/// Passes when the tail sum is numerically Cauchy at `k_max`: the last term is
/// below `1e−6` of the partial sum. This holds for `r > 2` once `k_max` is
/// large enough and fails for `r ≤ 2`, where the sums grow without bound.
pub fn check_k2_tail(r: f64, k_max: i32) -> Result<CheckReport, CheckError> {
    gate("k2_tail", k_max >= 0 && r.is_finite(), || "need k_max >= 0 and finite r".into())?;
    let sums = k2_tail_partial_sums(r, k_max);
    let last = sums[sums.len() - 1];
    let step = last - sums[sums.len() - 2];
    let mut report = CheckReport::new("k2_tail", json!({"r": r, "k_max": k_max}), 1, sums)
        .require(step <= 1e-6 * last, format!("partial sums still growing: last term {step:.3e}"));
    if r > 2.0 {
        let x = (2.0 - r).exp2();
        report = report.note(format!("geometric limit {:.6e}", x.powi(-2) / (1.0 - x)));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::RealField;
    use crate::grid::Grid;
    use crate::random::{random_annulus, random_smooth, random_solenoidal};

    #[test]
    fn contraction_when_sigma_is_zero() {
        let g = Grid::new(3, 16).unwrap();
        let fam = DyadicFamily::for_grid(&g);
        let fields: Vec<_> = (0..3).map(|s| random_smooth(s, &g, 1, 7.0, 0.0)).collect();
        let hp = SmoothingParams { s0: 1.0, p0: 2.0, s1: 1.0, p1: 2.0, q: 2.0, nu: 1.0 };
        let t: Vec<f64> = (0..20).map(|i| 1e-4 * 10f64.powf(i as f64 / 5.0)).collect();
        let r = check_heat_smoothing(&fam, &fields, hp, &t).unwrap();
        assert!(r.pass && r.max_ratio <= 1.0 + 1e-10, "{r:?}");
    }

    #[test]
    fn single_block_peak_sits_at_the_closed_form_time() {
        // One mode with |k|² = 16: profile ∝ t^{σ/2} e^{−16t}, peak at t = σ/32.
        let g = Grid::new(3, 32).unwrap();
        let fam = DyadicFamily::for_grid(&g);
        let u = SpectralField::cosine_mode(&g, 1, 0, &[4, 0, 0], 1.0);
        let hp = SmoothingParams { s0: 0.0, p0: 2.0, s1: 1.0, p1: 2.0, q: 2.0, nu: 1.0 };
        let t: Vec<f64> = (1..=2000).map(|i| i as f64 * 1e-4).collect();
        let prof = heat_smoothing_profile(&fam, &u, hp, &t).unwrap();
        let arg = prof.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert!((t[arg] - 1.0 / 32.0).abs() < 1.5e-4, "{}", t[arg]);
        // Value at the peak: (σ/32)^{1/2} e^{−1/2} · 2^{2·1}.
        let want = (1.0f64 / 32.0).sqrt() * (-0.5f64).exp() * 4.0;
        assert!((prof[arg] - want).abs() < 1e-6 * want);
    }

    #[test]
    fn product_of_constants_is_exact() {
        let g = Grid::new(3, 16).unwrap();
        let fam = DyadicFamily::for_grid(&g);
        let one = RealField::from_fn(&g, 1, |_, _| 1.0).to_spectral();
        let r = check_product(&fam, &[one], 1.6, 2.0, 3.0, 2.0).unwrap();
        assert!((r.max_ratio - 1.0).abs() < 1e-14);
        assert!(check_product(&fam, &[], 0.4, 2.0, 3.0, 2.0).is_err());
        assert!(check_product(&fam, &[], 1.6, 2.0, 5.0, 2.0).is_err());
    }

    #[test]
    fn single_mode_product_matches_the_multiplier_oracle() {
        // u = cos(x): u² = 1/2 + cos(2x)/2. All norms are p = 2 here, so
        // ‖u²‖_{B^s} = ψ-weighted spectral sums of the two modes.
        let g = Grid::new(3, 32).unwrap();
        let fam = DyadicFamily::for_grid(&g);
        let u = SpectralField::cosine_mode(&g, 1, 0, &[1, 0, 0], 1.0);
        let s = 1.6;
        let idx = BesovIndex::new(s, 2.0, 2.0).unwrap();
        let mut sq = SpectralField::cosine_mode(&g, 1, 0, &[2, 0, 0], 0.5);
        sq.component_mut(0)[0] += num_complex::Complex64::new(0.5, 0.0);
        let want = besov_norm(&fam, &sq, idx);
        let got = besov_norm(&fam, &dealiased_product(&u, &u), idx);
        assert!((got - want).abs() < 1e-14);
        // Each mode sits in at most two blocks; spot-check by hand: the
        // constant lives only in the low block with weight 1.
        assert!((fam.weight(-1, 0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tau_gate_and_degenerate_fields() {
        let g = Grid::new(3, 16).unwrap();
        let fam = DyadicFamily::for_grid(&g);
        let sp = StressParams { r: 2.6, p: 2.0, p_bar: 2.0, q: 2.0, alpha: 1.0 };
        let r = check_tau(&fam, &[SpectralField::zeros(&g, 3)], sp).unwrap();
        assert!(r.ratios.is_empty() && r.pass);
        assert!(check_tau(&fam, &[], StressParams { r: 2.4, ..sp }).is_err());
        assert!(check_tau(&fam, &[], StressParams { p: 5.0, ..sp }).is_err());
        let u = random_solenoidal(1, &g, 4.0, 1.0);
        assert!(check_tau(&fam, &[u], sp).unwrap().pass);
    }

    #[test]
    fn low_pass_times_block_saturates_the_first_bound() {
        // f with spectrum in |k| ≤ 1 and g a single mode of block j: the
        // low-high piece is tight up to the block overlap.
        let g = Grid::new(3, 32).unwrap();
        let fam = DyadicFamily::for_grid(&g);
        let f = RealField::from_fn(&g, 1, |x, _| 2.0 + x[1].cos()).to_spectral();
        let j = 3;
        let h = random_annulus(5, j, &g, 1).unwrap();
        let b = decompose_product_block(&fam, &f, &h, j as usize, 2.0).unwrap();
        let r = lp_norm_spectral(&b.i, 2.0) / b.rhs_i;
        assert!(r > 0.25 && r <= 1.0, "{r}");
    }

    #[test]
    fn paraproduct_bounds_are_uniform() {
        let g = Grid::new(3, 32).unwrap();
        let fam = DyadicFamily::for_grid(&g);
        let pairs: Vec<_> =
            (0..3).map(|s| (random_smooth(s, &g, 1, 8.0, 1.0), random_smooth(s + 10, &g, 1, 8.0, 1.0))).collect();
        let r = check_paraproduct_bounds(&fam, &pairs, (0, fam.j_max()), 2.0).unwrap();
        assert!(r.pass, "{r:?}");
        let zero = SpectralField::zeros(&g, 1);
        let r = check_paraproduct_bounds(&fam, &[(zero.clone(), zero)], (0, 2), 2.0).unwrap();
        assert!(r.ratios.is_empty() && r.pass);
    }

    #[test]
    fn tail_sums_separate_the_regimes() {
        assert!(check_k2_tail(2.5, 60).unwrap().pass);
        let bad = check_k2_tail(1.5, 60).unwrap();
        assert!(!bad.pass);
        let s = &bad.ratios;
        assert!(s[s.len() - 1] > 1e4 * s[0]);
        // r = 2.5: Σ_{k≥−2} 2^{−k/2} = 2/(1 − 2^{−1/2}).
        let conv = k2_tail_partial_sums(2.5, 200);
        assert!((conv[conv.len() - 1] - 2.0 / (1.0 - 0.5f64.sqrt())).abs() < 1e-12);
    }
}
