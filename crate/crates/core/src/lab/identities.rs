//! Exact identities of the dyadic calculus, checked to round-off: partition of
//! unity, block orthogonality, product-support cancellations, paraproduct
//! reconstruction, Bernstein equivalence and the Besov embeddings.

use rayon::prelude::*;
use serde_json::json;

use crate::field::{dealiased_product, SpectralField};
use crate::lab::report::{gate, ratio, CheckError, CheckReport};
use crate::lp::family::DyadicFamily;
use crate::lp::norms::{besov_norm, lp_norm_spectral, BesovIndex};
use crate::lp::paraproduct::bony_decomposition;
use crate::multiplier::{apply_multiplier, MultiplierSymbol};

/// `|Ψ̂(k) + Σ_j ψ̂_j(k) − 1|` over every lattice `|k|² ≤ 4^J`; passes at `1e−12`.
pub fn check_partition_of_unity(fam: &DyadicFamily) -> CheckReport {
    let g = fam.grid();
    let mut present = vec![false; g.max_k2() as usize + 1];
    for &q in g.k2_table() {
        present[q as usize] = true;
    }
    let j_max = fam.j_max() as i32;
    let ratios: Vec<f64> = (0..=fam.resolved_k2().min(g.max_k2()))
        .filter(|&q| present[q as usize])
        .map(|q| ((-1..=j_max).map(|j| fam.weight(j, q)).sum::<f64>() - 1.0).abs())
        .collect();
    let n = ratios.len();
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    CheckReport::new("partition_of_unity", json!({"n": g.dim(), "N": g.size(), "j_max": j_max}), n, ratios)
        .require(worst <= 1e-12, format!("deviation {worst:.3e} exceeds 1e-12"))
}

/// `‖Δ_jΔ_m f‖₂ / ‖f‖₂` for `|j − m| ≥ 2`; passes at `1e−12`.
pub fn check_orthogonality(fam: &DyadicFamily, fields: &[SpectralField]) -> Result<CheckReport, CheckError> {
    let top = fam.j_max() as i32;
    let per_field: Vec<Vec<f64>> = fields
        .par_iter()
        .map(|f| {
            let norm = f.l2_norm();
            let mut out = Vec::new();
            for m in -1..=top {
                let bm = fam.block(f, m)?;
                for j in -1..=top {
                    if (j - m).abs() >= 2 {
                        out.push(ratio(fam.block(&bm, j)?.l2_norm(), norm));
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_, CheckError>>()?;
    let ratios: Vec<f64> = per_field.concat();
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    let g = fam.grid();
    Ok(CheckReport::new("orthogonality", json!({"n": g.dim(), "N": g.size()}), fields.len(), ratios)
        .require(worst <= 1e-12, format!("leakage {worst:.3e} exceeds 1e-12")))
}

/// Product-support cancellations, normalized by `‖f‖₂‖g‖₂`:
/// `Δ_j(S_{k−3}f · Δ_k g) = 0` for `|j − k| ≥ 3`, and
/// `Δ_j(Δ_k f · Δ_i g) = 0` for `|i − k| ≤ 1`, `j > k + 3`.
///
/// Inputs are truncated to the two-thirds band first, so the dealiased
/// products are exact on every retained mode. Passes at `1e−10`.
pub fn check_product_support(
    fam: &DyadicFamily,
    pairs: &[(SpectralField, SpectralField)],
) -> Result<CheckReport, CheckError> {
    let top = fam.j_max() as i32;
    let per_pair: Vec<Vec<f64>> = pairs
        .par_iter()
        .map(|(f, g)| {
            let (f, g) = (f.dealias(), g.dealias());
            let scale = f.l2_norm() * g.l2_norm();
            let mut out = Vec::new();
            for k in 2..=top {
                let low = fam.s_j(&f, k - 3)?;
                let prod = dealiased_product(&low, &fam.block(&g, k)?);
                for j in -1..=top {
                    if (j - k).abs() >= 3 {
                        out.push(ratio(fam.block(&prod, j)?.l2_norm(), scale));
                    }
                }
            }
            for k in -1..=top {
                for i in (k - 1).max(-1)..=(k + 1).min(top) {
                    let prod = dealiased_product(&fam.block(&f, k)?, &fam.block(&g, i)?);
                    for j in (k + 4)..=top {
                        out.push(ratio(fam.block(&prod, j)?.l2_norm(), scale));
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_, CheckError>>()?;
    let ratios = per_pair.concat();
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    let g = fam.grid();
    Ok(CheckReport::new("product_support", json!({"n": g.dim(), "N": g.size()}), pairs.len(), ratios)
        .require(worst <= 1e-10, format!("cancellation defect {worst:.3e} exceeds 1e-10")))
}

/// `‖fg − T_f g − T_g f − R(f, g)‖₂ / ‖fg‖₂`; passes at `1e−8`.
pub fn check_reconstruction(
    fam: &DyadicFamily,
    pairs: &[(SpectralField, SpectralField)],
) -> Result<CheckReport, CheckError> {
    let ratios: Vec<f64> = pairs
        .par_iter()
        .map(|(f, g)| {
            let fg = f.to_real().pointwise_product(&g.to_real()).to_spectral();
            let bony = bony_decomposition(fam, f, g)?;
            Ok(ratio(fg.sub(&bony.sum()).l2_norm(), fg.l2_norm()))
        })
        .collect::<Result<_, CheckError>>()?;
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    let g = fam.grid();
    Ok(CheckReport::new("paraproduct_reconstruction", json!({"n": g.dim(), "N": g.size()}), pairs.len(), ratios)
        .require(worst <= 1e-8, format!("reconstruction defect {worst:.3e} exceeds 1e-8")))
}

/// `‖Λ^α f‖_q / (2^{jα + jn(1/p − 1/q)} ‖f‖_p)` for fields with spectrum in
/// the annulus of scale `j`. Passes when every ratio is positive and finite and
/// the global max/min stays below `spread_bound`.
pub fn check_bernstein(
    fields: &[(u32, SpectralField)],
    alpha: f64,
    p: f64,
    q: f64,
    spread_bound: f64,
) -> Result<CheckReport, CheckError> {
    gate("bernstein", alpha >= 0.0 && 1.0 <= p && p <= q, || {
        format!("need alpha >= 0 and 1 <= p <= q, got alpha={alpha}, p={p}, q={q}")
    })?;
    let ratios: Vec<f64> = fields
        .par_iter()
        .map(|(j, f)| {
            let n = f.grid().dim() as f64;
            let lam = apply_multiplier(&MultiplierSymbol::fractional(f.grid(), alpha), f)?;
            let inv_q = if q.is_infinite() { 0.0 } else { 1.0 / q };
            let weight = (*j as f64 * (alpha + n * (1.0 / p - inv_q))).exp2();
            Ok(lp_norm_spectral(&lam, q) / (weight * lp_norm_spectral(f, p)))
        })
        .collect::<Result<_, CheckError>>()?;
    let mut scales: Vec<u32> = fields.iter().map(|(j, _)| *j).collect();
    scales.sort_unstable();
    scales.dedup();
    let maxima = scales
        .iter()
        .map(|s| fields.iter().zip(&ratios).filter(|((j, _), _)| j == s).map(|(_, r)| *r).fold(0.0, f64::max))
        .collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    let spread = if ratios.is_empty() { 1.0 } else { hi / lo };
    Ok(CheckReport::new("bernstein", json!({"alpha": alpha, "p": p, "q": q}), fields.len(), ratios)
        .with_scales(maxima)
        .require(lo > 0.0 && spread <= spread_bound, format!("ratio spread {spread:.3e} exceeds {spread_bound}")))
}

/// Parameters of the three embedding ratios.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EmbeddingParams {
    /// `B^{β₂}_{p,q₁} ⊂ B^{β₁}_{p,q₂}` with `β₁ ≤ β₂`, `q₁ ≤ q₂`.
    pub beta1: f64,
    pub beta2: f64,
    pub q1: f64,
    pub q2: f64,
    pub p: f64,
    /// `B^{γ₁}_{p₁,q} ⊂ B^{γ₂}_{p₂,q}` with `γ₁ = γ₂ + n(1/p₁ − 1/p₂)`.
    pub gamma2: f64,
    pub p1: f64,
    pub p2: f64,
    pub q: f64,
    /// `B^s_{p,q} ⊂ L^p` with `s > 0`.
    pub s: f64,
}

/// Ratios of the three embeddings, three per field.
pub fn check_embedding(
    fam: &DyadicFamily,
    fields: &[SpectralField],
    e: EmbeddingParams,
) -> Result<CheckReport, CheckError> {
    gate("embedding", e.beta1 <= e.beta2 && e.q1 <= e.q2, || "need beta1 <= beta2 and q1 <= q2".into())?;
    gate("embedding", 1.0 <= e.p1 && e.p1 <= e.p2, || "need 1 <= p1 <= p2".into())?;
    gate("embedding", e.s > 0.0, || format!("need s > 0, got {}", e.s))?;
    let n = fam.grid().dim() as f64;
    let gamma1 = e.gamma2 + n * (1.0 / e.p1 - 1.0 / e.p2);
    let idx = |s, p, q| BesovIndex::new(s, p, q);
    let (a1, a2) = (idx(e.beta1, e.p, e.q2)?, idx(e.beta2, e.p, e.q1)?);
    let (b1, b2) = (idx(e.gamma2, e.p2, e.q)?, idx(gamma1, e.p1, e.q)?);
    let c = idx(e.s, e.p, e.q)?;
    let per: Vec<[f64; 3]> = fields
        .par_iter()
        .map(|f| {
            [
                ratio(besov_norm(fam, f, a1), besov_norm(fam, f, a2)),
                ratio(besov_norm(fam, f, b1), besov_norm(fam, f, b2)),
                ratio(lp_norm_spectral(f, e.p), besov_norm(fam, f, c)),
            ]
        })
        .collect();
    let ratios = per.iter().flatten().copied().collect();
    Ok(CheckReport::new("embedding", serde_json::to_value(e).unwrap_or_default(), fields.len(), ratios))
}
