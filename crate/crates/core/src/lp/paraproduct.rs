//! Bony paraproduct calculus.
//!
//! With blocks indexed `j ∈ [−1, J]` (−1 the low part),
//! `T_f g = Σ_k S_{k−2}f · Δ_k g` and
//! `R(f, g) = Σ_k (Σ_{l=k−1}^{k+1} Δ_l f) · Δ_k g`.
//! For `f, g` supported in `|k| ≤ 2^J` the split `fg = T_f g + T_g f + R(f, g)`
//! is an exact regrouping of `Σ_{l,k} Δ_l f · Δ_k g`. Products are taken
//! pointwise on the grid without truncation, so the regrouping holds to
//! round-off.

use crate::error::FieldError;
use crate::field::{RealField, SpectralField};
use crate::lp::family::DyadicFamily;
use crate::lp::norms::lp_norm;

/// The three Bony pieces of a product.
#[derive(Clone, Debug)]
pub struct BonyDecomposition {
    pub t_fg: SpectralField,
    pub t_gf: SpectralField,
    pub remainder: SpectralField,
}

impl BonyDecomposition {
    pub fn sum(&self) -> SpectralField {
        self.t_fg.add(&self.t_gf).add(&self.remainder)
    }
}

/// Partial sums `S_m` in real space for `m ∈ [−1, J]`.
fn partial_sums(blocks: &[RealField]) -> Vec<RealField> {
    let mut out: Vec<RealField> = Vec::with_capacity(blocks.len());
    for b in blocks {
        let next = match out.last() {
            Some(prev) => prev.add(b),
            None => b.clone(),
        };
        out.push(next);
    }
    out
}

fn accumulate(acc: &mut Option<RealField>, term: RealField) {
    *acc = Some(match acc.take() {
        Some(a) => a.add(&term),
        None => term,
    });
}

fn zero_product(fam: &DyadicFamily, f: &SpectralField, g: &SpectralField) -> SpectralField {
    let n = if f.ncomp() == 1 { g.ncomp() } else { f.ncomp() };
    SpectralField::zeros(fam.grid(), n)
}

/// `Σ_{k} S_{k−2}a · Δ_k b` over `k ∈ ks`, in real space.
fn low_high(s_a: &[RealField], b: &[RealField], ks: impl Iterator<Item = i32>) -> Option<RealField> {
    let mut acc = None;
    for k in ks {
        if k - 2 < -1 {
            continue;
        }
        let term = s_a[(k - 2 + 1) as usize].pointwise_product(&b[(k + 1) as usize]);
        accumulate(&mut acc, term);
    }
    acc
}

/// `Σ_k (Σ_{l=k−1}^{k+1} Δ_l a) · Δ_k b` over `k ∈ ks`, in real space.
fn high_high(a: &[RealField], b: &[RealField], ks: impl Iterator<Item = i32>) -> Option<RealField> {
    let top = a.len() as i32 - 2;
    let mut acc = None;
    for k in ks {
        for l in (k - 1).max(-1)..=(k + 1).min(top) {
            accumulate(&mut acc, a[(l + 1) as usize].pointwise_product(&b[(k + 1) as usize]));
        }
    }
    acc
}

fn finish(acc: Option<RealField>, zero: &SpectralField) -> SpectralField {
    acc.map(|r| r.to_spectral()).unwrap_or_else(|| zero.clone())
}

/// `T_f g`, `T_g f` and `R(f, g)` together.
pub fn bony_decomposition(
    fam: &DyadicFamily,
    f: &SpectralField,
    g: &SpectralField,
) -> Result<BonyDecomposition, FieldError> {
    let fb = fam.real_blocks(f)?;
    let gb = fam.real_blocks(g)?;
    let (sf, sg) = (partial_sums(&fb), partial_sums(&gb));
    let zero = zero_product(fam, f, g);
    let ks = || -1..=fam.j_max() as i32;
    Ok(BonyDecomposition {
        t_fg: finish(low_high(&sf, &gb, ks()), &zero),
        t_gf: finish(low_high(&sg, &fb, ks()), &zero),
        remainder: finish(high_high(&fb, &gb, ks()), &zero),
    })
}

/// Paraproduct `T_f g`.
pub fn paraproduct_t(fam: &DyadicFamily, f: &SpectralField, g: &SpectralField) -> Result<SpectralField, FieldError> {
    let fb = fam.real_blocks(f)?;
    let gb = fam.real_blocks(g)?;
    Ok(finish(low_high(&partial_sums(&fb), &gb, -1..=fam.j_max() as i32), &zero_product(fam, f, g)))
}

/// Remainder `R(f, g)`.
pub fn remainder_r(fam: &DyadicFamily, f: &SpectralField, g: &SpectralField) -> Result<SpectralField, FieldError> {
    let fb = fam.real_blocks(f)?;
    let gb = fam.real_blocks(g)?;
    Ok(finish(high_high(&fb, &gb, -1..=fam.j_max() as i32), &zero_product(fam, f, g)))
}

/// `Δ_j(fg) = I + II + III` together with the right-hand sides of the block
/// bounds.
///
/// `I = Σ_k Δ_j(S_{k−2}f Δ_k g)`, `II` the same with `f, g` swapped and
/// `III = Σ_k Δ_j(Δ_k g Σ_{l=k−1}^{k+1} Δ_l f)`. With smooth cutoffs whose
/// annuli overlap, the terms with `k > j + 2` in `I, II` do not vanish, so the
/// sums run over every `k`; the part coming from `k > j + 2` is reported in
/// `i_tail` / `ii_tail`. Every `k < j − 2` term of `I, II` and `k < j − 3` term
/// of `III` vanishes by support.
#[derive(Clone, Debug)]
pub struct ProductBlock {
    pub j: usize,
    pub i: SpectralField,
    pub ii: SpectralField,
    pub iii: SpectralField,
    pub i_tail: SpectralField,
    pub ii_tail: SpectralField,
    /// `Σ_{k ≥ j−2} ‖S_{k−2}f‖_∞ ‖Δ_k g‖_p`.
    pub rhs_i: f64,
    /// `Σ_{k ≥ j−2} ‖S_{k−2}g‖_∞ ‖Δ_k f‖_p`.
    pub rhs_ii: f64,
    /// `Σ_{k ≥ j−3} Σ_{l=k−1}^{k+1} ‖Δ_k g‖_p ‖Δ_l f‖_∞`.
    pub rhs_iii: f64,
    /// Same as `rhs_i` restricted to `|j − k| ≤ 2`.
    pub rhs_i_core: f64,
    pub rhs_ii_core: f64,
}

impl ProductBlock {
    pub fn sum(&self) -> SpectralField {
        self.i.add(&self.ii).add(&self.iii)
    }
}

pub fn decompose_product_block(
    fam: &DyadicFamily,
    f: &SpectralField,
    g: &SpectralField,
    j: usize,
    p: f64,
) -> Result<ProductBlock, FieldError> {
    if j > fam.j_max() {
        return Err(FieldError::DyadicIndexOutOfRange { j: j as i32, min: 0, j_max: fam.j_max() });
    }
    let fb = fam.real_blocks(f)?;
    let gb = fam.real_blocks(g)?;
    let (sf, sg) = (partial_sums(&fb), partial_sums(&gb));
    let zero = zero_product(fam, f, g);
    let top = fam.j_max() as i32;
    let ji = j as i32;
    let block = |acc: Option<RealField>| fam.block(&finish(acc, &zero), ji);
    let core = || (ji - 2).max(-1)..=(ji + 2).min(top);
    let tail = || (ji + 3)..=top;

    let i_core = block(low_high(&sf, &gb, core()))?;
    let i_tail = block(low_high(&sf, &gb, tail()))?;
    let ii_core = block(low_high(&sg, &fb, core()))?;
    let ii_tail = block(low_high(&sg, &fb, tail()))?;
    let iii = block(high_high(&fb, &gb, (ji - 3).max(-1)..=top))?;

    let sup = |v: &[RealField]| v.iter().map(|b| lp_norm(b, f64::INFINITY)).collect::<Vec<_>>();
    let lpn = |v: &[RealField]| v.iter().map(|b| lp_norm(b, p)).collect::<Vec<_>>();
    let (sf_inf, sg_inf, f_inf) = (sup(&sf), sup(&sg), sup(&fb));
    let (f_p, g_p) = (lpn(&fb), lpn(&gb));
    let at = |v: &[f64], k: i32| v[(k + 1) as usize];
    let low_high_rhs = |s_inf: &[f64], b_p: &[f64], ks: std::ops::RangeInclusive<i32>| {
        ks.filter(|k| k - 2 >= -1).map(|k| at(s_inf, k - 2) * at(b_p, k)).sum::<f64>()
    };
    let all = || (ji - 2).max(-1)..=top;
    let rhs_iii = ((ji - 3).max(-1)..=top)
        .map(|k| ((k - 1).max(-1)..=(k + 1).min(top)).map(|l| at(&g_p, k) * at(&f_inf, l)).sum::<f64>())
        .sum();

    Ok(ProductBlock {
        j,
        i: i_core.add(&i_tail),
        ii: ii_core.add(&ii_tail),
        iii,
        i_tail,
        ii_tail,
        rhs_i: low_high_rhs(&sf_inf, &g_p, all()),
        rhs_ii: low_high_rhs(&sg_inf, &f_p, all()),
        rhs_iii,
        rhs_i_core: low_high_rhs(&sf_inf, &g_p, core()),
        rhs_ii_core: low_high_rhs(&sg_inf, &f_p, core()),
    })
}
