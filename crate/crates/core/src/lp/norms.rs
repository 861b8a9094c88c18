//! `L^p` and Besov norms.
//!
//! `‖f‖_{B^s_{p,q}} = ‖Ψ∗f‖_p + ‖f‖_{B̃^s_{p,q}}` with
//! `‖f‖_{B̃^s_{p,q}} = ‖(2^{js}‖Δ_j f‖_p)_{j=0..J}‖_{ℓ^q}`. For `p = 2` the block
//! norms come straight from the spectrum by Parseval; otherwise each block is
//! transformed back and integrated on the grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::FieldError;
use crate::field::{RealField, SpectralField};
use crate::lp::family::DyadicFamily;

/// Regularity `s`, integrability `p` and summability `q` of a Besov space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovIndex {
    pub s: f64,
    #[serde(with = "exponent")]
    pub p: f64,
    #[serde(with = "exponent")]
    pub q: f64,
}

impl BesovIndex {
    pub fn new(s: f64, p: f64, q: f64) -> Result<Self, FieldError> {
        let idx = BesovIndex { s, p, q };
        idx.validate()?;
        Ok(idx)
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        if !self.s.is_finite() {
            return Err(FieldError::InvalidExponent(format!("regularity must be finite, got {}", self.s)));
        }
        for (name, v) in [("p", self.p), ("q", self.q)] {
            if v.is_nan() || v < 1.0 {
                return Err(FieldError::InvalidExponent(format!("{name} must lie in [1, inf], got {v}")));
            }
        }
        Ok(())
    }
}

/// Serde helpers for exponents in `[1, ∞]`: finite values are numbers,
/// infinity is the string `"inf"`.
pub mod exponent {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => Ok(f64::INFINITY),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {t:?}"))),
        }
    }
}

/// `(mean_x |f(x)|^p)^{1/p}` with the Euclidean norm over components;
/// `p = ∞` is the grid maximum.
pub fn lp_norm(f: &RealField, p: f64) -> f64 {
    let len = f.grid().len();
    let mag2 = |i: usize| f.components().iter().map(|c| c[i] * c[i]).sum::<f64>();
    if p.is_infinite() {
        return (0..len).into_par_iter().map(mag2).reduce(|| 0.0, f64::max).sqrt();
    }
    // Scale by the maximum to keep large p well conditioned.
    let peak = (0..len).into_par_iter().map(mag2).reduce(|| 0.0, f64::max).sqrt();
    if peak == 0.0 {
        return 0.0;
    }
    let sum: f64 = (0..len).into_par_iter().map(|i| (mag2(i).sqrt() / peak).powf(p)).sum();
    peak * (sum / len as f64).powf(1.0 / p)
}

/// `L^p` norm of a spectral field (Parseval for `p = 2`).
pub fn lp_norm_spectral(f: &SpectralField, p: f64) -> f64 {
    if p == 2.0 {
        f.l2_norm()
    } else {
        lp_norm(&f.to_real(), p)
    }
}

/// `ℓ^q` norm of a finite sequence.
pub fn lq_sum(values: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        values.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else {
        values.iter().map(|v| v.abs().powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// Spectral energy `Σ |f̂(k)|²` grouped by `|k|²`.
pub fn energy_by_k2(f: &SpectralField) -> Vec<f64> {
    let g = f.grid();
    let mut out = vec![0.0; g.max_k2() as usize + 1];
    for c in f.components() {
        for (i, v) in c.iter().enumerate() {
            out[g.k2(i) as usize] += v.norm_sqr();
        }
    }
    out
}

/// `[‖Ψ∗f‖_p, ‖Δ_0 f‖_p, …, ‖Δ_J f‖_p]`.
pub fn block_norms(fam: &DyadicFamily, f: &SpectralField, p: f64) -> Vec<f64> {
    warn_unresolved(fam, f);
    if p == 2.0 {
        let e = energy_by_k2(f);
        return block_norms_l2_from_energy(fam, &e);
    }
    fam.real_blocks(f).expect("grid checked by caller").iter().map(|b| lp_norm(b, p)).collect()
}

/// `L²` block norms from the output of [`energy_by_k2`].
pub fn block_norms_l2_from_energy(fam: &DyadicFamily, energy: &[f64]) -> Vec<f64> {
    (-1..=fam.j_max() as i32)
        .map(|j| {
            let t = fam.table(j);
            energy.iter().zip(t).map(|(e, w)| e * w * w).sum::<f64>().sqrt()
        })
        .collect()
}

fn warn_unresolved(fam: &DyadicFamily, f: &SpectralField) {
    let frac = fam.unresolved_fraction(f);
    if frac > 1e-20 {
        log::debug!("{:.3e} of the L2 mass lies beyond the resolved dyadic range", frac);
    }
}

/// `(‖Ψ∗f‖_p, ‖f‖_{B̃^s_{p,q}})` from precomputed block norms.
pub fn besov_parts(block_norms: &[f64], idx: BesovIndex) -> (f64, f64) {
    let weighted: Vec<f64> =
        block_norms[1..].iter().enumerate().map(|(j, v)| (j as f64 * idx.s).exp2() * v).collect();
    (block_norms[0], lq_sum(&weighted, idx.q))
}

/// `‖f‖_{B^s_{p,q}}`.
pub fn besov_norm(fam: &DyadicFamily, f: &SpectralField, idx: BesovIndex) -> f64 {
    let (low, high) = besov_parts(&block_norms(fam, f, idx.p), idx);
    low + high
}

/// Homogeneous part `‖f‖_{B̃^s_{p,q}}` (dyadic blocks only).
pub fn besov_tilde(fam: &DyadicFamily, f: &SpectralField, idx: BesovIndex) -> f64 {
    besov_parts(&block_norms(fam, f, idx.p), idx).1
}

/// One JSON-lines record of a Besov norm evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub field_id: String,
    pub s: f64,
    #[serde(with = "exponent")]
    pub p: f64,
    #[serde(with = "exponent")]
    pub q: f64,
    pub value: f64,
    /// `(j, 2^{js}‖Δ_j f‖_p)` for `j ≥ 0`.
    pub per_block: Vec<(usize, f64)>,
}

pub fn norm_report(fam: &DyadicFamily, f: &SpectralField, idx: BesovIndex, field_id: &str) -> NormReport {
    let blocks = block_norms(fam, f, idx.p);
    let (low, high) = besov_parts(&blocks, idx);
    NormReport {
        field_id: field_id.to_string(),
        s: idx.s,
        p: idx.p,
        q: idx.q,
        value: low + high,
        per_block: blocks[1..].iter().enumerate().map(|(j, v)| (j, (j as f64 * idx.s).exp2() * v)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn lp_of_constants_and_modes() {
        let g = Grid::new(3, 16).unwrap();
        let one = RealField::from_fn(&g, 1, |_, _| 1.0);
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert!((lp_norm(&one, p) - 1.0).abs() < 1e-14);
        }
        let c = RealField::from_fn(&g, 1, |x, _| x[0].cos());
        assert!((lp_norm(&c, 2.0) - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((lp_norm(&c, f64::INFINITY) - 1.0).abs() < 1e-14);
        // Complex mode e^{ix}: |f| = 1 everywhere, stored as (cos, sin) components.
        let e = RealField::from_fn(&g, 2, |x, c| if c == 0 { x[0].cos() } else { x[0].sin() });
        assert!((lp_norm(&e, 2.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn besov_of_constant_zero_and_single_block() {
        let g = Grid::new(3, 32).unwrap();
        let fam = DyadicFamily::for_grid(&g);
        let one = RealField::from_fn(&g, 1, |_, _| 1.0).to_spectral();
        for (s, p, q) in [(0.5, 2.0, 2.0), (3.0, 1.0, f64::INFINITY), (-1.0, 4.0, 1.0)] {
            let idx = BesovIndex::new(s, p, q).unwrap();
            assert!((besov_norm(&fam, &one, idx) - 1.0).abs() < 1e-13);
            assert_eq!(besov_norm(&fam, &SpectralField::zeros(&g, 3), idx), 0.0);
        }
        let c = SpectralField::cosine_mode(&g, 1, 0, &[4, 0, 0], 1.0);
        for q in [1.0, 2.0, f64::INFINITY] {
            let v = besov_norm(&fam, &c, BesovIndex::new(0.75, 2.0, q).unwrap());
            assert!((v - 2.0).abs() < 1e-13, "q={q}: {v}");
        }
    }

    #[test]
    fn exponent_serde_accepts_inf() {
        let idx: BesovIndex = serde_json::from_str(r#"{"s":1.0,"p":2,"q":"inf"}"#).unwrap();
        assert!(idx.q.is_infinite());
        let back = serde_json::to_string(&idx).unwrap();
        assert!(back.contains("\"inf\""));
        assert!(BesovIndex::new(1.0, 0.5, 2.0).is_err());
    }
}
