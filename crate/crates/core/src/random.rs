//! Seeded field generators: annulus-limited random fields, smooth random
//! ensembles, and the Taylor–Green vortex.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::FieldError;
use crate::field::{RealField, SpectralField};
use crate::grid::Grid;
use crate::multiplier::leray_project;

/// Random real field whose spectrum is confined to the lattice points where
/// `weight(|k|²)` is nonzero, with Gaussian coefficients scaled by `weight`.
/// The result is normalized to unit `L²` norm unless it vanishes.
pub fn random_spectral(
    seed: u64,
    grid: &Grid,
    ncomp: usize,
    weight: impl Fn(u32) -> f64,
) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let by_k2: Vec<f64> = (0..=grid.max_k2()).map(&weight).collect();
    let mut comps = Vec::with_capacity(ncomp);
    for _ in 0..ncomp {
        let raw: Vec<Complex64> = (0..grid.len())
            .map(|i| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im) * by_k2[grid.k2(i) as usize]
            })
            .collect();
        // Symmetrize so that the field is real.
        let sym = (0..grid.len()).map(|i| 0.5 * (raw[i] + raw[grid.neg_index(i)].conj())).collect();
        comps.push(sym);
    }
    let f = SpectralField::new(grid, comps).expect("sizes match by construction");
    let norm = f.l2_norm();
    if norm > 0.0 {
        f.scale(1.0 / norm)
    } else {
        f
    }
}

/// Random `n`-component field with spectrum in the open annulus
/// `2^{j−1} < |k| < 2^{j+1}`, unit `L²` norm.
pub fn random_band_limited(seed: u64, j: u32, grid: &Grid) -> Result<RealField, FieldError> {
    Ok(random_annulus(seed, j, grid, grid.dim())?.to_real())
}

/// Spectral form of [`random_band_limited`] with a chosen component count.
pub fn random_annulus(seed: u64, j: u32, grid: &Grid, ncomp: usize) -> Result<SpectralField, FieldError> {
    let hi = 1u64 << (j + 1);
    if hi > grid.nyquist() as u64 {
        return Err(FieldError::AnnulusExceedsNyquist { j, nyquist: grid.nyquist() });
    }
    let lo2 = if j == 0 { 0 } else { 1u64 << (2 * (j - 1)) };
    let hi2 = hi * hi;
    Ok(random_spectral(seed, grid, ncomp, |k2| {
        let k2 = k2 as u64;
        if k2 > lo2 && k2 < hi2 && !(j == 0 && k2 == 0) {
            1.0
        } else {
            0.0
        }
    }))
}

/// Random smooth field supported in `|k| ≤ k_max` with a spectrum decaying
/// like `(1 + |k|²)^{-decay/2}`, unit `L²` norm. The mean mode is included.
pub fn random_smooth(seed: u64, grid: &Grid, ncomp: usize, k_max: f64, decay: f64) -> SpectralField {
    let k2_max = k_max * k_max;
    random_spectral(seed, grid, ncomp, |k2| {
        let q = k2 as f64;
        if q <= k2_max {
            (1.0 + q).powf(-0.5 * decay)
        } else {
            0.0
        }
    })
}

/// Random divergence-free, mean-free velocity field supported in
/// `1 ≤ |k| ≤ k_max`, scaled to `L²` norm `amplitude`.
pub fn random_solenoidal(seed: u64, grid: &Grid, k_max: f64, amplitude: f64) -> SpectralField {
    let k2_max = k_max * k_max;
    let f = random_spectral(seed, grid, grid.dim(), |k2| {
        let q = k2 as f64;
        if q >= 1.0 && q <= k2_max {
            (1.0 + q).powf(-1.0)
        } else {
            0.0
        }
    });
    let p = leray_project(&f);
    let norm = p.l2_norm();
    if norm > 0.0 {
        p.scale(amplitude / norm)
    } else {
        p
    }
}

/// Taylor–Green vortex with peak speed `amplitude`.
///
/// In 3-D `u = A(sin x cos y cos z, −cos x sin y cos z, 0)`; in 2-D
/// `u = A(sin x cos y, −cos x sin y)`.
pub fn taylor_green(grid: &Grid, amplitude: f64) -> RealField {
    let dim = grid.dim();
    RealField::from_fn(grid, dim, move |x, c| {
        let z = if dim == 3 { x[2].cos() } else { 1.0 };
        match c {
            0 => amplitude * x[0].sin() * x[1].cos() * z,
            1 => -amplitude * x[0].cos() * x[1].sin() * z,
            _ => 0.0,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annulus_support_and_determinism() {
        let g = Grid::new(3, 32).unwrap();
        let a = random_band_limited(7, 2, &g).unwrap();
        let b = random_band_limited(7, 2, &g).unwrap();
        assert_eq!(a, b);
        let s = a.to_spectral();
        let mut seen = 0;
        for c in s.components() {
            for (i, v) in c.iter().enumerate() {
                if v.norm() > 1e-12 {
                    let k2 = g.k2(i);
                    assert!(k2 > 4 && k2 < 64, "|k|² = {k2}");
                    seen += 1;
                }
            }
        }
        assert!(seen > 100);
        assert!(random_band_limited(7, 4, &g).is_err());
        assert!(random_band_limited(7, 3, &g).is_ok());
    }

    #[test]
    fn solenoidal_fields_are_divergence_free() {
        let g = Grid::new(3, 16).unwrap();
        let u = random_solenoidal(3, &g, 4.0, 0.5);
        assert!((u.l2_norm() - 0.5).abs() < 1e-14);
        assert!(u.divergence().l2_norm() < 1e-14);
        assert!(u.hermitian_defect() < 1e-15);
    }

    #[test]
    fn taylor_green_is_divergence_free() {
        for dim in [2, 3] {
            let g = Grid::new(dim, 16).unwrap();
            let u = taylor_green(&g, 1.0).to_spectral();
            assert!(u.divergence().l2_norm() < 1e-13);
            assert!((taylor_green(&g, 1.0).max_abs() - 1.0).abs() < 1e-12);
        }
    }
}
