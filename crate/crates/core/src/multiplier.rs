//! Fourier multipliers and the divergence-free projections.

use num_complex::Complex64;

use crate::error::FieldError;
use crate::field::SpectralField;
use crate::grid::Grid;

/// A real scalar symbol tabulated on every lattice point of a grid.
///
/// All symbols built here are even (`m(-k) = m(k)`), so they map real fields
/// to real fields.
#[derive(Clone, Debug)]
pub struct MultiplierSymbol {
    grid: Grid,
    weights: Vec<f64>,
}

impl MultiplierSymbol {
    /// Tabulates an arbitrary function of the lattice index.
    pub fn from_fn(grid: &Grid, f: impl Fn(usize) -> f64) -> Self {
        MultiplierSymbol { grid: grid.clone(), weights: (0..grid.len()).map(f).collect() }
    }

    /// Tabulates a radial symbol given as a function of `|k|²`.
    pub fn radial(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        let by_k2: Vec<f64> = (0..=grid.max_k2()).map(|q| f(q as f64)).collect();
        Self::from_fn(grid, |i| by_k2[grid.k2(i) as usize])
    }

    pub fn identity(grid: &Grid) -> Self {
        Self::radial(grid, |_| 1.0)
    }

    /// `Δ ↦ −|k|²`.
    pub fn laplacian(grid: &Grid) -> Self {
        Self::radial(grid, |k2| -k2)
    }

    /// `Λ^s = (−Δ)^{s/2} ↦ |k|^s`, with value 0 at `k = 0` for `s > 0`.
    pub fn fractional(grid: &Grid, s: f64) -> Self {
        Self::radial(grid, |k2| if k2 == 0.0 && s != 0.0 { 0.0 } else { k2.powf(0.5 * s) })
    }

    /// `1 − α²Δ ↦ 1 + α²|k|²`.
    pub fn helmholtz(grid: &Grid, alpha: f64) -> Self {
        Self::radial(grid, |k2| 1.0 + alpha * alpha * k2)
    }

    /// `(1 − α²Δ)^{-1} ↦ 1/(1 + α²|k|²)`.
    pub fn helmholtz_inverse(grid: &Grid, alpha: f64) -> Self {
        Self::radial(grid, |k2| 1.0 / (1.0 + alpha * alpha * k2))
    }

    /// `e^{νtΔ} ↦ e^{−νt|k|²}`.
    pub fn heat(grid: &Grid, nu_t: f64) -> Self {
        Self::radial(grid, |k2| (-nu_t * k2).exp())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Symbol value at lattice index `idx`.
    pub fn at(&self, idx: usize) -> f64 {
        self.weights[idx]
    }
}

/// Coefficientwise product `m(k)·f̂(k)` on every component.
pub fn apply_multiplier(m: &MultiplierSymbol, f: &SpectralField) -> Result<SpectralField, FieldError> {
    if m.grid != *f.grid() {
        return Err(FieldError::GridMismatch {
            expected: describe(f.grid()),
            found: describe(&m.grid),
        });
    }
    Ok(f.map_coeffs(|i, v| v * m.weights[i]))
}

fn describe(g: &Grid) -> String {
    format!("n={} N={}", g.dim(), g.size())
}

/// Applies `1/(1 + α²|k|²)` to every component.
pub fn helmholtz_inverse(f: &SpectralField, alpha: f64) -> SpectralField {
    let a2 = alpha * alpha;
    let g = f.grid().clone();
    f.map_coeffs(move |i, v| v / (1.0 + a2 * g.k2(i) as f64))
}

/// Leray projection `û ← û − k(k·û)/|k|²` of a vector field. The mean mode
/// and modes whose derivative wavevector vanishes are left unchanged.
pub fn leray_project(f: &SpectralField) -> SpectralField {
    let g = f.grid();
    let n = g.dim();
    assert!(f.is_vector(), "Leray projection needs a vector field");
    let mut out = f.clone();
    for i in 0..g.len() {
        let kd = g.derivative_wavevector(i);
        let kk: f64 = kd.iter().map(|v| v * v).sum();
        if kk == 0.0 {
            continue;
        }
        let dot: Complex64 = (0..n).map(|c| f.component(c)[i] * kd[c]).sum();
        let s = dot / kk;
        for (c, &kc) in kd.iter().enumerate() {
            out.component_mut(c)[i] -= s * kc;
        }
    }
    out
}

/// Stokes projection `w − (1 − α²Δ)^{-1}∇p`, where the pressure solves
/// `(1 − α²Δ)v + ∇p = (1 − α²Δ)w` with `div v = 0`.
///
/// On the torus this coincides with [`leray_project`]; the two are computed
/// along independent routes so that the identity is a real check.
pub fn stokes_project(f: &SpectralField, alpha: f64) -> SpectralField {
    let g = f.grid();
    let n = g.dim();
    assert!(f.is_vector(), "Stokes projection needs a vector field");
    let a2 = alpha * alpha;
    // Pressure: −|k|² p̂ = i(1 + α²|k|²)(k·ŵ).
    let pressure: Vec<Complex64> = (0..g.len())
        .map(|i| {
            let kd = g.derivative_wavevector(i);
            let kk: f64 = kd.iter().map(|v| v * v).sum();
            if kk == 0.0 {
                return Complex64::default();
            }
            let div: Complex64 = (0..n).map(|c| f.component(c)[i] * Complex64::new(0.0, kd[c])).sum();
            -div * (1.0 + a2 * g.k2(i) as f64) / kk
        })
        .collect();
    let mut out = f.clone();
    for (i, &p) in pressure.iter().enumerate() {
        let kd = g.derivative_wavevector(i);
        let h = 1.0 / (1.0 + a2 * g.k2(i) as f64);
        for (c, &kc) in kd.iter().enumerate() {
            out.component_mut(c)[i] -= Complex64::new(0.0, kc) * p * h;
        }
    }
    out
}
