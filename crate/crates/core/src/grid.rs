//! Uniform periodic grid on the torus `[0, 2π)^n` and its integer frequency
//! lattice.
//!
//! The torus carries the *normalized* measure (total mass 1), so a single
//! Fourier mode `e^{ik·x}` has unit `L^p` norm for every `p`, and Fourier
//! coefficients are `f̂(k) = mean_x f(x) e^{-ik·x}`.
//!
//! Samples are stored row-major with axis 0 (`x₁`) slowest: the flat index of
//! grid point `(i₀, i₁, i₂)` is `(i₀·N + i₁)·N + i₂`. Spectral coefficients use
//! the same layout with index `i` on an axis standing for wavenumber `i` when
//! `i < N/2` and `i − N` otherwise.

use std::sync::Arc;

use crate::error::FieldError;
use crate::fft::FftPlan;

/// Per-index wavenumber tables, built once per grid.
#[derive(Debug)]
struct Lattice {
    /// Signed wavenumbers, `dim` entries per lattice point. The Nyquist index
    /// maps to `-N/2`.
    k: Vec<i32>,
    /// `|k|²` as an integer.
    k2: Vec<u32>,
    /// Wavenumbers used by odd (derivative) symbols: the Nyquist index is
    /// zeroed so that real fields stay real.
    kd: Vec<f64>,
    /// Flat index of `-k`.
    neg: Vec<u32>,
    /// Two-thirds dealiasing mask.
    keep: Vec<bool>,
}

#[derive(Debug)]
struct GridInner {
    dim: usize,
    size: usize,
    lattice: Lattice,
    fft: FftPlan,
}

/// A periodic grid with `N` points per axis in `n` dimensions.
///
/// Cloning is cheap; wavenumber tables and FFT plans are shared.
#[derive(Clone, Debug)]
pub struct Grid {
    inner: Arc<GridInner>,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.dim() == other.dim() && self.size() == other.size())
    }
}

impl Eq for Grid {}

impl Grid {
    /// Creates a grid. `dim` must be 2 or 3 and `size` a power of two ≥ 8.
    pub fn new(dim: usize, size: usize) -> Result<Self, FieldError> {
        if !(dim == 2 || dim == 3) {
            return Err(FieldError::InvalidGrid(format!("dimension must be 2 or 3, got {dim}")));
        }
        if size < 8 || !size.is_power_of_two() {
            return Err(FieldError::InvalidGrid(format!(
                "points per axis must be a power of two >= 8, got {size}"
            )));
        }
        let lattice = Lattice::build(dim, size);
        Ok(Grid {
            inner: Arc::new(GridInner { dim, size, lattice, fft: FftPlan::new(dim, size) }),
        })
    }

    /// Spatial dimension `n`.
    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    /// Points per axis `N`.
    pub fn size(&self) -> usize {
        self.inner.size
    }

    /// Total number of grid points `N^n`.
    pub fn len(&self) -> usize {
        self.inner.lattice.k2.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nyquist(&self) -> usize {
        self.size() / 2
    }

    /// Largest dyadic index `J` with `2^{J+1} ≤ N/2`.
    pub fn max_dyadic_index(&self) -> usize {
        (self.nyquist().trailing_zeros() as usize).saturating_sub(1)
    }

    /// Largest `|k|²` on the lattice.
    pub fn max_k2(&self) -> u32 {
        (self.dim() * self.nyquist() * self.nyquist()) as u32
    }

    pub fn k2(&self, idx: usize) -> u32 {
        self.inner.lattice.k2[idx]
    }

    pub fn k2_table(&self) -> &[u32] {
        &self.inner.lattice.k2
    }

    /// Signed wavenumber vector of lattice index `idx`.
    pub fn wavevector(&self, idx: usize) -> &[i32] {
        let d = self.dim();
        &self.inner.lattice.k[idx * d..(idx + 1) * d]
    }

    /// Derivative wavenumbers (Nyquist zeroed) of lattice index `idx`.
    pub fn derivative_wavevector(&self, idx: usize) -> &[f64] {
        let d = self.dim();
        &self.inner.lattice.kd[idx * d..(idx + 1) * d]
    }

    pub(crate) fn neg_index(&self, idx: usize) -> usize {
        self.inner.lattice.neg[idx] as usize
    }

    /// Whether the two-thirds rule keeps lattice index `idx` (`3|k_i| < N` on
    /// every axis).
    pub fn dealias_keeps(&self, idx: usize) -> bool {
        self.inner.lattice.keep[idx]
    }

    /// Flat index of wavevector `k` (components reduced mod `N`).
    pub fn index_of(&self, k: &[i64]) -> usize {
        assert_eq!(k.len(), self.dim(), "wavevector dimension");
        let n = self.size() as i64;
        k.iter().fold(0usize, |acc, &ki| acc * self.size() + ki.rem_euclid(n) as usize)
    }

    /// Physical coordinates of grid point `idx`.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let n = self.size();
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let mut out = [0.0; 3];
        let mut rest = idx;
        for a in (0..self.dim()).rev() {
            out[a] = (rest % n) as f64 * h;
            rest /= n;
        }
        out
    }

    pub(crate) fn fft(&self) -> &FftPlan {
        &self.inner.fft
    }
}

impl Lattice {
    fn build(dim: usize, size: usize) -> Self {
        let total = size.pow(dim as u32);
        let half = size / 2;
        let mut k = Vec::with_capacity(total * dim);
        let mut k2 = Vec::with_capacity(total);
        let mut kd = Vec::with_capacity(total * dim);
        let mut neg = Vec::with_capacity(total);
        let mut keep = Vec::with_capacity(total);
        let mut digits = vec![0usize; dim];
        for idx in 0..total {
            let mut rest = idx;
            for a in (0..dim).rev() {
                digits[a] = rest % size;
                rest /= size;
            }
            let mut sq = 0u32;
            let mut kept = true;
            let mut neg_idx = 0usize;
            for &i in &digits {
                let signed = if i < half { i as i32 } else { i as i32 - size as i32 };
                k.push(signed);
                sq += (signed * signed) as u32;
                kd.push(if i == half { 0.0 } else { signed as f64 });
                kept &= 3 * (signed.unsigned_abs() as usize) < size;
                neg_idx = neg_idx * size + (size - i) % size;
            }
            k2.push(sq);
            neg.push(neg_idx as u32);
            keep.push(kept);
        }
        Lattice { k, k2, kd, neg, keep }
    }
}
