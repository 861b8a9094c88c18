//! Real and spectral multi-component fields on a [`Grid`].
//!
//! A *vector* field has `n` components; scalar fields have one and rank-2
//! tensor fields `n²` (row-major, component `i·n + j` holds `T_ij`). Spectral
//! coefficients are normalized so that `f(x) = Σ_k f̂(k) e^{ik·x}`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::FieldError;
use crate::grid::Grid;

/// Real samples of a field, one `Vec` per component.
#[derive(Clone, Debug, PartialEq)]
pub struct RealField {
    grid: Grid,
    comps: Vec<Vec<f64>>,
}

/// Fourier coefficients of a field, one `Vec` per component.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    comps: Vec<Vec<Complex64>>,
}

impl RealField {
    /// Wraps component arrays, checking sample counts and finiteness.
    pub fn new(grid: &Grid, comps: Vec<Vec<f64>>) -> Result<Self, FieldError> {
        if comps.is_empty() {
            return Err(FieldError::ComponentMismatch { expected: 1, found: 0 });
        }
        for (c, data) in comps.iter().enumerate() {
            if data.len() != grid.len() {
                return Err(FieldError::SampleCount {
                    component: c,
                    expected: grid.len(),
                    found: data.len(),
                });
            }
            if let Some(index) = data.iter().position(|v| !v.is_finite()) {
                return Err(FieldError::NonFinite { component: c, index });
            }
        }
        Ok(RealField { grid: grid.clone(), comps })
    }

    /// Like [`RealField::new`] but also requires exactly `n` components.
    pub fn vector(grid: &Grid, comps: Vec<Vec<f64>>) -> Result<Self, FieldError> {
        if comps.len() != grid.dim() {
            return Err(FieldError::ComponentMismatch { expected: grid.dim(), found: comps.len() });
        }
        Self::new(grid, comps)
    }

    pub fn zeros(grid: &Grid, ncomp: usize) -> Self {
        RealField { grid: grid.clone(), comps: vec![vec![0.0; grid.len()]; ncomp] }
    }

    /// Samples `f(x, component)` at every grid point.
    pub fn from_fn(grid: &Grid, ncomp: usize, f: impl Fn(&[f64; 3], usize) -> f64 + Sync) -> Self {
        let comps = (0..ncomp)
            .map(|c| (0..grid.len()).into_par_iter().map(|i| f(&grid.point(i), c)).collect())
            .collect();
        RealField { grid: grid.clone(), comps }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    pub fn is_vector(&self) -> bool {
        self.ncomp() == self.grid.dim()
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.comps[c]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Vec<f64>> {
        self.comps
    }

    /// Single component as a scalar field.
    pub fn scalar_component(&self, c: usize) -> RealField {
        RealField { grid: self.grid.clone(), comps: vec![self.comps[c].clone()] }
    }

    /// Largest pointwise Euclidean magnitude.
    pub fn max_abs(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| self.comps.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, factor: f64) -> RealField {
        RealField {
            grid: self.grid.clone(),
            comps: self.comps.iter().map(|c| c.iter().map(|v| v * factor).collect()).collect(),
        }
    }

    pub fn add(&self, other: &RealField) -> RealField {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &RealField) -> RealField {
        self.zip_with(other, |x, y| x - y)
    }

    fn zip_with(&self, other: &RealField, op: impl Fn(f64, f64) -> f64 + Sync) -> RealField {
        assert_same_shape(&self.grid, self.ncomp(), &other.grid, other.ncomp());
        RealField {
            grid: self.grid.clone(),
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| op(*x, *y)).collect())
                .collect(),
        }
    }

    /// Pointwise product. Component counts must match (Hadamard product) or
    /// one side must be scalar (broadcast). No dealiasing is applied.
    pub fn pointwise_product(&self, other: &RealField) -> RealField {
        assert_eq!(self.grid, other.grid, "pointwise product across grids");
        let comps = match (self.ncomp(), other.ncomp()) {
            (a, b) if a == b => self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).collect())
                .collect(),
            (1, _) => other
                .comps
                .iter()
                .map(|y| self.comps[0].iter().zip(y).map(|(p, q)| p * q).collect())
                .collect(),
            (_, 1) => self
                .comps
                .iter()
                .map(|x| x.iter().zip(&other.comps[0]).map(|(p, q)| p * q).collect())
                .collect(),
            (a, b) => panic!("cannot multiply fields with {a} and {b} components"),
        };
        RealField { grid: self.grid.clone(), comps }
    }

    /// Forward transform.
    pub fn to_spectral(&self) -> SpectralField {
        let comps = forward_many(&self.grid, &self.comps.iter().map(Vec::as_slice).collect::<Vec<_>>());
        SpectralField { grid: self.grid.clone(), comps }
    }
}

impl SpectralField {
    pub fn new(grid: &Grid, comps: Vec<Vec<Complex64>>) -> Result<Self, FieldError> {
        for (c, data) in comps.iter().enumerate() {
            if data.len() != grid.len() {
                return Err(FieldError::SampleCount {
                    component: c,
                    expected: grid.len(),
                    found: data.len(),
                });
            }
        }
        Ok(SpectralField { grid: grid.clone(), comps })
    }

    pub fn zeros(grid: &Grid, ncomp: usize) -> Self {
        SpectralField { grid: grid.clone(), comps: vec![vec![Complex64::default(); grid.len()]; ncomp] }
    }

    /// Single real-valued mode `amplitude·cos(k·x)` in component `c` of an
    /// `ncomp`-component field.
    pub fn cosine_mode(grid: &Grid, ncomp: usize, c: usize, k: &[i64], amplitude: f64) -> Self {
        let mut out = Self::zeros(grid, ncomp);
        let i = grid.index_of(k);
        let neg: Vec<i64> = k.iter().map(|v| -v).collect();
        let j = grid.index_of(&neg);
        out.comps[c][i] += Complex64::new(0.5 * amplitude, 0.0);
        out.comps[c][j] += Complex64::new(0.5 * amplitude, 0.0);
        out
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    pub fn is_vector(&self) -> bool {
        self.ncomp() == self.grid.dim()
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.comps[c]
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.comps
    }

    pub fn scalar_component(&self, c: usize) -> SpectralField {
        SpectralField { grid: self.grid.clone(), comps: vec![self.comps[c].clone()] }
    }

    /// Inverse transform; imaginary round-off is discarded.
    pub fn to_real(&self) -> RealField {
        let comps = inverse_many(&self.grid, &self.comps.iter().map(Vec::as_slice).collect::<Vec<_>>());
        RealField { grid: self.grid.clone(), comps }
    }

    /// Applies `f(lattice index, coefficient)` to every coefficient of every
    /// component.
    pub fn map_coeffs(&self, f: impl Fn(usize, Complex64) -> Complex64 + Sync) -> SpectralField {
        let comps = self
            .comps
            .iter()
            .map(|c| c.par_iter().enumerate().map(|(i, &v)| f(i, v)).collect())
            .collect();
        SpectralField { grid: self.grid.clone(), comps }
    }

    pub fn scale(&self, factor: f64) -> SpectralField {
        self.map_coeffs(|_, v| v * factor)
    }

    pub fn add(&self, other: &SpectralField) -> SpectralField {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        self.axpy(-1.0, other)
    }

    /// `self + a·other`.
    pub fn axpy(&self, a: f64, other: &SpectralField) -> SpectralField {
        assert_same_shape(&self.grid, self.ncomp(), &other.grid, other.ncomp());
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(x, y)| x.par_iter().zip(y.par_iter()).map(|(p, q)| p + q * a).collect())
            .collect();
        SpectralField { grid: self.grid.clone(), comps }
    }

    /// Two-thirds rule: zeroes every mode with `3|k_i| ≥ N` on some axis.
    pub fn dealias(&self) -> SpectralField {
        let g = self.grid.clone();
        self.map_coeffs(move |i, v| if g.dealias_keeps(i) { v } else { Complex64::default() })
    }

    /// `L²` norm (normalized measure, Euclidean over components) by Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.comps.iter().map(|c| c.iter().map(|v| v.norm_sqr()).sum::<f64>()).sum::<f64>().sqrt()
    }

    /// `‖∇f‖_{L²}` by Parseval.
    pub fn grad_l2_norm(&self) -> f64 {
        let k2 = self.grid.k2_table();
        self.comps
            .iter()
            .map(|c| c.iter().zip(k2).map(|(v, &q)| v.norm_sqr() * q as f64).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    /// Gradient of every component: component `c·n + j` holds `∂_j f_c`.
    pub fn gradient(&self) -> SpectralField {
        let n = self.grid.dim();
        let mut comps = Vec::with_capacity(self.ncomp() * n);
        for c in &self.comps {
            for j in 0..n {
                let g = &self.grid;
                comps.push(
                    c.par_iter()
                        .enumerate()
                        .map(|(i, &v)| v * Complex64::new(0.0, g.derivative_wavevector(i)[j]))
                        .collect(),
                );
            }
        }
        SpectralField { grid: self.grid.clone(), comps }
    }

    /// Divergence. A vector field gives a scalar `Σ_j ∂_j f_j`; a tensor field
    /// gives the vector `(div T)_i = Σ_j ∂_j T_ij`.
    pub fn divergence(&self) -> SpectralField {
        let n = self.grid.dim();
        let rows = match self.ncomp() {
            c if c == n => 1,
            c if c == n * n => n,
            c => panic!("divergence of a {c}-component field on a {n}-d grid"),
        };
        let g = &self.grid;
        let comps = (0..rows)
            .map(|r| {
                let row = &self.comps[r * n..(r + 1) * n];
                (0..g.len())
                    .into_par_iter()
                    .map(|i| {
                        let kd = g.derivative_wavevector(i);
                        // i·k·f without a full complex product.
                        let (mut re, mut im) = (0.0, 0.0);
                        for (c, k) in row.iter().zip(kd) {
                            re -= c[i].im * k;
                            im += c[i].re * k;
                        }
                        Complex64::new(re, im)
                    })
                    .collect()
            })
            .collect();
        SpectralField { grid: self.grid.clone(), comps }
    }

    /// Copies the modes representable on `grid` (Nyquist excluded) into a field
    /// on that grid; spectral interpolation when refining, truncation when
    /// coarsening.
    pub fn resample(&self, grid: &Grid) -> SpectralField {
        assert_eq!(grid.dim(), self.grid.dim(), "resampling across dimensions");
        let lim = (grid.nyquist().min(self.grid.nyquist())) as i32;
        let mut out = SpectralField::zeros(grid, self.ncomp());
        for i in 0..self.grid.len() {
            let k = self.grid.wavevector(i);
            if k.iter().any(|v| v.abs() >= lim) {
                continue;
            }
            let kk: Vec<i64> = k.iter().map(|&v| v as i64).collect();
            let j = grid.index_of(&kk);
            for c in 0..self.ncomp() {
                out.comps[c][j] = self.comps[c][i];
            }
        }
        out
    }

    /// Largest deviation from conjugate symmetry `f̂(-k) = conj f̂(k)`.
    pub fn hermitian_defect(&self) -> f64 {
        let g = &self.grid;
        self.comps
            .iter()
            .flat_map(|c| (0..g.len()).map(move |i| (c[i] - c[g.neg_index(i)].conj()).norm()))
            .fold(0.0, f64::max)
    }

    /// Fraction of the `L²` mass carried by modes with `|k|² > k2_max`.
    pub fn energy_fraction_above(&self, k2_max: u32) -> f64 {
        let k2 = self.grid.k2_table();
        let (mut hi, mut all) = (0.0, 0.0);
        for c in &self.comps {
            for (v, &q) in c.iter().zip(k2) {
                let e = v.norm_sqr();
                all += e;
                if q > k2_max {
                    hi += e;
                }
            }
        }
        if all == 0.0 {
            0.0
        } else {
            hi / all
        }
    }
}

fn assert_same_shape(a: &Grid, na: usize, b: &Grid, nb: usize) {
    assert_eq!(a, b, "fields live on different grids");
    assert_eq!(na, nb, "component count mismatch");
}

/// Forward transforms of several real arrays, two per complex FFT.
pub(crate) fn forward_many(grid: &Grid, inputs: &[&[f64]]) -> Vec<Vec<Complex64>> {
    forward_many_from(grid, inputs.len(), false, |c, x| inputs[c][x])
}

/// Forward transforms of `count` real arrays whose samples are produced by
/// `value(array, point)`; with `dealias`, modes outside the two-thirds band
/// are zeroed.
pub(crate) fn forward_many_from(
    grid: &Grid,
    count: usize,
    dealias: bool,
    value: impl Fn(usize, usize) -> f64 + Sync,
) -> Vec<Vec<Complex64>> {
    let norm = 1.0 / grid.len() as f64;
    let keep = |i: usize| !dealias || grid.dealias_keeps(i);
    let mut out = Vec::with_capacity(count);
    for a in (0..count).step_by(2) {
        let paired = a + 1 < count;
        let mut buf: Vec<Complex64> = (0..grid.len())
            .into_par_iter()
            .map(|x| Complex64::new(value(a, x), if paired { value(a + 1, x) } else { 0.0 }))
            .collect();
        grid.fft().forward(&mut buf);
        if !paired {
            buf.par_iter_mut().enumerate().for_each(|(i, v)| *v = if keep(i) { *v * norm } else { Complex64::default() });
            out.push(buf);
            continue;
        }
        // Z = A + iB with A, B Hermitian: A = (Z(k) + conj Z(-k))/2, B = (Z(k) - conj Z(-k))/2i.
        let mut fb = vec![Complex64::default(); buf.len()];
        let mut fa = vec![Complex64::default(); buf.len()];
        fa.par_iter_mut().zip(fb.par_iter_mut()).enumerate().for_each(|(i, (av, bv))| {
            if keep(i) {
                let z = buf[i];
                let zc = buf[grid.neg_index(i)].conj();
                *av = (z + zc) * (0.5 * norm);
                *bv = (z - zc) * Complex64::new(0.0, -0.5 * norm);
            }
        });
        out.push(fa);
        out.push(fb);
    }
    out
}

/// Inverse transforms of several Hermitian spectra, two per complex FFT.
pub(crate) fn inverse_many(grid: &Grid, inputs: &[&[Complex64]]) -> Vec<Vec<f64>> {
    inverse_many_from(grid, inputs.len(), |c, i| inputs[c][i])
}

/// Inverse transforms of `count` Hermitian spectra whose coefficients are
/// produced by `coeff(spectrum, lattice index)`.
pub(crate) fn inverse_many_from(
    grid: &Grid,
    count: usize,
    coeff: impl Fn(usize, usize) -> Complex64 + Sync,
) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    for a in (0..count).step_by(2) {
        let paired = a + 1 < count;
        let mut buf: Vec<Complex64> = (0..grid.len())
            .into_par_iter()
            .map(|i| if paired { coeff(a, i) + Complex64::i() * coeff(a + 1, i) } else { coeff(a, i) })
            .collect();
        grid.fft().inverse(&mut buf);
        out.push(buf.par_iter().map(|v| v.re).collect());
        if paired {
            out.push(buf.par_iter().map(|v| v.im).collect());
        }
    }
    out
}

/// Dealiased pointwise product of two spectral fields (Hadamard or scalar
/// broadcast, as in [`RealField::pointwise_product`]).
pub fn dealiased_product(f: &SpectralField, g: &SpectralField) -> SpectralField {
    f.to_real().pointwise_product(&g.to_real()).to_spectral().dealias()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_field_has_only_the_zero_mode() {
        let g = Grid::new(3, 8).unwrap();
        let s = RealField::from_fn(&g, 1, |_, _| 1.0).to_spectral();
        assert!((s.component(0)[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let rest: f64 = s.component(0)[1..].iter().map(|v| v.norm()).sum();
        assert!(rest < 1e-13);
    }

    #[test]
    fn cosine_has_half_coefficients() {
        let g = Grid::new(3, 16).unwrap();
        let s = RealField::from_fn(&g, 3, |x, c| if c == 0 { x[0].cos() } else { 0.0 }).to_spectral();
        for k in [[1i64, 0, 0], [-1, 0, 0]] {
            assert!((s.component(0)[g.index_of(&k)] - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        }
        let total: f64 = s.components().iter().flatten().map(|v| v.norm()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn paired_transform_matches_single() {
        let g = Grid::new(2, 16).unwrap();
        let f = RealField::from_fn(&g, 3, |x, c| (c as f64 + 1.0) * (x[0] + 2.0 * x[1]).sin() + x[1].cos().powi(3));
        let paired = f.to_spectral();
        for c in 0..3 {
            let single = f.scalar_component(c).to_spectral();
            for (a, b) in paired.component(c).iter().zip(single.component(0)) {
                assert!((a - b).norm() < 1e-14);
            }
        }
        assert!(paired.hermitian_defect() < 1e-14);
    }

    #[test]
    fn gradient_and_divergence_of_simple_fields() {
        let g = Grid::new(2, 16).unwrap();
        // u = (sin y, sin x) is divergence-free; grad u_0 = (0, cos y).
        let u = RealField::from_fn(&g, 2, |x, c| if c == 0 { x[1].sin() } else { x[0].sin() }).to_spectral();
        assert!(u.divergence().l2_norm() < 1e-14);
        let grad = u.gradient().to_real();
        for i in 0..g.len() {
            let p = g.point(i);
            assert!(grad.component(0)[i].abs() < 1e-13);
            assert!((grad.component(1)[i] - p[1].cos()).abs() < 1e-13);
        }
        let _ = PI;
    }

    #[test]
    fn resampling_preserves_resolved_modes() {
        let a = Grid::new(3, 16).unwrap();
        let b = Grid::new(3, 32).unwrap();
        let f = RealField::from_fn(&a, 3, |x, c| (x[0] + c as f64).sin() * (3.0 * x[2]).cos());
        let up = f.to_spectral().resample(&b);
        let direct = RealField::from_fn(&b, 3, |x, c| (x[0] + c as f64).sin() * (3.0 * x[2]).cos()).to_spectral();
        assert!(up.sub(&direct).l2_norm() < 1e-14);
        assert!(up.resample(&a).sub(&f.to_spectral()).l2_norm() < 1e-14);
    }
}
