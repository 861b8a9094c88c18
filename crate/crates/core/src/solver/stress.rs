//! Reynolds stress and the quadratic nonlinearity.
//!
//! With `G_ij = ∂_j u_i`, `Def = (G + Gᵀ)/2` and `Rot = (G − Gᵀ)/2`, the stress
//! is `τ = α²(1 − α²Δ)^{-1}[Def·Rot]` and the unprojected nonlinearity is
//! `V(u) = div(u⊗u) + div τ` with `(div T)_i = Σ_j ∂_j T_ij`. Every product is
//! truncated by the two-thirds rule.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::field::{forward_many_from, inverse_many_from, SpectralField};
use crate::grid::Grid;

/// Real samples of the dealiased `u` and, with `gradient`, of `∇u`
/// (entry `i·n + j` holds `∂_j u_i`).
fn velocity_and_gradient(u: &SpectralField, gradient: bool) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let g = u.grid();
    let n = g.dim();
    let count = if gradient { n + n * n } else { n };
    let mut real = inverse_many_from(g, count, |c, i| {
        if !g.dealias_keeps(i) {
            return Complex64::default();
        }
        if c < n {
            return u.component(c)[i];
        }
        let (row, j) = ((c - n) / n, (c - n) % n);
        let v = u.component(row)[i];
        let k = g.derivative_wavevector(i)[j];
        Complex64::new(-v.im * k, v.re * k)
    });
    let grad = real.split_off(n);
    (real, grad)
}

/// `Def·Rot` at one point from the row-major gradient `g`.
fn def_rot_point<const N: usize>(g: &[[f64; N]; N]) -> [[f64; N]; N] {
    let mut m = [[0.0; N]; N];
    for i in 0..N {
        for j in 0..N {
            let acc: f64 = (0..N).map(|k| (g[i][k] + g[k][i]) * (g[k][j] - g[j][k])).sum();
            m[i][j] = 0.25 * acc;
        }
    }
    m
}

/// Dealiased spectra of the `N²` entries of `Def·Rot`.
fn def_rot_spectra<const N: usize>(grid: &Grid, grad: &[Vec<f64>]) -> Vec<Vec<Complex64>> {
    let per_point: Vec<[[f64; N]; N]> = (0..grid.len())
        .into_par_iter()
        .map(|x| {
            let mut g = [[0.0; N]; N];
            for (i, row) in g.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = grad[i * N + j][x];
                }
            }
            def_rot_point(&g)
        })
        .collect();
    forward_many_from(grid, N * N, true, |c, x| per_point[x][c / N][c % N])
}

fn def_rot(grid: &Grid, grad: &[Vec<f64>]) -> Vec<Vec<Complex64>> {
    match grid.dim() {
        2 => def_rot_spectra::<2>(grid, grad),
        3 => def_rot_spectra::<3>(grid, grad),
        n => unreachable!("grids are 2- or 3-dimensional, got {n}"),
    }
}

/// Symbol of `α²(1 − α²Δ)^{-1}` at lattice index `i`.
fn stress_symbol(grid: &Grid, alpha: f64, i: usize) -> f64 {
    let a2 = alpha * alpha;
    a2 / (1.0 + a2 * grid.k2(i) as f64)
}

/// Reynolds stress `τ = α²(1 − α²Δ)^{-1}[Def(u)·Rot(u)]` as an `n²`-component
/// tensor field (row-major).
pub fn reynolds_stress(u: &SpectralField, alpha: f64) -> SpectralField {
    let grid = u.grid();
    let n = grid.dim();
    assert!(u.is_vector(), "stress of a non-vector field");
    if alpha == 0.0 {
        return SpectralField::zeros(grid, n * n);
    }
    let (_, grad) = velocity_and_gradient(u, true);
    let mut comps = def_rot(grid, &grad);
    for c in &mut comps {
        c.par_iter_mut().enumerate().for_each(|(i, v)| *v *= stress_symbol(grid, alpha, i));
    }
    SpectralField::new(grid, comps).expect("sizes match")
}

/// `V(u) = div(u⊗u) + div τ(u)`, dealiased and not projected.
pub fn nonlinearity_v(u: &SpectralField, alpha: f64) -> SpectralField {
    flux_divergence(u, alpha, false)
}

/// `−P V(u)`, the forcing of the projected equation, with the Leray
/// projection applied in the same pass as the divergence.
pub(crate) fn projected_nonlinearity(u: &SpectralField, alpha: f64) -> SpectralField {
    flux_divergence(u, alpha, true)
}

fn flux_divergence(u: &SpectralField, alpha: f64, project: bool) -> SpectralField {
    let grid = u.grid();
    let n = grid.dim();
    assert!(u.is_vector(), "nonlinearity of a non-vector field");
    let (vel, grad) = velocity_and_gradient(u, alpha != 0.0);

    // Symmetric momentum flux: only i ≤ j is transformed.
    let upper: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let flux = forward_many_from(grid, upper.len(), true, |c, x| {
        let (i, j) = upper[c];
        vel[i][x] * vel[j][x]
    });
    let slot = |i: usize, j: usize| upper.iter().position(|&p| p == (i.min(j), i.max(j))).expect("upper entry");
    let slots: Vec<usize> = (0..n * n).map(|c| slot(c / n, c % n)).collect();
    let tau = if alpha != 0.0 { def_rot(grid, &grad) } else { Vec::new() };

    // (div T)_i = Σ_j i k_j T_ij with T = u⊗u + τ, evaluated in one pass.
    let per_point: Vec<[Complex64; 3]> = (0..grid.len())
        .into_par_iter()
        .map(|x| {
            let kd = grid.derivative_wavevector(x);
            let h = if tau.is_empty() { 0.0 } else { stress_symbol(grid, alpha, x) };
            let mut div = [Complex64::default(); 3];
            for (i, d) in div.iter_mut().take(n).enumerate() {
                for (j, &k) in kd.iter().enumerate() {
                    let mut t = flux[slots[i * n + j]][x];
                    if h != 0.0 {
                        t += tau[i * n + j][x] * h;
                    }
                    *d += Complex64::new(-t.im * k, t.re * k);
                }
            }
            if project {
                let kk: f64 = kd.iter().map(|v| v * v).sum();
                let s = if kk == 0.0 { Complex64::default() } else { kd.iter().zip(&div).map(|(k, d)| d * k).sum::<Complex64>() / kk };
                for (d, &k) in div.iter_mut().zip(kd) {
                    *d = s * k - *d;
                }
            }
            div
        })
        .collect();
    let comps = (0..n).map(|i| per_point.iter().map(|d| d[i]).collect()).collect();
    SpectralField::new(grid, comps).expect("sizes match")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::RealField;

    fn shear(g: &Grid) -> SpectralField {
        RealField::from_fn(g, 3, |x, c| if c == 0 { x[1].sin() } else { 0.0 }).to_spectral()
    }

    #[test]
    fn zero_and_navier_stokes_limits() {
        let g = Grid::new(3, 16).unwrap();
        let z = SpectralField::zeros(&g, 3);
        assert_eq!(reynolds_stress(&z, 1.0).l2_norm(), 0.0);
        assert_eq!(nonlinearity_v(&z, 1.0).l2_norm(), 0.0);
        assert_eq!(reynolds_stress(&shear(&g), 0.0).l2_norm(), 0.0);
    }

    #[test]
    fn unidirectional_shear_has_no_advection() {
        let g = Grid::new(3, 16).unwrap();
        assert!(nonlinearity_v(&shear(&g), 0.0).l2_norm() < 1e-15);
    }

    #[test]
    fn def_rot_of_shear_matches_hand_calculation() {
        // u = (sin y, 0, 0): Def·Rot = diag(−cos²y, cos²y, 0)/4.
        let g = Grid::new(3, 16).unwrap();
        let tau = reynolds_stress(&shear(&g), 1.0).to_real();
        for i in 0..g.len() {
            let y = g.point(i)[1];
            let c2 = (2.0 * y).cos();
            // H[cos² y] = 1/2 + cos(2y)/10 at α = 1.
            let want = 0.25 * (0.5 + c2 / 10.0);
            assert!((tau.component(0)[i] + want).abs() < 1e-14);
            assert!((tau.component(4)[i] - want).abs() < 1e-14);
            for c in [1, 2, 3, 5, 6, 7, 8] {
                assert!(tau.component(c)[i].abs() < 1e-14);
            }
        }
    }
}
