//! Heat semigroup `Γ` and Duhamel operator `G`.
//!
//! `(Γφ)(t) = e^{νtΔ}φ` and `(G g)(t) = ∫_0^t e^{ν(t−s)Δ} g(s) ds`. On each Fourier
//! mode (`λ = ν|k|²`) the Duhamel integral is advanced interval by interval,
//!
//! `G(t_{i+1}) = e^{−λh_i} G(t_i) + Σ_m w_{i,m}(λ) ĝ(t_m)`,
//!
//! where `g` is interpolated on each interval by the cubic through four
//! neighbouring samples and `w_{i,m}(λ) = ∫ e^{−λ(t_{i+1}−s)} L_m(s) ds` is
//! evaluated with a Gauss–Legendre rule. The time discretization error is
//! fourth order in the sample spacing for smooth `g`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::SolverError;
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::quadrature::gauss_legendre;
use crate::solver::trajectory::Trajectory;

/// `e^{νtΔ}φ`.
pub fn semigroup_apply(phi: &SpectralField, t: f64, nu: f64) -> Result<SpectralField, SolverError> {
    if t < 0.0 || t.is_nan() {
        return Err(SolverError::NegativeTime(t));
    }
    let g = phi.grid().clone();
    let by_k2: Vec<f64> = (0..=g.max_k2()).map(|q| (-nu * t * q as f64).exp()).collect();
    Ok(phi.map_coeffs(move |i, v| v * by_k2[g.k2(i) as usize]))
}

/// Interpolation stencil (first index, length) for interval `i` of `m + 1`
/// samples: up to four points centred on the interval.
fn stencil(i: usize, samples: usize) -> (usize, usize) {
    let len = samples.min(4);
    let start = i.saturating_sub(1).min(samples - len);
    (start, len)
}

/// `∫_a^b e^{−λ(b−s)} L_m(s) ds` for every basis polynomial of the stencil.
fn interval_weights(nodes: &[f64], (start, len): (usize, usize), a: f64, b: f64, lambda: f64, gl: &(Vec<f64>, Vec<f64>)) -> [f64; 4] {
    let mut w = [0.0; 4];
    let half = 0.5 * (b - a);
    let pts = &nodes[start..start + len];
    for (x, wt) in gl.0.iter().zip(&gl.1) {
        let s = a + half * (x + 1.0);
        let kernel = (-lambda * (b - s)).exp() * wt * half;
        for m in 0..len {
            let mut basis = 1.0;
            for l in 0..len {
                if l != m {
                    basis *= (s - pts[l]) / (pts[m] - pts[l]);
                }
            }
            w[m] += kernel * basis;
        }
    }
    w
}

/// Precomputed Duhamel weights on a fixed set of time nodes.
#[derive(Clone, Debug)]
pub struct DuhamelOperator {
    grid: Grid,
    nodes: Vec<f64>,
    /// `decay[i][|k|²] = e^{−ν|k|²h_i}`.
    decay: Vec<Vec<f64>>,
    /// `weights[i][|k|²]` for the stencil of interval `i`.
    weights: Vec<Vec<[f64; 4]>>,
}

impl DuhamelOperator {
    /// `nodes` must start at 0 and increase strictly.
    pub fn new(grid: &Grid, nodes: &[f64], nu: f64, quadrature_nodes: usize) -> Result<Self, SolverError> {
        if nodes.len() < 2 || nodes[0] != 0.0 || nodes.windows(2).any(|p| p[1] <= p[0]) {
            return Err(SolverError::InvalidConfig("Duhamel nodes must start at 0 and increase".into()));
        }
        if quadrature_nodes == 0 {
            return Err(SolverError::InvalidConfig("quadrature_nodes must be positive".into()));
        }
        let gl = gauss_legendre(quadrature_nodes);
        let k2s = grid.max_k2() as usize + 1;
        let mut decay = Vec::with_capacity(nodes.len() - 1);
        let mut weights = Vec::with_capacity(nodes.len() - 1);
        for i in 0..nodes.len() - 1 {
            let (a, b) = (nodes[i], nodes[i + 1]);
            let st = stencil(i, nodes.len());
            decay.push((0..k2s).map(|q| (-nu * q as f64 * (b - a)).exp()).collect());
            weights.push(
                (0..k2s).into_par_iter().map(|q| interval_weights(nodes, st, a, b, nu * q as f64, &gl)).collect(),
            );
        }
        Ok(DuhamelOperator { grid: grid.clone(), nodes: nodes.to_vec(), decay, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `(G g)(t_i)` for every node, given `g(t_i)` at every node.
    pub fn apply_all(&self, g: &[SpectralField]) -> Vec<SpectralField> {
        assert_eq!(g.len(), self.nodes.len(), "one forcing sample per node");
        let ncomp = g[0].ncomp();
        let mut out = Vec::with_capacity(g.len());
        out.push(SpectralField::zeros(&self.grid, ncomp));
        for i in 0..self.nodes.len() - 1 {
            let (start, len) = stencil(i, self.nodes.len());
            let prev = &out[i];
            let dec = &self.decay[i];
            let w = &self.weights[i];
            let grid = &self.grid;
            let comps: Vec<Vec<Complex64>> = (0..ncomp)
                .map(|c| {
                    let p = prev.component(c);
                    (0..grid.len())
                        .into_par_iter()
                        .map(|x| {
                            let q = grid.k2(x) as usize;
                            let mut acc = p[x] * dec[q];
                            for m in 0..len {
                                acc += g[start + m].component(c)[x] * w[q][m];
                            }
                            acc
                        })
                        .collect()
                })
                .collect();
            out.push(SpectralField::new(grid, comps).expect("sizes match"));
        }
        out
    }
}

/// `(G g)(t)` for forcing samples stored in a trajectory starting at `t = 0`.
pub fn duhamel_apply(g: &Trajectory, t: f64, nu: f64, quadrature_nodes: usize) -> Result<SpectralField, SolverError> {
    if t < 0.0 || t.is_nan() {
        return Err(SolverError::NegativeTime(t));
    }
    if g.is_empty() {
        return Err(SolverError::InvalidConfig("empty forcing trajectory".into()));
    }
    let times = g.times();
    let (start, end) = (times[0], *times.last().expect("non-empty"));
    if start != 0.0 || t > end * (1.0 + 1e-12) {
        return Err(SolverError::OutsideSupport { t, start, end });
    }
    let grid = g.fields()[0].grid();
    if t == 0.0 {
        return Ok(SpectralField::zeros(grid, g.fields()[0].ncomp()));
    }
    if times.len() < 2 {
        return Err(SolverError::OutsideSupport { t, start, end });
    }
    // Full intervals up to the last node at or before t, then a partial one.
    let last_full = times.iter().rposition(|&s| s <= t).expect("t >= 0 = times[0]");
    let base = if last_full >= 1 {
        let op = DuhamelOperator::new(grid, &times[..=last_full], nu, quadrature_nodes)?;
        let full = op.apply_all(&g.fields()[..=last_full]);
        full.last().expect("non-empty").clone()
    } else {
        SpectralField::zeros(grid, g.fields()[0].ncomp())
    };
    if times[last_full] == t {
        return Ok(base);
    }
    partial(grid, times, g.fields(), last_full, t, nu, quadrature_nodes, base)
}

#[allow(clippy::too_many_arguments)]
fn partial(
    grid: &Grid,
    times: &[f64],
    fields: &[SpectralField],
    i: usize,
    t: f64,
    nu: f64,
    q: usize,
    base: SpectralField,
) -> Result<SpectralField, SolverError> {
    let gl = gauss_legendre(q);
    let st = stencil(i, times.len());
    let a = times[i];
    let table: Vec<([f64; 4], f64)> = (0..=grid.max_k2())
        .map(|k2| {
            let lam = nu * k2 as f64;
            (interval_weights(times, st, a, t, lam, &gl), (-lam * (t - a)).exp())
        })
        .collect();
    let mut out = base;
    for c in 0..out.ncomp() {
        let data = out.component_mut(c);
        data.par_iter_mut().enumerate().for_each(|(x, v)| {
            let (w, d) = &table[grid.k2(x) as usize];
            let mut acc = *v * *d;
            for m in 0..st.1 {
                acc += fields[st.0 + m].component(c)[x] * w[m];
            }
            *v = acc;
        });
    }
    Ok(out)
}

/// Time nodes `t_m = T (m/M)^γ`, `m = 0..=M`.
pub fn graded_nodes(t_final: f64, intervals: usize, grading: f64) -> Vec<f64> {
    (0..=intervals).map(|m| t_final * (m as f64 / intervals as f64).powf(grading)).collect()
}
