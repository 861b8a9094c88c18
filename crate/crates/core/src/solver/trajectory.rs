//! Time-ordered field samples and per-step norm records.

use serde::{Deserialize, Serialize};

use crate::error::SolverError;
use crate::field::{RealField, SpectralField};
use crate::grid::Grid;
use crate::lp::family::DyadicFamily;
use crate::lp::norms::{besov_parts, block_norms_l2_from_energy, energy_by_k2, BesovIndex};

/// Scalar diagnostics of one time level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormRecord {
    pub t: f64,
    /// `‖u‖²_{L²} + α²‖∇u‖²_{L²}`.
    pub energy: f64,
    pub l2: f64,
    pub grad_l2: f64,
    /// `‖u‖_{B^r_{2,q}}`.
    pub besov_r: f64,
    /// `‖u‖_{B^{1+n/2}_{2,q}}`.
    pub besov_top: f64,
    /// `‖div u‖_{L²}`.
    pub div_residual: f64,
    /// `[‖Ψ∗u‖₂, ‖Δ_0 u‖₂, …, ‖Δ_J u‖₂]`, from which any `B^s_{2,q}` norm follows.
    pub block_l2: Vec<f64>,
}

impl NormRecord {
    /// `(‖Ψ∗u‖₂, ‖u‖_{B̃^s_{2,q}})` from the stored block norms.
    pub fn besov_2q(&self, s: f64, q: f64) -> (f64, f64) {
        besov_parts(&self.block_l2, BesovIndex { s, p: 2.0, q })
    }
}

/// Computes [`NormRecord`]s for a fixed `α`, `r` and `q`.
#[derive(Clone, Debug)]
pub struct NormRecorder {
    family: DyadicFamily,
    alpha: f64,
    idx_r: BesovIndex,
    idx_top: BesovIndex,
}

impl NormRecorder {
    pub fn new(grid: &Grid, alpha: f64, r: f64, q: f64) -> Self {
        let n = grid.dim() as f64;
        NormRecorder {
            family: DyadicFamily::for_grid(grid),
            alpha,
            idx_r: BesovIndex { s: r, p: 2.0, q },
            idx_top: BesovIndex { s: 1.0 + 0.5 * n, p: 2.0, q },
        }
    }

    pub fn family(&self) -> &DyadicFamily {
        &self.family
    }

    pub fn record(&self, t: f64, u: &SpectralField) -> NormRecord {
        let g = u.grid();
        let e = energy_by_k2(u);
        let l2sq: f64 = e.iter().sum();
        let gradsq: f64 = e.iter().enumerate().map(|(q, v)| q as f64 * v).sum();
        let blocks = block_norms_l2_from_energy(&self.family, &e);
        let (lr, hr) = besov_parts(&blocks, self.idx_r);
        let (lt, ht) = besov_parts(&blocks, self.idx_top);
        let div: f64 = if u.is_vector() {
            (0..g.len())
                .map(|i| {
                    let kd = g.derivative_wavevector(i);
                    kd.iter().enumerate().map(|(c, k)| u.component(c)[i] * *k).sum::<num_complex::Complex64>().norm_sqr()
                })
                .sum::<f64>()
                .sqrt()
        } else {
            0.0
        };
        NormRecord {
            t,
            energy: l2sq + self.alpha * self.alpha * gradsq,
            l2: l2sq.sqrt(),
            grad_l2: gradsq.sqrt(),
            besov_r: lr + hr,
            besov_top: lt + ht,
            div_residual: div,
            block_l2: blocks,
        }
    }
}

/// Ordered `(t, u(t))` samples plus norm records (possibly at more time levels
/// than there are stored fields).
#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    times: Vec<f64>,
    fields: Vec<SpectralField>,
    records: Vec<NormRecord>,
}

impl Trajectory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a trajectory from samples; times must increase strictly.
    pub fn from_samples(samples: Vec<(f64, SpectralField)>) -> Result<Self, SolverError> {
        let mut tr = Trajectory::new();
        for (t, f) in samples {
            tr.push(t, f)?;
        }
        Ok(tr)
    }

    pub fn push(&mut self, t: f64, field: SpectralField) -> Result<(), SolverError> {
        if !t.is_finite() || t < 0.0 {
            return Err(SolverError::NegativeTime(t));
        }
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(SolverError::InvalidConfig(format!("sample time {t} does not follow {last}")));
            }
        }
        self.times.push(t);
        self.fields.push(field);
        Ok(())
    }

    pub fn push_record(&mut self, rec: NormRecord) {
        self.records.push(rec);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[SpectralField] {
        &self.fields
    }

    pub fn sample(&self, i: usize) -> (f64, &SpectralField) {
        (self.times[i], &self.fields[i])
    }

    pub fn real_sample(&self, i: usize) -> RealField {
        self.fields[i].to_real()
    }

    pub fn last(&self) -> Option<(f64, &SpectralField)> {
        self.times.last().map(|&t| (t, self.fields.last().expect("same length")))
    }

    pub fn records(&self) -> &[NormRecord] {
        &self.records
    }

    /// Index of the sample at time `t` (within `1e−12` relative).
    pub fn index_of_time(&self, t: f64) -> Option<usize> {
        self.times.iter().position(|&s| (s - t).abs() <= 1e-12 * t.abs().max(1.0))
    }
}
