//! Multi-dimensional complex FFT on a periodic `N^n` lattice, driven by 1-D
//! `rustfft` plans. Transforms are unnormalized; callers apply `1/N^n`.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

/// Lines handed to one rayon task per 1-D pass.
const LINES_PER_TASK: usize = 64;

pub(crate) struct FftPlan {
    dim: usize,
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftPlan").field("dim", &self.dim).field("size", &self.size).finish()
    }
}

impl FftPlan {
    pub(crate) fn new(dim: usize, size: usize) -> Self {
        let mut planner = FftPlanner::new();
        FftPlan {
            dim,
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.size;
        let total = n.pow(self.dim as u32);
        assert_eq!(data.len(), total, "buffer does not match lattice size");

        // Last axis is contiguous.
        run_lines(data, n, fft);

        if self.dim == 1 {
            return;
        }
        let mut lines = vec![Complex64::default(); total];
        for axis in 0..self.dim - 1 {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            let block = n * stride;

            // Gather: line (outer o, inner i) -> lines[(o*stride + i)*n + m].
            {
                let src: &[Complex64] = data;
                lines.par_chunks_mut(n).enumerate().for_each(|(l, line)| {
                    let o = l / stride;
                    let i = l % stride;
                    let base = o * block + i;
                    for (m, v) in line.iter_mut().enumerate() {
                        *v = src[base + m * stride];
                    }
                });
            }

            run_lines(&mut lines, n, fft);

            // Scatter back: row (o, m) of length `stride` holds all inner indices.
            {
                let src: &[Complex64] = &lines;
                data.par_chunks_mut(stride).enumerate().for_each(|(r, row)| {
                    let o = r / n;
                    let m = r % n;
                    for (i, v) in row.iter_mut().enumerate() {
                        *v = src[(o * stride + i) * n + m];
                    }
                });
            }
        }
    }
}

fn run_lines(data: &mut [Complex64], n: usize, fft: &Arc<dyn Fft<f64>>) {
    data.par_chunks_mut(n * LINES_PER_TASK).for_each(|chunk| {
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(chunk, &mut scratch);
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(data: &[Complex64], dim: usize, n: usize) -> Vec<Complex64> {
        let total = n.pow(dim as u32);
        let idx = |mut f: usize| {
            let mut out = vec![0usize; dim];
            for a in (0..dim).rev() {
                out[a] = f % n;
                f /= n;
            }
            out
        };
        (0..total)
            .map(|k| {
                let kk = idx(k);
                let mut acc = Complex64::default();
                for (x, v) in data.iter().enumerate() {
                    let xx = idx(x);
                    let phase: usize = kk.iter().zip(&xx).map(|(a, b)| a * b).sum();
                    let ang = -2.0 * std::f64::consts::PI * (phase % n) as f64 / n as f64;
                    acc += v * Complex64::from_polar(1.0, ang);
                }
                acc
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_in_2d_and_3d() {
        for &(dim, n) in &[(2usize, 8usize), (3, 4)] {
            let total = n.pow(dim as u32);
            let data: Vec<Complex64> = (0..total)
                .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
                .collect();
            let expect = naive_dft(&data, dim, n);
            let mut got = data.clone();
            FftPlan::new(dim, n).forward(&mut got);
            for (a, b) in got.iter().zip(&expect) {
                assert!((a - b).norm() < 1e-10, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        let (dim, n) = (3, 8);
        let total = n * n * n;
        let data: Vec<Complex64> =
            (0..total).map(|i| Complex64::new((i as f64).sqrt(), -(i as f64) * 0.5)).collect();
        let plan = FftPlan::new(dim, n);
        let mut buf = data.clone();
        plan.forward(&mut buf);
        plan.inverse(&mut buf);
        for (a, b) in buf.iter().zip(&data) {
            assert!((a / total as f64 - b).norm() < 1e-12);
        }
    }
}
