//! Dyadic Littlewood–Paley family on the lattice.
//!
//! Block `j ≥ 0` has symbol `ψ̂_j(k) = χ(|k|/2^j) − χ(|k|/2^{j−1})`, supported in
//! the open annulus `2^{j−1} < |k| < 2^{j+1}`; the low-frequency part is
//! `Ψ̂(k) = χ(2|k|)`. Throughout, the low part is addressed as block `j = −1`,
//! so `S_m = Σ_{i=−1}^{m} Δ_i` and `Ψ̂ + Σ_{j=0}^{J} ψ̂_j = χ(|k|/2^J)`.

use crate::error::FieldError;
use crate::field::{RealField, SpectralField};
use crate::grid::Grid;
use crate::lp::cutoff::chi;

/// Precomputed block symbols, tabulated by `|k|²`.
#[derive(Clone, Debug)]
pub struct DyadicFamily {
    grid: Grid,
    j_max: usize,
    /// `tables[j + 1][|k|²]` for `j ∈ [−1, J]`.
    tables: Vec<Vec<f64>>,
}

/// A field split into its low part and dyadic blocks.
#[derive(Clone, Debug)]
pub struct DyadicBlockDecomposition {
    pub low: SpectralField,
    pub blocks: Vec<(usize, SpectralField)>,
}

impl DyadicBlockDecomposition {
    /// `Ψ∗f + Σ_j Δ_j f`.
    pub fn reconstruct(&self) -> SpectralField {
        self.blocks.iter().fold(self.low.clone(), |acc, (_, b)| acc.add(b))
    }
}

/// Builds the family with blocks `0..=j_max`. Requires `2^{J+1} ≤ N/2`.
pub fn build_dyadic_family(grid: &Grid, j_max: usize) -> Result<DyadicFamily, FieldError> {
    if j_max > 30 || (1usize << (j_max + 1)) > grid.nyquist() {
        return Err(FieldError::DyadicRangeTooLarge { j_max, nyquist: grid.nyquist() });
    }
    let radii: Vec<f64> = (0..=grid.max_k2()).map(|q| (q as f64).sqrt()).collect();
    let mut tables = Vec::with_capacity(j_max + 2);
    tables.push(radii.iter().map(|r| chi(2.0 * r)).collect());
    for j in 0..=j_max {
        let outer = (1u64 << j) as f64;
        tables.push(radii.iter().map(|r| chi(r / outer) - chi(2.0 * r / outer)).collect());
    }
    Ok(DyadicFamily { grid: grid.clone(), j_max, tables })
}

impl DyadicFamily {
    /// Family with the largest dyadic range the grid allows.
    pub fn for_grid(grid: &Grid) -> Self {
        build_dyadic_family(grid, grid.max_dyadic_index()).expect("maximal range always fits")
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    /// Largest `|k|²` on which the partition of unity holds (`|k| ≤ 2^J`).
    pub fn resolved_k2(&self) -> u32 {
        1u32 << (2 * self.j_max)
    }

    /// Symbol of block `j ∈ [−1, J]` at `|k|²`.
    pub fn weight(&self, j: i32, k2: u32) -> f64 {
        self.tables[(j + 1) as usize][k2 as usize]
    }

    /// `ψ̂_j` at lattice index `idx`.
    pub fn psi_hat(&self, j: usize, idx: usize) -> f64 {
        self.tables[j + 1][self.grid.k2(idx) as usize]
    }

    /// `Ψ̂` at lattice index `idx`.
    pub fn low_hat(&self, idx: usize) -> f64 {
        self.tables[0][self.grid.k2(idx) as usize]
    }

    /// Table of block `j ∈ [−1, J]` indexed by `|k|²`.
    pub fn table(&self, j: i32) -> &[f64] {
        &self.tables[(j + 1) as usize]
    }

    fn check_grid(&self, f: &SpectralField) -> Result<(), FieldError> {
        if *f.grid() != self.grid {
            return Err(FieldError::GridMismatch {
                expected: format!("n={} N={}", self.grid.dim(), self.grid.size()),
                found: format!("n={} N={}", f.grid().dim(), f.grid().size()),
            });
        }
        Ok(())
    }

    fn apply_table(&self, f: &SpectralField, table: &[f64]) -> SpectralField {
        let g = self.grid.clone();
        f.map_coeffs(move |i, v| v * table[g.k2(i) as usize])
    }

    /// Block `j ∈ [−1, J]`, where `−1` is the low part.
    pub fn block(&self, f: &SpectralField, j: i32) -> Result<SpectralField, FieldError> {
        self.check_grid(f)?;
        if j < -1 || j > self.j_max as i32 {
            return Err(FieldError::DyadicIndexOutOfRange { j, min: -1, j_max: self.j_max });
        }
        Ok(self.apply_table(f, self.table(j)))
    }

    /// `Δ_j f` for `j ∈ [0, J]`.
    pub fn delta_j(&self, f: &SpectralField, j: i32) -> Result<SpectralField, FieldError> {
        if j < 0 || j > self.j_max as i32 {
            return Err(FieldError::DyadicIndexOutOfRange { j, min: 0, j_max: self.j_max });
        }
        self.block(f, j)
    }

    /// `Ψ∗f`.
    pub fn low_pass(&self, f: &SpectralField) -> Result<SpectralField, FieldError> {
        self.block(f, -1)
    }

    /// `S_j f = Ψ∗f + Σ_{0≤i≤j} Δ_i f`; zero for `j < −1`.
    pub fn s_j(&self, f: &SpectralField, j: i32) -> Result<SpectralField, FieldError> {
        self.check_grid(f)?;
        if j > self.j_max as i32 {
            return Err(FieldError::DyadicIndexOutOfRange { j, min: i32::MIN, j_max: self.j_max });
        }
        if j < -1 {
            return Ok(SpectralField::zeros(&self.grid, f.ncomp()));
        }
        let sum: Vec<f64> = (0..self.tables[0].len())
            .map(|q| (-1..=j).map(|i| self.tables[(i + 1) as usize][q]).sum())
            .collect();
        Ok(self.apply_table(f, &sum))
    }

    /// All blocks of `f`.
    pub fn decompose(&self, f: &SpectralField) -> Result<DyadicBlockDecomposition, FieldError> {
        self.check_grid(f)?;
        Ok(DyadicBlockDecomposition {
            low: self.apply_table(f, self.table(-1)),
            blocks: (0..=self.j_max).map(|j| (j, self.apply_table(f, self.table(j as i32)))).collect(),
        })
    }

    /// Real-space blocks `[Ψ∗f, Δ_0 f, …, Δ_J f]`.
    pub fn real_blocks(&self, f: &SpectralField) -> Result<Vec<RealField>, FieldError> {
        self.check_grid(f)?;
        Ok((-1..=self.j_max as i32).map(|j| self.apply_table(f, self.table(j)).to_real()).collect())
    }

    /// Fraction of the `L²` mass of `f` outside the resolved ball `|k| ≤ 2^J`.
    pub fn unresolved_fraction(&self, f: &SpectralField) -> f64 {
        f.energy_fraction_above(self.resolved_k2())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_oversized_range() {
        let g = Grid::new(3, 32).unwrap();
        assert!(build_dyadic_family(&g, 3).is_ok());
        assert!(matches!(build_dyadic_family(&g, 4), Err(FieldError::DyadicRangeTooLarge { .. })));
    }

    #[test]
    fn dyadic_radius_hits_one_block() {
        let g = Grid::new(3, 32).unwrap();
        let fam = DyadicFamily::for_grid(&g);
        assert_eq!(fam.weight(-1, 0), 1.0);
        for j in 0..=3i32 {
            let k2 = 1u32 << (2 * j);
            assert_eq!(fam.weight(j, k2), 1.0);
            if j > 0 {
                assert_eq!(fam.weight(j - 1, k2), 0.0);
            }
            if j < 3 {
                assert_eq!(fam.weight(j + 1, k2), 0.0);
            }
        }
    }

    #[test]
    fn index_range_is_enforced() {
        let g = Grid::new(2, 16).unwrap();
        let fam = DyadicFamily::for_grid(&g);
        let f = SpectralField::zeros(&g, 2);
        assert!(fam.delta_j(&f, -1).is_err());
        assert!(fam.delta_j(&f, 3).is_err());
        assert!(fam.delta_j(&f, 2).is_ok());
        assert!(fam.s_j(&f, -3).unwrap().l2_norm() == 0.0);
    }
}
