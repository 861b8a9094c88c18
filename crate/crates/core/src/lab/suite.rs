//! Declarative check suites: each entry names a check and its parameters, and
//! the runner builds the seeded ensemble or solver run the check needs.

use serde::{Deserialize, Serialize};

use crate::field::SpectralField;
use crate::grid::Grid;
use crate::lab::dynamics::{
    check_apriori_bound, check_apriori_sweep, check_energy_monotone, check_gronwall_differential,
};
use crate::lab::estimates::{
    check_heat_smoothing, check_k2_tail, check_moser, check_paraproduct_bounds, check_product, check_tau,
    LeibnizParams, SmoothingParams, StressParams,
};
use crate::lab::identities::{
    check_bernstein, check_embedding, check_orthogonality, check_partition_of_unity, check_product_support,
    check_reconstruction, EmbeddingParams,
};
use crate::lab::operators::{
    check_g_bc, check_g_ct, check_g_lsigma, check_gamma_ct, check_gamma_lsigma, check_v_ct, check_v_lsigma,
    TimeNodes,
};
use crate::lab::report::{gate, CheckError, CheckReport};
use crate::lp::family::DyadicFamily;
use crate::random::{random_annulus, random_smooth, random_solenoidal};
use crate::solver::config::{InitialCondition, SolverConfig};
use crate::solver::stepper::solve_ivp;

/// Every check id a suite may name.
pub const CHECK_IDS: &[&str] = &[
    "partition_of_unity",
    "orthogonality",
    "product_support",
    "paraproduct_reconstruction",
    "bernstein",
    "embedding",
    "heat_smoothing",
    "product",
    "moser",
    "tau",
    "paraproduct_bounds",
    "k2_tail",
    "energy_monotone",
    "gronwall_differential",
    "apriori_bound",
    "gamma_ct",
    "gamma_lsigma",
    "v_ct",
    "v_lsigma",
    "g_ct",
    "g_lsigma",
    "g_bc",
];

/// Grid of a static check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
}

impl GridSpec {
    fn build(&self) -> Result<(Grid, DyadicFamily), CheckError> {
        let g = Grid::new(self.n, self.size)?;
        let fam = DyadicFamily::for_grid(&g);
        Ok((g, fam))
    }
}

/// Random test fields of a static check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub size: usize,
    /// Spectral support radius.
    pub k_max: f64,
    /// Spectral decay exponent: coefficients scale like `(1 + |k|²)^{−decay/2}`.
    #[serde(default)]
    pub decay: f64,
}

/// Seed of trial `i` in a check run with base seed `seed`.
pub fn trial_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64)
}

impl EnsembleSpec {
    fn scalars(&self, g: &Grid, seed: u64) -> Vec<SpectralField> {
        (0..self.size).map(|i| random_smooth(trial_seed(seed, i), g, 1, self.k_max, self.decay)).collect()
    }

    fn scalar_pairs(&self, g: &Grid, seed: u64) -> Vec<(SpectralField, SpectralField)> {
        (0..self.size)
            .map(|i| {
                let a = random_smooth(trial_seed(seed, 2 * i), g, 1, self.k_max, self.decay);
                let b = random_smooth(trial_seed(seed, 2 * i + 1), g, 1, self.k_max, self.decay);
                (a, b)
            })
            .collect()
    }

    fn velocities(&self, g: &Grid, seed: u64) -> Vec<SpectralField> {
        (0..self.size).map(|i| random_solenoidal(trial_seed(seed, i), g, self.k_max, 1.0)).collect()
    }
}

/// A dynamic check's solver run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub config: SolverConfig,
    pub initial: InitialCondition,
}

impl RunSpec {
    fn run(&self, initial: &InitialCondition) -> Result<crate::solver::trajectory::Trajectory, CheckError> {
        let g = self.config.grid()?;
        Ok(solve_ivp(&initial.build(&g, self.config.seed), &self.config)?)
    }
}

fn default_spread() -> f64 {
    4.0
}

/// One suite entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    PartitionOfUnity { grid: GridSpec },
    Orthogonality { grid: GridSpec, ensemble: EnsembleSpec },
    ProductSupport { grid: GridSpec, ensemble: EnsembleSpec },
    ParaproductReconstruction { grid: GridSpec, ensemble: EnsembleSpec },
    /// Annulus fields for every `j ∈ [j_min, j_max]`, `ensemble` of each.
    Bernstein {
        grid: GridSpec,
        ensemble: usize,
        j_min: u32,
        j_max: u32,
        alpha: f64,
        p: f64,
        q: f64,
        #[serde(default = "default_spread")]
        spread_bound: f64,
    },
    Embedding { grid: GridSpec, ensemble: EnsembleSpec, params: EmbeddingParams },
    HeatSmoothing { grid: GridSpec, ensemble: EnsembleSpec, params: SmoothingParams, t_min: f64, t_max: f64, points: usize },
    Product { grid: GridSpec, ensemble: EnsembleSpec, s: f64, p: f64, p1: f64, q: f64 },
    Moser { grid: GridSpec, ensemble: EnsembleSpec, params: LeibnizParams },
    Tau { grid: GridSpec, ensemble: EnsembleSpec, params: StressParams },
    ParaproductBounds { grid: GridSpec, ensemble: EnsembleSpec, j_min: usize, j_max: usize, p: f64 },
    K2Tail { r: f64, k_max: i32 },
    EnergyMonotone { run: RunSpec, #[serde(default = "one")] tol_constant: f64 },
    GronwallDifferential { run: RunSpec, r: f64, q: f64 },
    /// Without `amplitudes`, a single run; with them, a sweep of the initial
    /// shape whose `sup C_impl` magnitudes must agree within a factor 10.
    AprioriBound {
        run: RunSpec,
        r: f64,
        q: f64,
        #[serde(default)]
        amplitudes: Vec<f64>,
    },
    GammaCt { grid: GridSpec, ensemble: EnsembleSpec, params: SmoothingParams, #[serde(default)] nodes: TimeNodes },
    GammaLsigma { grid: GridSpec, ensemble: EnsembleSpec, params: SmoothingParams, #[serde(default)] nodes: TimeNodes },
    VCt { grid: GridSpec, ensemble: EnsembleSpec, params: StressParams, a: f64, #[serde(default)] nodes: TimeNodes },
    VLsigma {
        grid: GridSpec,
        ensemble: EnsembleSpec,
        params: StressParams,
        sigma: f64,
        #[serde(default)]
        nodes: TimeNodes,
    },
    GCt {
        grid: GridSpec,
        ensemble: EnsembleSpec,
        params: SmoothingParams,
        k0: f64,
        alpha: f64,
        #[serde(default)]
        nodes: TimeNodes,
    },
    GLsigma {
        grid: GridSpec,
        ensemble: EnsembleSpec,
        params: SmoothingParams,
        sigma0: f64,
        alpha: f64,
        #[serde(default)]
        nodes: TimeNodes,
    },
    GBc { grid: GridSpec, ensemble: EnsembleSpec, params: SmoothingParams, alpha: f64, #[serde(default)] nodes: TimeNodes },
}

fn one() -> f64 {
    1.0
}

/// A suite file: `{"checks": [...]}` with an optional base seed.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    #[serde(default)]
    pub seed: Option<u64>,
    pub checks: Vec<CheckSpec>,
}

/// Parses a suite, reporting unknown check ids separately from malformed
/// parameters.
pub fn parse_suite(value: serde_json::Value) -> Result<Suite, CheckError> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Raw {
        #[serde(default)]
        seed: Option<u64>,
        checks: Vec<serde_json::Value>,
    }
    let raw: Raw = serde_json::from_value(value).map_err(|e| CheckError::Invalid(e.to_string()))?;
    let mut checks = Vec::with_capacity(raw.checks.len());
    for (i, entry) in raw.checks.into_iter().enumerate() {
        let id = entry
            .get("check")
            .and_then(|v| v.as_str())
            .ok_or_else(|| CheckError::Invalid(format!("entry {i} has no string `check` field")))?;
        if !CHECK_IDS.contains(&id) {
            return Err(CheckError::UnknownCheck(id.to_string()));
        }
        let id = id.to_string();
        checks.push(serde_json::from_value(entry).map_err(|e| CheckError::Invalid(format!("entry {i} ({id}): {e}")))?);
    }
    Ok(Suite { seed: raw.seed, checks })
}

impl CheckSpec {
    pub fn check_id(&self) -> &'static str {
        match self {
            CheckSpec::PartitionOfUnity { .. } => "partition_of_unity",
            CheckSpec::Orthogonality { .. } => "orthogonality",
            CheckSpec::ProductSupport { .. } => "product_support",
            CheckSpec::ParaproductReconstruction { .. } => "paraproduct_reconstruction",
            CheckSpec::Bernstein { .. } => "bernstein",
            CheckSpec::Embedding { .. } => "embedding",
            CheckSpec::HeatSmoothing { .. } => "heat_smoothing",
            CheckSpec::Product { .. } => "product",
            CheckSpec::Moser { .. } => "moser",
            CheckSpec::Tau { .. } => "tau",
            CheckSpec::ParaproductBounds { .. } => "paraproduct_bounds",
            CheckSpec::K2Tail { .. } => "k2_tail",
            CheckSpec::EnergyMonotone { .. } => "energy_monotone",
            CheckSpec::GronwallDifferential { .. } => "gronwall_differential",
            CheckSpec::AprioriBound { .. } => "apriori_bound",
            CheckSpec::GammaCt { .. } => "gamma_ct",
            CheckSpec::GammaLsigma { .. } => "gamma_lsigma",
            CheckSpec::VCt { .. } => "v_ct",
            CheckSpec::VLsigma { .. } => "v_lsigma",
            CheckSpec::GCt { .. } => "g_ct",
            CheckSpec::GLsigma { .. } => "g_lsigma",
            CheckSpec::GBc { .. } => "g_bc",
        }
    }
}

/// Runs one check with ensemble seeds derived from `seed`.
pub fn run_check(spec: &CheckSpec, seed: u64) -> Result<CheckReport, CheckError> {
    match spec {
        CheckSpec::PartitionOfUnity { grid } => Ok(check_partition_of_unity(&grid.build()?.1)),
        CheckSpec::Orthogonality { grid, ensemble } => {
            let (g, fam) = grid.build()?;
            check_orthogonality(&fam, &ensemble.scalars(&g, seed))
        }
        CheckSpec::ProductSupport { grid, ensemble } => {
            let (g, fam) = grid.build()?;
            check_product_support(&fam, &ensemble.scalar_pairs(&g, seed))
        }
        CheckSpec::ParaproductReconstruction { grid, ensemble } => {
            let (g, fam) = grid.build()?;
            check_reconstruction(&fam, &ensemble.scalar_pairs(&g, seed))
        }
        CheckSpec::Bernstein { grid, ensemble, j_min, j_max, alpha, p, q, spread_bound } => {
            let (g, _) = grid.build()?;
            gate("bernstein", j_min <= j_max, || "need j_min <= j_max".into())?;
            let mut fields = Vec::new();
            for j in *j_min..=*j_max {
                for i in 0..*ensemble {
                    fields.push((j, random_annulus(trial_seed(seed, i) ^ u64::from(j) << 32, j, &g, 1)?));
                }
            }
            check_bernstein(&fields, *alpha, *p, *q, *spread_bound)
        }
        CheckSpec::Embedding { grid, ensemble, params } => {
            let (g, fam) = grid.build()?;
            check_embedding(&fam, &ensemble.scalars(&g, seed), *params)
        }
        CheckSpec::HeatSmoothing { grid, ensemble, params, t_min, t_max, points } => {
            let (g, fam) = grid.build()?;
            gate("heat_smoothing", *t_min > 0.0 && t_max > t_min && *points >= 2, || {
                "need 0 < t_min < t_max and at least two points".into()
            })?;
            let ratio = (t_max / t_min).ln() / (*points as f64 - 1.0);
            let t: Vec<f64> = (0..*points).map(|i| t_min * (ratio * i as f64).exp()).collect();
            check_heat_smoothing(&fam, &ensemble.scalars(&g, seed), *params, &t)
        }
        CheckSpec::Product { grid, ensemble, s, p, p1, q } => {
            let (g, fam) = grid.build()?;
            check_product(&fam, &ensemble.scalars(&g, seed), *s, *p, *p1, *q)
        }
        CheckSpec::Moser { grid, ensemble, params } => {
            let (g, fam) = grid.build()?;
            check_moser(&fam, &ensemble.scalar_pairs(&g, seed), *params)
        }
        CheckSpec::Tau { grid, ensemble, params } => {
            let (g, fam) = grid.build()?;
            check_tau(&fam, &ensemble.velocities(&g, seed), *params)
        }
        CheckSpec::ParaproductBounds { grid, ensemble, j_min, j_max, p } => {
            let (g, fam) = grid.build()?;
            check_paraproduct_bounds(&fam, &ensemble.scalar_pairs(&g, seed), (*j_min, *j_max), *p)
        }
        CheckSpec::K2Tail { r, k_max } => check_k2_tail(*r, *k_max),
        CheckSpec::EnergyMonotone { run, tol_constant } => {
            let traj = run.run(&run.initial)?;
            check_energy_monotone(&traj, run.config.alpha, *tol_constant)
        }
        CheckSpec::GronwallDifferential { run, r, q } => {
            crate::lab::dynamics::gate_indices("gronwall_differential", *r, *q)?;
            check_gronwall_differential(&run.run(&run.initial)?, *r, *q)
        }
        CheckSpec::AprioriBound { run, r, q, amplitudes } => {
            crate::lab::dynamics::gate_indices("apriori_bound", *r, *q)?;
            if amplitudes.is_empty() {
                return check_apriori_bound(&run.run(&run.initial)?, *r, *q);
            }
            let runs = amplitudes
                .iter()
                .map(|&a| Ok((a, run.run(&run.initial.with_amplitude(a))?)))
                .collect::<Result<Vec<_>, CheckError>>()?;
            check_apriori_sweep(&runs, *r, *q)
        }
        CheckSpec::GammaCt { grid, ensemble, params, nodes } => {
            let (g, fam) = grid.build()?;
            check_gamma_ct(&fam, &ensemble.velocities(&g, seed), *params, *nodes)
        }
        CheckSpec::GammaLsigma { grid, ensemble, params, nodes } => {
            let (g, fam) = grid.build()?;
            check_gamma_lsigma(&fam, &ensemble.velocities(&g, seed), *params, *nodes)
        }
        CheckSpec::VCt { grid, ensemble, params, a, nodes } => {
            let (g, fam) = grid.build()?;
            check_v_ct(&fam, &ensemble.velocities(&g, seed), *params, *a, *nodes)
        }
        CheckSpec::VLsigma { grid, ensemble, params, sigma, nodes } => {
            let (g, fam) = grid.build()?;
            check_v_lsigma(&fam, &ensemble.velocities(&g, seed), *params, *sigma, *nodes)
        }
        CheckSpec::GCt { grid, ensemble, params, k0, alpha, nodes } => {
            let (g, fam) = grid.build()?;
            check_g_ct(&fam, &ensemble.velocities(&g, seed), *params, *k0, *alpha, *nodes)
        }
        CheckSpec::GLsigma { grid, ensemble, params, sigma0, alpha, nodes } => {
            let (g, fam) = grid.build()?;
            check_g_lsigma(&fam, &ensemble.velocities(&g, seed), *params, *sigma0, *alpha, *nodes)
        }
        CheckSpec::GBc { grid, ensemble, params, alpha, nodes } => {
            let (g, fam) = grid.build()?;
            check_g_bc(&fam, &ensemble.velocities(&g, seed), *params, *alpha, *nodes)
        }
    }
}
