//! The subcommands. Each reads one JSON file, writes into its output
//! directory and finishes with a manifest.

use std::fs;
use std::path::Path;

use lans_core::lab::dynamics::apriori_profile;
use lans_core::lab::{parse_suite, run_check, CheckError, CheckReport};
use lans_core::lp::family::build_dyadic_family;
use lans_core::lp::norms::{besov_parts, block_norms, norm_report, BesovIndex};
use lans_core::snapshot::{read_snapshot, write_snapshot};
use lans_core::error::SolverError;
use lans_core::solver::{estimate_existence_time, picard_solve, solve_ivp, Trajectory};
use lans_core::{Grid, SpectralField};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{load_json, load_value, AnalyzeConfig, FieldSource, RunConfig, SweepAxis, SweepConfig};
use crate::output::{csv_floats, fmt_f64, record_fields, OutputDir, TRAJECTORY_HEADER};
use crate::CliError;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("configs serialize")
}

fn load_run(path: &Path, seed: Option<u64>) -> Result<RunConfig, CliError> {
    let mut cfg: RunConfig = load_json(path)?;
    if let Some(s) = seed {
        cfg.solver.seed = s;
    }
    if cfg.snapshot_stride > 0 {
        cfg.solver.sample_stride = cfg.snapshot_stride;
    }
    cfg.solver.validate()?;
    Ok(cfg)
}

fn write_snapshots(out: &mut OutputDir, traj: &Trajectory, stride: usize) -> Result<(), CliError> {
    for (i, (t, f)) in traj.times().iter().zip(traj.fields()).enumerate() {
        if i % stride == 0 || i + 1 == traj.len() {
            let w = out.create_file(&format!("snapshots/u_{i:05}.field"))?;
            write_snapshot(w, &f.to_real(), *t)?;
        }
    }
    Ok(())
}

/// Integrates the configured run and writes `trajectory.csv`, optional
/// snapshots and the optional `c_impl.csv` profile.
pub fn solve(config: &Path, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let cfg = load_run(config, seed)?;
    let grid = cfg.solver.grid()?;
    let u0 = cfg.initial.build(&grid, cfg.solver.seed);
    let mut dir = OutputDir::create(out)?;
    let result = solve_ivp(&u0, &cfg.solver);
    let traj = match result {
        Ok(t) => t,
        Err(e) => {
            dir.finish("solve", cfg.solver.seed, &to_value(&cfg))?;
            return Err(e.into());
        }
    };
    dir.write_trajectory("trajectory.csv", traj.records())?;
    if cfg.snapshot_stride > 0 {
        // Fields are already stored at the snapshot stride.
        write_snapshots(&mut dir, &traj, 1)?;
    }
    if cfg.apriori_profile {
        let idx = cfg.solver.indices;
        let profile = apriori_profile(&traj, idx.r, idx.q).map_err(check_error)?;
        dir.write_csv("c_impl.csv", "t,c_impl", profile.iter().map(|(t, c)| csv_floats(&[*t, *c])))?;
    }
    dir.finish("solve", cfg.solver.seed, &to_value(&cfg))?;
    Ok(())
}

/// Runs the Picard iteration; residuals and the report are written even when
/// it fails to converge.
pub fn picard(config: &Path, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let cfg = load_run(config, seed)?;
    let grid = cfg.solver.grid()?;
    let u0 = cfg.initial.build(&grid, cfg.solver.seed);
    let mut dir = OutputDir::create(out)?;
    let (traj, report, failure) = match picard_solve(&u0, &cfg.solver) {
        Ok((traj, report)) => (Some(traj), report, None),
        Err(SolverError::NotConverged(report)) => {
            let f = SolverError::NotConverged(report.clone());
            (None, *report, Some(f))
        }
        Err(e) => {
            dir.finish("picard", cfg.solver.seed, &to_value(&cfg))?;
            return Err(e.into());
        }
    };
    dir.write_json("picard_report.json", &report)?;
    let rows = report.residuals.iter().enumerate().map(|(m, res)| {
        let ratio = if m == 0 { String::new() } else { fmt_f64(report.contraction_ratios[m - 1]) };
        format!("{},{},{},{}", m + 1, fmt_f64(*res), ratio, fmt_f64(report.membership[m + 1]))
    });
    dir.write_csv("residuals.csv", "iteration,residual,contraction_ratio,membership", rows)?;
    if let Some(traj) = &traj {
        dir.write_trajectory("trajectory.csv", traj.records())?;
        if cfg.snapshot_stride > 0 {
            write_snapshots(&mut dir, traj, cfg.snapshot_stride)?;
        }
    }
    dir.finish("picard", cfg.solver.seed, &to_value(&cfg))?;
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn check_error(e: CheckError) -> CliError {
    match e {
        CheckError::UnknownCheck(id) => CliError::UnknownCheck(id),
        CheckError::Invalid(m) => CliError::Config(m),
        CheckError::ParameterGate { check_id, reason } => {
            CliError::Failed(format!("{check_id}: parameter gate rejected the run: {reason}"))
        }
        CheckError::Solver(e) => CliError::Solver(e),
        CheckError::Field(e) => CliError::Solver(e.into()),
    }
}

#[derive(Serialize)]
struct SummaryEntry {
    index: usize,
    check_id: String,
    pass: bool,
    max_ratio: Option<f64>,
    report: String,
}

/// Runs every check of a suite, one JSON report each, plus `summary.json`.
pub fn verify(suite: &Path, out: &Path, seed: Option<u64>, ratios: bool) -> Result<(), CliError> {
    let raw = load_value(suite)?;
    let suite = parse_suite(raw.clone()).map_err(check_error)?;
    let seed = seed.or(suite.seed).unwrap_or(0);
    let mut dir = OutputDir::create(out)?;
    let mut summary = Vec::with_capacity(suite.checks.len());
    for (i, spec) in suite.checks.iter().enumerate() {
        let id = spec.check_id();
        let rel = format!("reports/{i:03}_{id}.json");
        let entry = match run_check(spec, seed) {
            Ok(report) => {
                dir.write_json(&rel, &report)?;
                if ratios {
                    write_ratios(&mut dir, &format!("reports/{i:03}_{id}_ratios.csv"), &report)?;
                }
                SummaryEntry { index: i, check_id: id.into(), pass: report.pass, max_ratio: Some(report.max_ratio), report: rel }
            }
            Err(e) => {
                let error = match &e {
                    CheckError::ParameterGate { reason, .. } => json!({"kind": "parameter_gate", "reason": reason}),
                    other => json!({"kind": "error", "message": other.to_string()}),
                };
                log::warn!("{id}: {e}");
                dir.write_json(&rel, &json!({"check_id": id, "params": to_value(spec), "pass": false, "error": error}))?;
                SummaryEntry { index: i, check_id: id.into(), pass: false, max_ratio: None, report: rel }
            }
        };
        log::info!("{} {}", entry.check_id, if entry.pass { "pass" } else { "FAIL" });
        summary.push(entry);
    }
    let failed: Vec<&str> = summary.iter().filter(|e| !e.pass).map(|e| e.check_id.as_str()).collect();
    dir.write_json("summary.json", &json!({"checks": summary, "failed": failed}))?;
    let msg = (!failed.is_empty()).then(|| format!("failing checks: {}", failed.join(", ")));
    dir.finish("verify", seed, &raw)?;
    match msg {
        Some(m) => Err(CliError::Failed(m)),
        None => Ok(()),
    }
}

fn write_ratios(dir: &mut OutputDir, rel: &str, report: &CheckReport) -> Result<(), CliError> {
    let rows = report.ratios.iter().enumerate().map(|(i, r)| format!("{i},{}", fmt_f64(*r)));
    Ok(dir.write_csv(rel, "trial,ratio", rows)?)
}

fn validate_values(values: &[f64]) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(CliError::Config("sweep needs at least one value".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Config("sweep values must be finite".into()));
    }
    let asc = values.windows(2).all(|w| w[0] < w[1]);
    let desc = values.windows(2).all(|w| w[0] > w[1]);
    if !(asc || desc) {
        return Err(CliError::Config("sweep values must be strictly sorted".into()));
    }
    Ok(())
}

/// Least-squares slope of `ln y` against `ln x` over the positive pairs.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn final_run(cfg: &lans_core::solver::SolverConfig, u0: &SpectralField) -> Result<(Trajectory, SpectralField), CliError> {
    let traj = solve_ivp(u0, cfg)?;
    let last = traj.last().expect("a run stores its final state").1.clone();
    Ok((traj, last))
}

/// One row per axis value: the final trajectory record (α and N axes, plus
/// the L² gap to the α = 0 run on the α axis) or the certified existence
/// time (amplitude axis).
pub fn sweep(config: &Path, out: &Path, seed: Option<u64>, axis: Option<SweepAxis>) -> Result<(), CliError> {
    let mut cfg: SweepConfig = load_json(config)?;
    if let Some(s) = seed {
        cfg.solver.seed = s;
    }
    let axis = axis.or(cfg.axis).ok_or_else(|| CliError::Config("no sweep axis given".into()))?;
    cfg.axis = Some(axis);
    validate_values(&cfg.values)?;
    cfg.solver.validate()?;
    let snapshot = to_value(&cfg);
    let mut dir = OutputDir::create(out)?;
    let result = sweep_rows(&cfg, axis);
    let (header, rows, summary) = match result {
        Ok(r) => r,
        Err(e) => {
            dir.finish("sweep", cfg.solver.seed, &snapshot)?;
            return Err(e);
        }
    };
    dir.write_csv("sweep.csv", &header, rows)?;
    dir.write_json("sweep_summary.json", &summary)?;
    dir.finish("sweep", cfg.solver.seed, &snapshot)?;
    Ok(())
}

fn sweep_rows(cfg: &SweepConfig, axis: SweepAxis) -> Result<(String, Vec<String>, Value), CliError> {
    let base = &cfg.solver;
    match axis {
        SweepAxis::Amplitude => {
            let table = estimate_existence_time(&cfg.values, &cfg.initial, base, cfg.search)?;
            let rows = table
                .iter()
                .map(|r| format!("{},{}", csv_floats(&[r.amplitude, r.data_norm, r.certified_t]), u8::from(r.capped)))
                .collect();
            let ts: Vec<f64> = table.iter().map(|r| r.certified_t).collect();
            let by_norm = {
                let mut v: Vec<(f64, f64)> = table.iter().map(|r| (r.data_norm, r.certified_t)).collect();
                v.sort_by(|a, b| a.0.total_cmp(&b.0));
                v.windows(2).all(|w| w[1].1 <= w[0].1)
            };
            Ok((
                "amplitude,data_norm,certified_t,capped".into(),
                rows,
                json!({"axis": "amplitude", "certified_t": ts, "non_increasing_in_data_norm": by_norm}),
            ))
        }
        SweepAxis::Alpha => {
            if cfg.values.iter().any(|a| *a < 0.0) {
                return Err(CliError::Config("alpha values must be >= 0".into()));
            }
            let grid = base.grid()?;
            let u0 = cfg.initial.build(&grid, base.seed);
            let mut reference_cfg = base.clone();
            reference_cfg.alpha = 0.0;
            let (_, reference) = final_run(&reference_cfg, &u0)?;
            let mut rows = Vec::new();
            let mut gaps = Vec::new();
            for &alpha in &cfg.values {
                let mut c = base.clone();
                c.alpha = alpha;
                let (traj, last) = final_run(&c, &u0)?;
                let gap = last.sub(&reference).l2_norm();
                gaps.push((alpha, gap));
                let rec = traj.records().last().expect("records");
                rows.push(format!("{},{},{}", fmt_f64(alpha), csv_floats(&record_fields(rec)), fmt_f64(gap)));
            }
            let slope = loglog_slope(&gaps);
            Ok((
                format!("alpha,{TRAJECTORY_HEADER},gap_l2"),
                rows,
                json!({"axis": "alpha", "gap_l2": gaps.iter().map(|g| g.1).collect::<Vec<_>>(), "loglog_slope": slope}),
            ))
        }
        SweepAxis::Size => {
            let mut rows = Vec::new();
            for &v in &cfg.values {
                if v.fract() != 0.0 || v < 1.0 {
                    return Err(CliError::Config(format!("N = {v} is not a positive integer")));
                }
                let mut c = base.clone();
                c.size = v as usize;
                c.validate()?;
                let grid = c.grid()?;
                let (traj, _) = final_run(&c, &cfg.initial.build(&grid, c.seed))?;
                let rec = traj.records().last().expect("records");
                rows.push(format!("{},{}", c.size, csv_floats(&record_fields(rec))));
            }
            Ok((format!("N,{TRAJECTORY_HEADER}"), rows, json!({"axis": "N", "rows": cfg.values.len()})))
        }
    }
}

/// Dumps the dyadic family tables and per-block norms of one field.
pub fn lp_analyze(config: &Path, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let mut cfg: AnalyzeConfig = load_json(config)?;
    if let (Some(s), FieldSource::Generated { seed: fs, .. }) = (seed, &mut cfg.field) {
        *fs = s;
    }
    let (field, t, used_seed) = match &cfg.field {
        FieldSource::Snapshot { path } => {
            let base = config.parent().unwrap_or(Path::new("."));
            let file = fs::File::open(base.join(path))
                .map_err(|e| CliError::Config(format!("{}: {e}", base.join(path).display())))?;
            let (f, t) = read_snapshot(file).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            (f.to_spectral(), t, 0)
        }
        FieldSource::Generated { dim, size, initial, seed } => {
            let grid = Grid::new(*dim, *size).map_err(|e| CliError::Config(e.to_string()))?;
            (initial.build(&grid, *seed), 0.0, *seed)
        }
    };
    let grid = field.grid().clone();
    let fam = build_dyadic_family(&grid, cfg.j_max.unwrap_or(grid.max_dyadic_index()))
        .map_err(|e| CliError::Config(e.to_string()))?;
    let idx: Vec<BesovIndex> = cfg
        .indices
        .iter()
        .map(|i| BesovIndex::new(i.s, i.p, i.q))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Config(e.to_string()))?;

    let mut dir = OutputDir::create(out)?;
    let j_max = fam.j_max() as i32;
    let header = std::iter::once("k2".to_string())
        .chain(std::iter::once("low".to_string()))
        .chain((0..=j_max).map(|j| format!("psi_{j}")))
        .collect::<Vec<_>>()
        .join(",");
    let rows = (0..=grid.max_k2()).map(|k2| {
        let w: Vec<f64> = (-1..=j_max).map(|j| fam.weight(j, k2)).collect();
        format!("{k2},{}", csv_floats(&w))
    });
    dir.write_csv("family.csv", &header, rows)?;

    let mut block_rows = Vec::new();
    let mut reports = Vec::new();
    for ix in &idx {
        let blocks = block_norms(&fam, &field, ix.p);
        for (b, v) in blocks.iter().enumerate() {
            let j = b as i32 - 1;
            let weighted = if j < 0 { *v } else { (f64::from(j) * ix.s).exp2() * v };
            block_rows.push(format!("{},{j},{}", csv_floats(&[ix.s, ix.p, ix.q]), csv_floats(&[*v, weighted])));
        }
        let (low, tilde) = besov_parts(&blocks, *ix);
        reports.push(json!({"low": low, "tilde": tilde, "report": norm_report(&fam, &field, *ix, "field")}));
    }
    dir.write_csv("blocks.csv", "s,p,q,j,block_norm,weighted", block_rows)?;
    dir.write_json(
        "norms.json",
        &json!({
            "field": {"n": grid.dim(), "N": grid.size(), "components": field.ncomp(), "t": t},
            "j_max": fam.j_max(),
            "unresolved_fraction": fam.unresolved_fraction(&field),
            "norms": reports,
        }),
    )?;
    dir.finish("lp-analyze", used_seed, &to_value(&cfg))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [0.1, 0.05, 0.025].iter().map(|a| (*a, 3.0 * a * a)).collect();
        assert!((loglog_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(loglog_slope(&[(1.0, 1.0)]), None);
        assert_eq!(loglog_slope(&[(1.0, 0.0), (2.0, 1.0)]), None);
    }

    #[test]
    fn sweep_values_must_be_sorted() {
        assert!(validate_values(&[0.1, 0.05, 0.025]).is_ok());
        assert!(validate_values(&[1.0, 2.0, 4.0]).is_ok());
        assert!(validate_values(&[1.0, 4.0, 2.0]).is_err());
        assert!(validate_values(&[]).is_err());
        assert!(validate_values(&[f64::NAN]).is_err());
    }
}
