//! End-to-end runs of the `lans-lab` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn suites() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../suites")
}

fn lans_lab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lans-lab"))
        .args(args)
        .current_dir(cwd)
        .env("RUST_LOG", "error")
        .output()
        .expect("spawn lans-lab")
}

fn run(cmd: &str, config: &Path, out: &Path) -> Output {
    let cwd = out.parent().unwrap();
    lans_lab(&[cmd, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()], cwd)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn files_under(root: &Path) -> Vec<String> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/"));
            }
        }
    }
    out.sort();
    out
}

fn manifest(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn zero_initial_data_stays_zero_and_manifest_is_complete() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run("solve", &configs().join("zero.json"), &out);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&out.join("trajectory.csv"));
    assert_eq!(rows.len(), 11);
    for r in &rows {
        assert!(r[1..].iter().all(|v| *v == 0.0), "{r:?}");
    }
    let m = manifest(&out);
    let listed: Vec<String> = m["files"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    assert_eq!(listed, files_under(&out));
    assert_eq!(m["command"], "solve");
    assert!(m["version"].as_str().unwrap().starts_with("lans-lab v"));
    // Nothing besides the output directory appears in the working directory.
    assert_eq!(files_under(dir.path()).iter().filter(|f| !f.starts_with("out/")).count(), 0);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = lans_lab(&["bogus"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = lans_lab(&["solve"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_config_reports_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, "{\n  \"solver\": { \"alpha\": 1.0,, \"dim\": 3 },\n  \"initial\": { \"kind\": \"zero\" }\n}\n").unwrap();
    let o = run("solve", &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("bad.json:2:"), "{err}");
    assert!(err.contains("\"alpha\": 1.0,,"), "{err}");
}

#[test]
fn unknown_fields_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("extra.json");
    fs::write(
        &cfg,
        r#"{"solver": {"alpha": 1.0, "dim": 3, "size": 16, "dt": 0.1, "t_final": 0.1, "viscosity": 2}, "initial": {"kind": "zero"}}"#,
    )
    .unwrap();
    let o = run("solve", &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn unknown_check_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.json");
    fs::write(&cfg, r#"{"checks": [{"check": "no_such_check"}]}"#).unwrap();
    let o = run("verify", &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no_such_check"));
}

#[test]
fn blow_up_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("wild.json");
    fs::write(
        &cfg,
        r#"{"solver": {"alpha": 0.0, "nu": 1e-4, "dim": 3, "size": 8, "dt": 0.1, "t_final": 5.0},
            "initial": {"kind": "random_solenoidal", "amplitude": 1000.0, "k_max": 2.0}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = run("solve", &cfg, &out);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(out.join("manifest.json").exists());
}

#[test]
fn oversized_picard_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run("picard", &configs().join("picard_oversized.json"), &out);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(out.join("picard_report.json").exists());
    let listed = manifest(&out)["files"].as_array().unwrap().len();
    assert_eq!(listed, files_under(&out).len());
}

#[test]
fn gated_check_exits_5_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run("verify", &suites().join("apriori_r15.json"), &out);
    assert_eq!(o.status.code(), Some(5));
    let rep: Value =
        serde_json::from_str(&fs::read_to_string(out.join("reports/000_apriori_bound.json")).unwrap()).unwrap();
    assert_eq!(rep["pass"], false);
    assert_eq!(rep["error"]["kind"], "parameter_gate");
}

#[test]
fn empty_suite_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run("verify", &suites().join("empty.json"), &out);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s: Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(s["checks"].as_array().unwrap().len(), 0);
}

#[test]
fn single_value_size_sweep_matches_solve() {
    let dir = tempfile::tempdir().unwrap();
    let base = r#""solver": {"alpha": 0.5, "dim": 2, "size": 16, "dt": 0.01, "t_final": 0.2, "seed": 4},
                  "initial": {"kind": "random_solenoidal", "amplitude": 1.0, "k_max": 4.0}"#;
    let solve_cfg = dir.path().join("solve.json");
    fs::write(&solve_cfg, format!("{{{base}}}")).unwrap();
    let sweep_cfg = dir.path().join("sweep.json");
    fs::write(&sweep_cfg, format!("{{{base}, \"axis\": \"N\", \"values\": [16]}}")).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run("solve", &solve_cfg, &a).status.code(), Some(0));
    assert_eq!(run("sweep", &sweep_cfg, &b).status.code(), Some(0));
    let last = fs::read_to_string(a.join("trajectory.csv")).unwrap().lines().last().unwrap().to_string();
    let row = fs::read_to_string(b.join("sweep.csv")).unwrap().lines().nth(1).unwrap().to_string();
    let (n, rest) = row.split_once(',').unwrap();
    assert_eq!(n.parse::<f64>().unwrap(), 16.0);
    assert_eq!(rest, last);
}

#[test]
fn lp_analyze_writes_family_and_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run("lp-analyze", &configs().join("lp_analyze.json"), &out);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let family = fs::read_to_string(out.join("family.csv")).unwrap();
    assert!(family.starts_with("k2,low,psi_0,psi_1,psi_2,psi_3\n"));
    // Columns of the family sum to one at every resolved wavenumber.
    for line in family.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        if v[0] <= 64.0 {
            assert!((v[1..].iter().sum::<f64>() - 1.0).abs() < 1e-12, "{line}");
        }
    }
    let norms: Value = serde_json::from_str(&fs::read_to_string(out.join("norms.json")).unwrap()).unwrap();
    assert_eq!(norms["norms"].as_array().unwrap().len(), 2);
}

#[test]
fn threads_option_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = lans_lab(
        &["--threads", "1", "solve", "--config", configs().join("zero.json").to_str().unwrap(), "--out", out.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = lans_lab(
        &["--threads", "0", "solve", "--config", configs().join("zero.json").to_str().unwrap(), "--out", out.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn shipped_configs_parse() {
    use lans_cli::config::{load_json, AnalyzeConfig, RunConfig, SweepConfig};
    for entry in fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_stem().unwrap().to_string_lossy().into_owned();
        let ok = match name.as_str() {
            "schema" => continue,
            "lp_analyze" => load_json::<AnalyzeConfig>(&path).map(drop),
            n if n.starts_with("sweep_") => load_json::<SweepConfig>(&path).map(drop),
            _ => load_json::<RunConfig>(&path).map(drop),
        };
        assert!(ok.is_ok(), "{name}: {ok:?}");
    }
    for entry in fs::read_dir(suites()).unwrap() {
        let path = entry.unwrap().path();
        let value: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert!(lans_core::lab::parse_suite(value).is_ok(), "{}", path.display());
    }
}

#[test]
fn default_suite_covers_every_check_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = lans_lab(
        &["verify", "--config", suites().join("default.json").to_str().unwrap(), "--out", out.to_str().unwrap(), "--ratios"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s: Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let mut ids: Vec<&str> = s["checks"].as_array().unwrap().iter().map(|c| c["check_id"].as_str().unwrap()).collect();
    ids.sort_unstable();
    let mut all = lans_core::lab::CHECK_IDS.to_vec();
    all.sort_unstable();
    assert_eq!(ids, all);
    assert!(s["failed"].as_array().unwrap().is_empty());
}
