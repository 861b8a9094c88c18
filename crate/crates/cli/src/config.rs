//! JSON configuration files of the subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use lans_core::lp::norms::exponent;
use lans_core::solver::{ExistenceSearch, InitialCondition, SolverConfig};

use crate::CliError;

/// Reads and deserializes a JSON file; syntax and schema errors carry
/// `path:line:column` and the offending source line.
pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(diagnostic(path, &text, &e)))
}

/// Raw JSON value of a config file, for the manifest snapshot.
pub fn load_value(path: &Path) -> Result<serde_json::Value, CliError> {
    load_json(path)
}

fn diagnostic(path: &Path, text: &str, e: &serde_json::Error) -> String {
    let (line, col) = (e.line(), e.column());
    let mut msg = format!("{}:{line}:{col}: {e}", path.display());
    if let Some(src) = line.checked_sub(1).and_then(|i| text.lines().nth(i)) {
        msg.push_str(&format!("\n  {src}\n  {}^", " ".repeat(col.saturating_sub(1))));
    }
    msg
}

/// `solve` and `picard` configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub initial: InitialCondition,
    /// Write a snapshot every this many steps (0: none). Overrides
    /// `solver.sample_stride` when positive.
    #[serde(default)]
    pub snapshot_stride: usize,
    /// Also emit the implied a priori constant along the run (`solve` only).
    #[serde(default)]
    pub apriori_profile: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Alpha,
    Amplitude,
    #[serde(rename = "N")]
    #[value(name = "N")]
    Size,
}

/// `sweep` configuration: a base run and the values of one axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub solver: SolverConfig,
    pub initial: InitialCondition,
    #[serde(default)]
    pub axis: Option<SweepAxis>,
    pub values: Vec<f64>,
    /// Bisection controls of the amplitude axis.
    #[serde(default)]
    pub search: ExistenceSearch,
}

/// Where `lp-analyze` gets its field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSource {
    /// A snapshot file, relative to the config file's directory.
    Snapshot { path: PathBuf },
    Generated {
        dim: usize,
        #[serde(rename = "N")]
        size: usize,
        initial: InitialCondition,
        #[serde(default)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexSpec {
    pub s: f64,
    #[serde(with = "exponent")]
    pub p: f64,
    #[serde(with = "exponent")]
    pub q: f64,
}

/// `lp-analyze` configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeConfig {
    pub field: FieldSource,
    pub indices: Vec<IndexSpec>,
    /// Top dyadic block (default: the largest the grid allows).
    #[serde(default)]
    pub j_max: Option<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagnostics_point_at_the_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.json");
        fs::write(&p, "{\n  \"solver\": {\n    \"alpha\": 1,,\n  }\n}\n").unwrap();
        let err = load_json::<RunConfig>(&p).unwrap_err().to_string();
        assert!(err.contains("bad.json:3:"), "{err}");
        assert!(err.contains("\"alpha\": 1,,"), "{err}");
    }

    #[test]
    fn axis_names() {
        let a: SweepAxis = serde_json::from_str("\"N\"").unwrap();
        assert_eq!(a, SweepAxis::Size);
        let a: SweepAxis = serde_json::from_str("\"alpha\"").unwrap();
        assert_eq!(a, SweepAxis::Alpha);
    }
}
