//! Output directory bookkeeping, CSV formatting and the run manifest.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use lans_core::solver::NormRecord;

/// Artifact version recorded in every manifest.
pub const VERSION: &str = concat!("lans-lab v", env!("CARGO_PKG_VERSION"));

/// Header of trajectory CSV files.
pub const TRAJECTORY_HEADER: &str = "t,E,l2,grad_l2,besov_r,besov_1_plus_n_half,div_residual";

/// A float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv_floats(vals: &[f64]) -> String {
    vals.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(",")
}

pub fn record_fields(r: &NormRecord) -> [f64; 7] {
    [r.t, r.energy, r.l2, r.grad_l2, r.besov_r, r.besov_top, r.div_residual]
}

/// The directory a command writes into; every file goes through here and is
/// listed in the manifest.
pub struct OutputDir {
    root: PathBuf,
    label: String,
    files: Vec<String>,
    started: Instant,
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'a str,
    command: &'a str,
    seed: u64,
    output_dir: &'a str,
    config: &'a serde_json::Value,
    files: &'a [String],
    /// Wall-clock seconds; the only field that differs between reruns.
    timing: Timing,
}

#[derive(Serialize)]
struct Timing {
    seconds: f64,
}

impl OutputDir {
    pub fn create(root: &Path) -> io::Result<Self> {
        fs::create_dir_all(root)?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            label: root.display().to_string(),
            files: Vec::new(),
            started: Instant::now(),
        })
    }

    fn target(&mut self, rel: &str) -> io::Result<PathBuf> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        if !self.files.iter().any(|f| f == rel) {
            self.files.push(rel.to_string());
        }
        Ok(path)
    }

    /// Opens `rel` (relative to the root) for writing.
    pub fn create_file(&mut self, rel: &str) -> io::Result<BufWriter<fs::File>> {
        Ok(BufWriter::new(fs::File::create(self.target(rel)?)?))
    }

    /// Writes a CSV file with `header` and pre-formatted rows.
    pub fn write_csv(&mut self, rel: &str, header: &str, rows: impl IntoIterator<Item = String>) -> io::Result<()> {
        let mut w = self.create_file(rel)?;
        writeln!(w, "{header}")?;
        for row in rows {
            writeln!(w, "{row}")?;
        }
        w.flush()
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> io::Result<()> {
        let mut w = self.create_file(rel)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()
    }

    pub fn write_trajectory(&mut self, rel: &str, records: &[NormRecord]) -> io::Result<()> {
        self.write_csv(rel, TRAJECTORY_HEADER, records.iter().map(|r| csv_floats(&record_fields(r))))
    }

    /// Writes `manifest.json` listing every file written so far.
    pub fn finish(mut self, command: &str, seed: u64, config: &serde_json::Value) -> io::Result<()> {
        let seconds = self.started.elapsed().as_secs_f64();
        let mut files = self.files.clone();
        files.push("manifest.json".into());
        files.sort();
        let label = self.label.clone();
        let manifest = Manifest {
            version: VERSION,
            command,
            seed,
            output_dir: &label,
            config,
            files: &files,
            timing: Timing { seconds },
        };
        self.write_json("manifest.json", &manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(0.0), "0.0000000000000000e0");
        assert_eq!(fmt_f64(-2.5), "-2.5000000000000000e0");
        let v = 1.0 / 3.0;
        assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn manifest_lists_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path()).unwrap();
        out.write_csv("a/b.csv", "x", ["1".to_string()]).unwrap();
        out.finish("test", 7, &serde_json::json!({})).unwrap();
        let m: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(m["files"], serde_json::json!(["a/b.csv", "manifest.json"]));
        assert_eq!(m["seed"], 7);
        assert_eq!(fs::read_to_string(dir.path().join("a/b.csv")).unwrap(), "x\n1\n");
    }
}
