//! Check reports and the errors a check can raise.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{FieldError, SolverError};

/// Outcome of one check: the per-trial ratios whose supremum is the empirical
/// constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub params: serde_json::Value,
    pub ensemble_size: usize,
    pub ratios: Vec<f64>,
    /// Supremum of `ratios` (0 for an empty ensemble).
    pub max_ratio: f64,
    /// Largest ratio per dyadic scale, when the check asserts scale stability.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_maxima: Option<Vec<f64>>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    /// Builds a report that passes iff every ratio is finite.
    pub fn new(check_id: &str, params: serde_json::Value, ensemble_size: usize, ratios: Vec<f64>) -> Self {
        let finite = ratios.iter().all(|r| r.is_finite());
        let max_ratio = if finite {
            ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        } else if ratios.iter().any(|r| r.is_nan()) {
            f64::NAN
        } else {
            f64::INFINITY
        };
        let max_ratio = if ratios.is_empty() { 0.0 } else { max_ratio };
        CheckReport {
            check_id: check_id.to_string(),
            params,
            ensemble_size,
            ratios,
            max_ratio,
            scale_maxima: None,
            pass: finite,
            notes: Vec::new(),
        }
    }

    /// Records per-scale maxima and fails the report unless the positive ones
    /// lie within a factor 10 of each other.
    pub fn with_scales(mut self, maxima: Vec<f64>) -> Self {
        let pos: Vec<f64> = maxima.iter().copied().filter(|m| *m > 0.0).collect();
        if let (Some(lo), Some(hi)) =
            (pos.iter().copied().reduce(f64::min), pos.iter().copied().reduce(f64::max))
        {
            if hi.is_nan() || lo.is_nan() || hi > 10.0 * lo {
                self.pass = false;
                self.notes.push(format!("scale maxima spread {:.3e} exceeds 10", hi / lo));
            }
        }
        self.scale_maxima = Some(maxima);
        self
    }

    /// Fails the report with `note` unless `ok`.
    pub fn require(mut self, ok: bool, note: impl Into<String>) -> Self {
        if !ok {
            self.pass = false;
            self.notes.push(note.into());
        }
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

#[derive(Debug, Error)]
pub enum CheckError {
    /// The parameters violate the admissibility conditions of the inequality.
    #[error("{check_id}: parameters rejected: {reason}")]
    ParameterGate { check_id: String, reason: String },
    #[error("unknown check id `{0}`")]
    UnknownCheck(String),
    #[error("invalid check description: {0}")]
    Invalid(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

pub(crate) fn gate(check_id: &str, ok: bool, reason: impl FnOnce() -> String) -> Result<(), CheckError> {
    if ok {
        Ok(())
    } else {
        Err(CheckError::ParameterGate { check_id: check_id.to_string(), reason: reason() })
    }
}

/// `num / den`, with `0/0 = 0`.
pub(crate) fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 && den == 0.0 {
        0.0
    } else {
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn pass_tracks_finiteness_and_spread() {
        let r = CheckReport::new("x", json!({}), 2, vec![1.0, 3.0]);
        assert!(r.pass);
        assert_eq!(r.max_ratio, 3.0);
        assert!(!CheckReport::new("x", json!({}), 1, vec![f64::INFINITY]).pass);
        assert!(CheckReport::new("x", json!({}), 0, vec![]).pass);
        assert!(r.clone().with_scales(vec![1.0, 5.0, 0.0]).pass);
        assert!(!r.with_scales(vec![1.0, 20.0]).pass);
    }
}
