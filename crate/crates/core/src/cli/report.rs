//! Comparison of fitted scaling exponents against predicted regimes.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::montecarlo::{scaling_fit, EmpiricalResult};

/// Identifies one (map, observable) experiment on both sides of a comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeKey {
    pub gamma: f64,
    pub b: f64,
    pub observable: String,
}

impl RegimeKey {
    fn matches(&self, other: &RegimeKey) -> bool {
        self.gamma == other.gamma && self.b == other.b && self.observable == other.observable
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSet {
    pub key: RegimeKey,
    pub result: EmpiricalResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictedEntry {
    pub key: RegimeKey,
    pub p: f64,
    pub exponent: f64,
    pub log_factor: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub key: RegimeKey,
    pub p: f64,
    pub fitted: f64,
    pub fitted_stderr: f64,
    pub predicted: f64,
    pub log_factor: bool,
    pub difference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub tolerance: f64,
    pub verdicts: Vec<Verdict>,
    pub all_pass: bool,
}

/// One verdict per predicted entry: the moment rows of the matching empirical
/// set are fitted by a power law in `n` and compared with the prediction.
pub fn write_report(empirical: &[EmpiricalSet], predicted: &[PredictedEntry], tolerance: f64) -> Result<ComparisonReport> {
    if empirical.is_empty() {
        return Err(invalid("no empirical results to compare"));
    }
    if predicted.is_empty() {
        return Err(invalid("no predictions to compare against"));
    }
    if !(tolerance >= 0.0) {
        return Err(invalid("tolerance must be non-negative"));
    }
    let mut verdicts = Vec::with_capacity(predicted.len());
    for pred in predicted {
        let set = empirical
            .iter()
            .find(|s| s.key.matches(&pred.key))
            .ok_or_else(|| Error::Config(format!("no empirical result for key {:?}", pred.key)))?;
        let points: Vec<(f64, f64, f64)> = set
            .result
            .rows
            .iter()
            .filter(|r| r.statistic == "moment" && r.param == pred.p)
            .map(|r| (r.n as f64, r.estimate, r.stderr))
            .collect();
        if points.is_empty() {
            return Err(Error::Config(format!(
                "empirical result for {:?} has no moment rows at p = {}",
                pred.key, pred.p
            )));
        }
        let fit = scaling_fit(&points, false)?;
        let difference = (fit.exponent - pred.exponent).abs();
        verdicts.push(Verdict {
            key: pred.key.clone(),
            p: pred.p,
            fitted: fit.exponent,
            fitted_stderr: fit.stderr,
            predicted: pred.exponent,
            log_factor: pred.log_factor,
            difference,
            tolerance,
            pass: difference <= tolerance,
        });
    }
    let all_pass = verdicts.iter().all(|v| v.pass);
    Ok(ComparisonReport {
        tolerance,
        verdicts,
        all_pass,
    })
}
