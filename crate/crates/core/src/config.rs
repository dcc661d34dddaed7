//! Experiment configuration files and their canonical digests.
//!
//! A config file is one JSON object with the optional sections `map`,
//! `observable`, `alpha`, `quantile`, `sim` and `bounds`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::{LdVariant, Method};
use crate::coefficients::{AlphaModel, AlphaPair};
use crate::dynamics::MapSpec;
use crate::error::{Error, Result};
use crate::montecarlo::{Process, SimConfig, SimParams};
use crate::observables::{observable_quantile_params, Observable, QuantileModel};

/// Serialises `value` as compact JSON with object keys in sorted order.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    // serde_json::Value keeps object keys in a BTreeMap, so this sorts them.
    let v = serde_json::to_value(value)?;
    Ok(serde_json::to_string(&v)?)
}

/// Hex SHA-256 of the canonical JSON of `value`.
pub fn config_hash<T: Serialize>(value: &T) -> Result<String> {
    Ok(hex::encode(Sha256::digest(canonical_json(value)?.as_bytes())))
}

/// Grids for the `bounds` subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    pub n_grid: Vec<u64>,
    pub p: f64,
    #[serde(default)]
    pub x_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default)]
    pub x_free: bool,
    #[serde(default)]
    pub large_deviation: Vec<LdVariant>,
    #[serde(default)]
    pub method: Method,
}

/// Coefficients: either one sequence for both orders or an explicit pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSection {
    Pair(AlphaPair),
    Single(AlphaModel),
}

impl AlphaSection {
    pub fn pair(&self) -> AlphaPair {
        match self {
            AlphaSection::Pair(p) => p.clone(),
            AlphaSection::Single(m) => AlphaPair::same(m.clone()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<Observable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AlphaSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantile: Option<QuantileModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsSection>,
}

fn missing(section: &str) -> Error {
    Error::Config(format!("config has no `{section}` section"))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_canonical_json(&self) -> Result<String> {
        canonical_json(self)
    }

    pub fn hash(&self) -> Result<String> {
        config_hash(self)
    }

    /// Simulation config: a map with an observable, or the moving-average
    /// oracle named in `sim.oracle`.
    pub fn sim_config(&self) -> Result<SimConfig> {
        let params = self.sim.clone().ok_or_else(|| missing("sim"))?;
        let process = match (&params.oracle, &self.map, &self.observable) {
            (Some(o), _, _) => Process::MovingAverage {
                weights: o.weights.clone(),
                sign: o.sign,
            },
            (None, Some(map), Some(obs)) => Process::Map {
                map: map.clone(),
                observable: obs.clone(),
            },
            (None, None, _) => return Err(missing("map")),
            (None, _, None) => return Err(missing("observable")),
        };
        let cfg = SimConfig {
            process,
            params,
            threads: None,
        };
        cfg.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// Coefficients, defaulting to the power law of the configured map.
    pub fn alpha_pair(&self) -> Result<AlphaPair> {
        match (&self.alpha, &self.map) {
            (Some(a), _) => Ok(a.pair()),
            (None, Some(m)) => Ok(AlphaPair::same(AlphaModel::power_law(1.0, m.gamma))),
            (None, None) => Err(missing("alpha")),
        }
    }

    /// Quantile model, defaulting to the tag of the configured observable.
    pub fn quantile_model(&self) -> Result<QuantileModel> {
        match (&self.quantile, &self.observable, &self.map) {
            (Some(q), _, _) => Ok(q.clone()),
            (None, Some(f), Some(m)) => observable_quantile_params(f, m.gamma),
            _ => Err(missing("quantile")),
        }
    }
}
