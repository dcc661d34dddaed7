//! Monte Carlo estimates for Birkhoff sums: moments and tails of maxima,
//! Donsker lines and their Hölder norms, long-run variance and scaling fits.
//!
//! Every replica draws from its own counter-based substream and results are
//! reduced in replica order, so outputs do not depend on the worker count.

mod result;
mod sigma;
pub mod stats;

use serde::{Deserialize, Serialize};

use crate::config::config_hash;
use crate::dynamics::{InitialPoint, MapSpec, MovingAverage, Orbit, OrbitConfig, DEFAULT_BURN_IN};
use crate::error::{invalid, Error, Result};
use crate::observables::{estimate_center, Center, Observable, MIN_CENTER_BUDGET};
use crate::rng::run_replicas;

pub use result::{EmpiricalResult, EmpiricalRow, Flag};
pub use sigma::{default_bandwidth, sigma2_estimate, sigma2_from_series};
pub use stats::{
    birkhoff_stats, donsker_breakpoints, donsker_path, holder_norm, ks_normal, mean_jackknife, partial_sums,
    quantile, scaling_fit, BirkhoffStats, HolderNorm, ScalingFit,
};

/// Smallest replica count accepted for statistical output.
pub const MIN_REPLICAS: usize = 100;

// Salts separating auxiliary runs from the replica substreams of the same seed.
const CENTER_SALT: u64 = 0x9e37_79b9_7f4a_7c15;
pub(crate) const SIGMA_SALT: u64 = 0xc2b2_ae3d_27d4_eb4f;

/// Moving-average oracle `X_i = Σ_j w_j ε_{i−j}`; with `sign` the increments
/// are replaced by their signs (Rademacher variables for a single weight).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    pub weights: Vec<f64>,
    #[serde(default)]
    pub sign: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Process {
    Map { map: MapSpec, observable: Observable },
    MovingAverage { weights: Vec<f64>, sign: bool },
}

fn default_burn_in() -> u64 {
    DEFAULT_BURN_IN
}
fn default_sigma_length() -> usize {
    1_000_000
}
fn default_center_budget() -> u64 {
    10_000_000
}

/// The `sim` section of an experiment config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimParams {
    pub n_grid: Vec<u64>,
    pub replicas: usize,
    pub seed: u64,
    #[serde(default = "default_burn_in")]
    pub burn_in: u64,
    #[serde(default)]
    pub p_list: Vec<f64>,
    #[serde(default)]
    pub x_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holder_beta: Option<f64>,
    /// Length of the single long orbit used for `σ²`.
    #[serde(default = "default_sigma_length")]
    pub sigma_length: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_bandwidth: Option<usize>,
    /// Iterations spent estimating `ν(f)` when the observable has no center.
    #[serde(default = "default_center_budget")]
    pub center_budget: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSpec>,
}

impl SimParams {
    pub fn new(n_grid: Vec<u64>, replicas: usize, seed: u64) -> Self {
        Self {
            n_grid,
            replicas,
            seed,
            burn_in: DEFAULT_BURN_IN,
            p_list: Vec::new(),
            x_grid: Vec::new(),
            holder_beta: None,
            sigma_length: default_sigma_length(),
            sigma_bandwidth: None,
            center_budget: default_center_budget(),
            oracle: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub process: Process,
    pub params: SimParams,
    /// Worker threads; never part of the config hash.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl SimConfig {
    pub fn map(map: MapSpec, observable: Observable, params: SimParams) -> Self {
        Self {
            process: Process::Map { map, observable },
            params,
            threads: None,
        }
    }

    pub fn moving_average(weights: Vec<f64>, sign: bool, params: SimParams) -> Self {
        Self {
            process: Process::MovingAverage { weights, sign },
            params,
            threads: None,
        }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn hash(&self) -> Result<String> {
        config_hash(self)
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        if p.n_grid.is_empty() || p.n_grid[0] == 0 {
            return Err(invalid("n_grid must be a non-empty list of positive integers"));
        }
        if p.n_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("n_grid must be strictly increasing"));
        }
        if p.replicas < MIN_REPLICAS {
            return Err(invalid(format!(
                "statistical output needs at least {MIN_REPLICAS} replicas, got {}",
                p.replicas
            )));
        }
        if p.p_list.iter().any(|&q| !(q > 0.0) || !q.is_finite()) {
            return Err(invalid("moment orders must be positive"));
        }
        if p.x_grid.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(invalid("deviation levels must be non-negative"));
        }
        if let Some(beta) = p.holder_beta {
            if !(beta > 0.0 && beta < 0.5) {
                return Err(invalid(format!(
                    "holder_beta must lie in (0, 1/2), got {beta}: no tightness is available beyond 1/2"
                )));
            }
        }
        match &self.process {
            Process::Map { map, observable } => {
                map.validate()?;
                observable.validate_for(map.gamma)?;
            }
            Process::MovingAverage { weights, .. } => {
                if weights.is_empty() || weights.iter().any(|w| !w.is_finite()) {
                    return Err(invalid("moving-average weights must be finite and non-empty"));
                }
            }
        }
        Ok(())
    }

    /// Centering constant `ν(f)`: stored, exact, or estimated from a long run.
    pub fn center(&self) -> Result<Center> {
        match &self.process {
            Process::MovingAverage { .. } => Ok(Center { mean: 0.0, stderr: 0.0 }),
            Process::Map { map, observable } => {
                if let Some(c) = observable.center {
                    return Ok(c);
                }
                let budget = self.params.center_budget.max(MIN_CENTER_BUDGET);
                estimate_center(observable, map, budget, self.params.seed ^ CENTER_SALT)
            }
        }
    }

    /// Increments `X_1, …, X_len` of one replica (or of an auxiliary run),
    /// before centering.
    pub(crate) fn increments(&self, len: usize, seed: u64, replica: u64) -> Result<Box<dyn Iterator<Item = f64> + '_>> {
        let cfg = OrbitConfig {
            initial_point: InitialPoint::default(),
            burn_in: self.params.burn_in,
            length: len,
            seed,
            replica_index: replica,
        };
        Ok(match &self.process {
            Process::Map { map, observable } => {
                let orbit = Orbit::new(&cfg, map)?;
                Box::new(orbit.map(move |x| observable.value(x)))
            }
            Process::MovingAverage { weights, sign } => {
                let ma = MovingAverage::new(&cfg, weights)?;
                if *sign {
                    Box::new(ma.map(f64::signum))
                } else {
                    Box::new(ma)
                }
            }
        })
    }
}

/// Per-replica summaries at every `n` of the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Simulation {
    pub config_hash: String,
    pub seed: u64,
    pub n_grid: Vec<u64>,
    pub replicas: usize,
    pub center: Center,
    /// `max_abs[i][r] = max_{k ≤ n_i} |S_k|` for replica `r`.
    pub max_abs: Vec<Vec<f64>>,
    /// `endpoint[i][r] = S_{n_i}`.
    pub endpoint: Vec<Vec<f64>>,
    /// Hölder norms `|W_{n_i}|_β` when `holder_beta` is set.
    pub holder: Option<Vec<Vec<f64>>>,
    pub holder_beta: Option<f64>,
    pub holder_approximate: Vec<bool>,
}

struct ReplicaOut {
    max_abs: Vec<f64>,
    endpoint: Vec<f64>,
    holder: Vec<(f64, bool)>,
}

/// Runs every replica once, recording what all estimators need.
pub fn simulate(cfg: &SimConfig) -> Result<Simulation> {
    cfg.validate()?;
    let center = cfg.center()?;
    let grid = &cfg.params.n_grid;
    let n_max = *grid.last().unwrap() as usize;
    let beta = cfg.params.holder_beta;
    let seed = cfg.params.seed;
    let outs = run_replicas(cfg.params.replicas, cfg.threads, |r| -> Result<ReplicaOut> {
        let mut out = ReplicaOut {
            max_abs: Vec::with_capacity(grid.len()),
            endpoint: Vec::with_capacity(grid.len()),
            holder: Vec::new(),
        };
        let mut sums = Vec::with_capacity(if beta.is_some() { n_max } else { 0 });
        let (mut s, mut m) = (0.0f64, 0.0f64);
        let mut next = 0;
        for (i, x) in cfg.increments(n_max, seed, r)?.enumerate() {
            s += x - center.mean;
            m = m.max(s.abs());
            if beta.is_some() {
                sums.push(s);
            }
            if (i + 1) as u64 == grid[next] {
                out.max_abs.push(m);
                out.endpoint.push(s);
                if let Some(b) = beta {
                    let h = holder_norm(&donsker_breakpoints(&sums), b)?;
                    out.holder.push((h.norm, h.approximate));
                }
                next += 1;
            }
        }
        if m.is_nan() || !m.is_finite() {
            return Err(Error::Degenerate(format!("replica {r} produced a non-finite partial sum")));
        }
        Ok(out)
    });
    let outs: Vec<ReplicaOut> = outs.into_iter().collect::<Result<_>>()?;
    let k = grid.len();
    let column = |f: &dyn Fn(&ReplicaOut, usize) -> f64| -> Vec<Vec<f64>> {
        (0..k).map(|i| outs.iter().map(|o| f(o, i)).collect()).collect()
    };
    let max_abs = column(&|o, i| o.max_abs[i]);
    let endpoint = column(&|o, i| o.endpoint[i]);
    let holder = beta.map(|_| column(&|o, i| o.holder[i].0));
    let holder_approximate = if beta.is_some() {
        (0..k).map(|i| outs[0].holder[i].1).collect()
    } else {
        Vec::new()
    };
    Ok(Simulation {
        config_hash: cfg.hash()?,
        seed,
        n_grid: grid.clone(),
        replicas: cfg.params.replicas,
        center,
        max_abs,
        endpoint,
        holder,
        holder_beta: beta,
        holder_approximate,
    })
}

impl Simulation {
    fn row(&self, i: usize, statistic: &str, param: f64, estimate: f64, stderr: f64, flags: Vec<Flag>) -> EmpiricalRow {
        EmpiricalRow {
            n: self.n_grid[i],
            statistic: statistic.to_string(),
            param,
            estimate,
            stderr,
            replicas: self.replicas,
            seed: self.seed,
            flags,
        }
    }

    fn index_of(&self, n: u64) -> Result<usize> {
        self.n_grid
            .iter()
            .position(|&m| m == n)
            .ok_or_else(|| invalid(format!("n = {n} is not on the simulated grid")))
    }

    /// `E[max_{k≤n} |S_k|^p]` for every `n`, with jackknife error plus the
    /// first-order effect of the center's uncertainty.
    pub fn moments(&self, p: f64) -> Vec<EmpiricalRow> {
        (0..self.n_grid.len())
            .map(|i| {
                let vals: Vec<f64> = self.max_abs[i].iter().map(|m| m.powf(p)).collect();
                let (mean, jk) = mean_jackknife(&vals);
                let n = self.n_grid[i] as f64;
                let bias = p * n * self.center.stderr * mean.powf((p - 1.0) / p);
                let mut flags = Vec::new();
                if bias > 0.0 {
                    flags.push(Flag::CenterBias);
                }
                self.row(i, "moment", p, mean, jk + bias, flags)
            })
            .collect()
    }

    /// `P(max_{k≤n} |S_k| ≥ n x)` at the grid point `n`, with a binomial error.
    pub fn tail(&self, x: f64, n: u64) -> Result<EmpiricalRow> {
        let i = self.index_of(n)?;
        let level = n as f64 * x;
        let hits = self.max_abs[i].iter().filter(|&&m| m >= level).count();
        let r = self.replicas as f64;
        let estimate = hits as f64 / r;
        // Jeffreys-smoothed proportion keeps the error positive at 0 and 1 hits.
        let smooth = (hits as f64 + 0.5) / (r + 1.0);
        let stderr = (smooth * (1.0 - smooth) / r).sqrt();
        let mut flags = Vec::new();
        if hits < 5 {
            flags.push(Flag::LowPower);
        }
        Ok(self.row(i, "tail", x, estimate, stderr, flags))
    }

    /// Quantile of `|W_n|_β` over replicas. The error is half the spread of the
    /// order statistics one binomial standard deviation either side of the rank.
    /// Rows are flagged when `β` is not below the predicted exponent `delta`.
    pub fn holder_quantile(&self, level: f64, delta: Option<f64>) -> Result<Vec<EmpiricalRow>> {
        let (Some(holder), Some(beta)) = (self.holder.as_ref(), self.holder_beta) else {
            return Err(invalid("simulation ran without holder_beta"));
        };
        let r = self.replicas as f64;
        Ok(holder
            .iter()
            .enumerate()
            .map(|(i, vals)| {
                let est = quantile(vals, level);
                let sd = (level * (1.0 - level) / r).sqrt();
                let lo = quantile(vals, (level - sd).max(0.0));
                let hi = quantile(vals, (level + sd).min(1.0));
                let mut flags = Vec::new();
                if self.holder_approximate[i] {
                    flags.push(Flag::DyadicPairs);
                }
                if delta.is_none_or(|d| beta >= d) {
                    flags.push(Flag::BetaAboveDelta);
                }
                self.row(i, "holder_quantile", level, est, (0.5 * (hi - lo)).max(f64::MIN_POSITIVE), flags)
            })
            .collect())
    }

    /// Normalised endpoints `S_n / (σ √n)` at grid point `n`.
    pub fn normalized_endpoints(&self, n: u64, sigma: f64) -> Result<Vec<f64>> {
        let i = self.index_of(n)?;
        let scale = sigma * (n as f64).sqrt();
        Ok(self.endpoint[i].iter().map(|s| s / scale).collect())
    }

    /// `(n, estimate, stderr)` triples ready for [`scaling_fit`].
    pub fn moment_points(&self, p: f64) -> Vec<(f64, f64, f64)> {
        self.moments(p)
            .iter()
            .map(|r| (r.n as f64, r.estimate, r.stderr))
            .collect()
    }

    pub fn result(&self, rows: Vec<EmpiricalRow>) -> EmpiricalResult {
        EmpiricalResult {
            config_hash: self.config_hash.clone(),
            rows,
        }
    }
}

/// Moments of `max_{k≤n} |S_k|` of order `p` over the config's grid.
pub fn empirical_moment(cfg: &SimConfig, p: f64) -> Result<EmpiricalResult> {
    if !(p > 0.0) {
        return Err(invalid(format!("moment order must be positive, got {p}")));
    }
    let sim = simulate(cfg)?;
    Ok(sim.result(sim.moments(p)))
}

/// Tail frequency of `max_{k≤n} |S_k| ≥ n x` at a single `n`.
pub fn empirical_tail(cfg: &SimConfig, x: f64, n: u64) -> Result<EmpiricalResult> {
    if !(x >= 0.0) {
        return Err(invalid(format!("deviation level must be non-negative, got {x}")));
    }
    let mut single = cfg.clone();
    single.params.n_grid = vec![n];
    let sim = simulate(&single)?;
    let row = sim.tail(x, n)?;
    Ok(sim.result(vec![row]))
}
