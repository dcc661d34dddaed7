//! Batch front end: `simulate`, `bounds`, `regimes`, `verify` and `report`.
//!
//! Every command validates its whole configuration before touching the output
//! directory, so a rejected config leaves no files behind. Exit codes: 0 on
//! success, 1 when a verification verdict fails, 2 on configuration errors,
//! 3 on numerical or statistical-power failures.

mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bounds::{
    check_conditions, deviation_bound, large_deviation_bound, regime_predict, rosenthal_bound, BoundInputs,
    BoundReport, Condition,
};
use crate::coefficients::AlphaModel;
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::montecarlo::{
    default_bandwidth, ks_normal, scaling_fit, sigma2_estimate, simulate, EmpiricalResult, EmpiricalRow, Flag,
    Process, SimConfig, Simulation,
};
use crate::observables::QuantileModel;

pub use report::{write_report, ComparisonReport, EmpiricalSet, PredictedEntry, RegimeKey, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "alphadep", version, about = "Bounds and Monte Carlo checks for Birkhoff sums of intermittent maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads (defaults to ALPHADEP_THREADS or the hardware parallelism).
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides `sim.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `sim.replicas`.
    #[arg(long)]
    replicas: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate Birkhoff sums and write moment, tail and Hölder statistics.
    Simulate(RunArgs),
    /// Evaluate the deviation, moment and large-deviation bounds over grids.
    Bounds(RunArgs),
    /// Print predicted regimes and moment conditions.
    Regimes {
        #[arg(long, value_delimiter = ',', required = true)]
        gamma: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        /// Also write regimes.csv and a manifest here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare simulations with predictions.
    Verify {
        #[arg(value_enum)]
        what: VerifyKind,
        #[command(flatten)]
        run: RunArgs,
        /// Pass threshold; its meaning depends on the check.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Merge `verify moments` outputs into one comparison document.
    Report {
        /// Directories written by `verify moments`.
        #[arg(long, num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = 0.15)]
        tolerance: f64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum VerifyKind {
    /// Fitted moment exponents against the predicted regime (tolerance: |Δ exponent|, default 0.15).
    Moments,
    /// Tail decay in n against `−(ld_p − 1)` (tolerance: slack on the slope, default 0.5).
    Tails,
    /// KS distance of normalised sums to N(0,1) (tolerance: max distance, default 0.03).
    Clt,
    /// Stability of Hölder-norm quantiles across n (tolerance: max ratio, default 1.5).
    Hip,
}

/// Provenance record written next to every set of outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<String>,
    pub config_hash: Option<String>,
    pub artifact_version: String,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<String>,
}

/// Collects output files in memory so nothing is written until every
/// computation has succeeded.
struct Outputs {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    fn add_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.add(name, text.into_bytes());
        Ok(())
    }

    fn add_csv(&mut self, name: &str, result: &EmpiricalResult) -> Result<()> {
        self.add(name, result.to_csv_string()?.into_bytes());
        Ok(())
    }

    fn commit(self, command: &str, config: Option<(&Path, String)>, started: Instant) -> Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let mut names = Vec::new();
        for (name, bytes) in &self.files {
            std::fs::write(self.dir.join(name), bytes)?;
            names.push(name.clone());
        }
        let manifest = RunManifest {
            command: command.to_string(),
            config_path: config.as_ref().map(|c| c.0.display().to_string()),
            config_hash: config.map(|c| c.1),
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_seconds: started.elapsed().as_secs_f64(),
            outputs: names,
        };
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        std::fs::write(self.dir.join("manifest.json"), text)?;
        Ok(())
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Quadrature(_) | Error::LowPower(_) | Error::Degenerate(_) | Error::Singularity(_) => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    let started = Instant::now();
    match cmd {
        Command::Simulate(args) => cmd_simulate(&args, started),
        Command::Bounds(args) => cmd_bounds(&args, started),
        Command::Regimes { gamma, b, p, out } => cmd_regimes(&gamma, &b, &p, out.as_deref(), started),
        Command::Verify { what, run, tolerance } => cmd_verify(what, &run, tolerance, started),
        Command::Report { inputs, out, tolerance } => cmd_report(&inputs, &out, tolerance, started),
    }
}

fn load(args: &RunArgs) -> Result<(ExperimentConfig, String)> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(sim) = cfg.sim.as_mut() {
        if let Some(seed) = args.seed {
            sim.seed = seed;
        }
        if let Some(r) = args.replicas {
            sim.replicas = r;
        }
    }
    let hash = cfg.hash()?;
    Ok((cfg, hash))
}

fn sim_config(cfg: &ExperimentConfig, args: &RunArgs) -> Result<SimConfig> {
    let mut sim = cfg.sim_config()?;
    sim.threads = args.threads;
    Ok(sim)
}

fn config_err(e: Error) -> Error {
    match e {
        Error::InvalidParameter(m) | Error::Domain(m) => Error::Config(m),
        other => other,
    }
}

fn simulation_rows(sim: &Simulation, cfg: &SimConfig, delta: Option<f64>) -> Result<Vec<EmpiricalRow>> {
    let mut rows = Vec::new();
    for &p in &cfg.params.p_list {
        rows.extend(sim.moments(p));
    }
    for &x in &cfg.params.x_grid {
        for &n in &sim.n_grid {
            rows.push(sim.tail(x, n)?);
        }
    }
    if sim.holder.is_some() {
        rows.extend(sim.holder_quantile(0.95, delta)?);
    }
    Ok(rows)
}

/// `(γ, b, δ, observable name)` of a map experiment.
fn regime_inputs(cfg: &ExperimentConfig, sim: &SimConfig) -> Result<(f64, f64, String)> {
    match &sim.process {
        Process::Map { map, observable } => {
            let b = cfg.quantile_model()?.exponent();
            let name = serde_json::to_value(&observable.kind)?
                .get("kind")
                .and_then(|v| v.as_str())
                .unwrap_or("observable")
                .to_string();
            Ok((map.gamma, b, name))
        }
        Process::MovingAverage { .. } => Err(Error::Config(
            "this command needs a map experiment, not a moving-average oracle".into(),
        )),
    }
}

fn cmd_simulate(args: &RunArgs, started: Instant) -> Result<i32> {
    let (cfg, hash) = load(args)?;
    let sim_cfg = sim_config(&cfg, args)?;
    let delta = match &sim_cfg.process {
        Process::Map { map, .. } => cfg
            .quantile_model()
            .ok()
            .and_then(|q| regime_predict(map.gamma, q.exponent(), 2.0).ok())
            .and_then(|r| r.holder_delta),
        Process::MovingAverage { .. } => Some(0.5),
    };
    let sim = simulate(&sim_cfg)?;
    let result = sim.result(simulation_rows(&sim, &sim_cfg, delta)?);
    let mut out = Outputs::new(&args.out);
    out.add_csv("simulate.csv", &result)?;
    out.add_json("simulate.json", &result)?;
    out.commit("simulate", Some((&args.config, hash)), started)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct BoundRow<'a> {
    n: u64,
    bound: &'a str,
    x: Option<f64>,
    term: &'a str,
    value: f64,
}

fn cmd_bounds(args: &RunArgs, started: Instant) -> Result<i32> {
    let (cfg, hash) = load(args)?;
    let section = cfg.bounds.clone().ok_or_else(|| Error::Config("config has no `bounds` section".into()))?;
    let alpha = cfg.alpha_pair()?;
    let quantile = cfg.quantile_model()?;
    let inputs_for = |n: u64| BoundInputs {
        alpha: alpha.clone(),
        quantile: quantile.clone(),
        n,
        p: section.p,
        r: section.r,
        beta: section.beta,
        a: section.a,
        c: section.c,
        method: section.method,
    };
    if section.n_grid.is_empty() {
        return Err(Error::Config("bounds.n_grid must not be empty".into()));
    }
    for &n in &section.n_grid {
        inputs_for(n).validate().map_err(config_err)?;
    }
    let mut reports: Vec<BoundReport> = Vec::new();
    for &n in &section.n_grid {
        let inp = inputs_for(n);
        if section.p >= 2.0 {
            reports.push(rosenthal_bound(&inp).map_err(config_err)?);
        }
        for &x in &section.x_grid {
            reports.push(deviation_bound(&inp, x, section.x_free).map_err(config_err)?);
            for &v in &section.large_deviation {
                reports.push(large_deviation_bound(&inp, x, v).map_err(config_err)?);
            }
        }
    }
    let mut csv = csv::Writer::from_writer(Vec::new());
    for r in &reports {
        for (term, &value) in &r.terms {
            csv.serialize(BoundRow {
                n: r.parameters["n"] as u64,
                bound: &r.bound,
                x: r.parameters.get("x").copied(),
                term,
                value,
            })?;
        }
    }
    let bytes = csv.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    let mut out = Outputs::new(&args.out);
    out.add("bounds.csv", bytes);
    out.add_json("bounds.json", &reports)?;
    out.commit("bounds", Some((&args.config, hash)), started)?;
    Ok(EXIT_OK)
}

/// One line of the `regimes` table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeRow {
    pub gamma: f64,
    pub b: f64,
    pub p: f64,
    pub moment_exponent: f64,
    pub log_factor: bool,
    pub holder_delta: String,
    pub ld_p: f64,
    pub wm: bool,
    pub wm0: bool,
    pub sm: bool,
    pub dmr: bool,
}

pub fn regime_row(gamma: f64, b: f64, p: f64) -> Result<RegimeRow> {
    let r = regime_predict(gamma, b, p)?;
    let alpha = AlphaModel::power_law(1.0, gamma);
    let q = QuantileModel::power_law(1.0, b);
    let holds = |c| check_conditions(&alpha, &q, p, c).map(|x| x.holds);
    Ok(RegimeRow {
        gamma,
        b,
        p,
        moment_exponent: r.moment_exponent,
        log_factor: r.log_factor,
        holder_delta: r.holder_delta.map_or("none".to_string(), |d| d.to_string()),
        ld_p: r.ld_p,
        wm: holds(Condition::Wm)?,
        wm0: holds(Condition::Wm0)?,
        sm: holds(Condition::Sm)?,
        dmr: holds(Condition::Dmr)?,
    })
}

fn cmd_regimes(gammas: &[f64], bs: &[f64], ps: &[f64], out: Option<&Path>, started: Instant) -> Result<i32> {
    let mut rows = Vec::new();
    for &g in gammas {
        for &b in bs {
            for &p in ps {
                rows.push(regime_row(g, b, p).map_err(config_err)?);
            }
        }
    }
    let mut csv = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        csv.serialize(r)?;
    }
    let bytes = csv.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    print!("{}", String::from_utf8_lossy(&bytes));
    if let Some(dir) = out {
        let mut o = Outputs::new(dir);
        o.add("regimes.csv", bytes);
        o.commit("regimes", None, started)?;
    }
    Ok(EXIT_OK)
}

/// Metadata written by `verify moments` and read back by `report`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct MomentsMeta {
    key: RegimeKey,
    predicted: Vec<PredictedEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct CheckOutcome {
    check: String,
    statistic: f64,
    threshold: f64,
    pass: bool,
    details: serde_json::Value,
}

fn cmd_verify(what: VerifyKind, args: &RunArgs, tolerance: Option<f64>, started: Instant) -> Result<i32> {
    let (cfg, hash) = load(args)?;
    let sim_cfg = sim_config(&cfg, args)?;
    let (gamma, b, name) = regime_inputs(&cfg, &sim_cfg)?;
    let prediction = regime_predict(gamma, b, 2.0).map_err(config_err)?;
    let mut out = Outputs::new(&args.out);
    let pass = match what {
        VerifyKind::Moments => {
            let tol = tolerance.unwrap_or(0.15);
            let p_list = if sim_cfg.params.p_list.is_empty() {
                vec![2.0]
            } else {
                sim_cfg.params.p_list.clone()
            };
            let mut predicted = Vec::new();
            let key = RegimeKey {
                gamma,
                b,
                observable: name,
            };
            for &p in &p_list {
                let r = regime_predict(gamma, b, p).map_err(config_err)?;
                predicted.push(PredictedEntry {
                    key: key.clone(),
                    p,
                    exponent: r.moment_exponent,
                    log_factor: r.log_factor,
                });
            }
            let sim = simulate(&sim_cfg)?;
            let rows = p_list.iter().flat_map(|&p| sim.moments(p)).collect();
            let result = sim.result(rows);
            let report = write_report(
                &[EmpiricalSet {
                    key: key.clone(),
                    result: result.clone(),
                }],
                &predicted,
                tol,
            )?;
            out.add_csv("moments.csv", &result)?;
            out.add_json("moments_meta.json", &MomentsMeta { key, predicted })?;
            out.add_json("verify_moments.json", &report)?;
            report.all_pass
        }
        VerifyKind::Tails => {
            let slack = tolerance.unwrap_or(0.5);
            if sim_cfg.params.x_grid.is_empty() {
                return Err(Error::Config("verify tails needs a non-empty sim.x_grid".into()));
            }
            let sim = simulate(&sim_cfg)?;
            let bound = -(prediction.ld_p - 1.0) + slack;
            let mut rows = Vec::new();
            let mut outcomes = Vec::new();
            let mut low_power = false;
            for &x in &sim_cfg.params.x_grid {
                let tails: Vec<EmpiricalRow> = sim.n_grid.iter().map(|&n| sim.tail(x, n)).collect::<Result<_>>()?;
                low_power |= tails.iter().any(|r| r.has(Flag::LowPower));
                let fit = scaling_fit(
                    &tails.iter().map(|r| (r.n as f64, r.estimate.max(f64::MIN_POSITIVE), r.stderr)).collect::<Vec<_>>(),
                    false,
                );
                let slope = fit.as_ref().map_or(f64::NAN, |f| f.exponent);
                outcomes.push(CheckOutcome {
                    check: format!("tail_slope_x={x}"),
                    statistic: slope,
                    threshold: bound,
                    pass: slope <= bound,
                    details: serde_json::json!({ "ld_p": prediction.ld_p }),
                });
                rows.extend(tails);
            }
            out.add_csv("tails.csv", &sim.result(rows))?;
            out.add_json("verify_tails.json", &outcomes)?;
            if low_power {
                out.commit("verify tails", Some((&args.config, hash)), started)?;
                return Err(Error::LowPower("fewer than 5 exceedances at some (n, x)".into()));
            }
            outcomes.iter().all(|o| o.pass)
        }
        VerifyKind::Clt => {
            let max_d = tolerance.unwrap_or(0.03);
            let bw = sim_cfg
                .params
                .sigma_bandwidth
                .unwrap_or_else(|| default_bandwidth(sim_cfg.params.sigma_length));
            let sig = sigma2_estimate(&sim_cfg, bw)?;
            let s2 = sig.rows[0].estimate;
            if !(s2 > 0.0) {
                return Err(Error::Degenerate(format!("estimated σ² = {s2} is not positive")));
            }
            let sim = simulate(&sim_cfg)?;
            let n = *sim.n_grid.last().unwrap();
            let d = ks_normal(&sim.normalized_endpoints(n, s2.sqrt())?, 1.0)?;
            let mut result = sig.clone();
            result.rows.push(EmpiricalRow {
                n,
                statistic: "ks".into(),
                param: s2.sqrt(),
                estimate: d,
                stderr: 0.87 / (sim.replicas as f64).sqrt(),
                replicas: sim.replicas,
                seed: sim.seed,
                flags: vec![],
            });
            let outcome = CheckOutcome {
                check: "ks_normal".into(),
                statistic: d,
                threshold: max_d,
                pass: d <= max_d,
                details: serde_json::json!({ "sigma2": s2, "n": n }),
            };
            out.add_csv("clt.csv", &result)?;
            out.add_json("verify_clt.json", &outcome)?;
            outcome.pass
        }
        VerifyKind::Hip => {
            let max_ratio = tolerance.unwrap_or(1.5);
            if sim_cfg.params.holder_beta.is_none() {
                return Err(Error::Config("verify hip needs sim.holder_beta".into()));
            }
            if sim_cfg.params.n_grid.len() < 2 {
                return Err(Error::Config("verify hip needs at least two n values".into()));
            }
            let sim = simulate(&sim_cfg)?;
            let rows = sim.holder_quantile(0.95, prediction.holder_delta)?;
            let first = rows.first().unwrap().estimate;
            let last = rows.last().unwrap().estimate;
            let ratio = first.max(last) / first.min(last);
            let outcome = CheckOutcome {
                check: "holder_q95_ratio".into(),
                statistic: ratio,
                threshold: max_ratio,
                pass: ratio <= max_ratio,
                details: serde_json::json!({ "delta": prediction.holder_delta }),
            };
            out.add_csv("hip.csv", &sim.result(rows))?;
            out.add_json("verify_hip.json", &outcome)?;
            outcome.pass
        }
    };
    let label = format!("verify {}", format!("{what:?}").to_lowercase());
    out.commit(&label, Some((&args.config, hash)), started)?;
    Ok(if pass { EXIT_OK } else { EXIT_VERDICT_FAILED })
}

fn cmd_report(inputs: &[PathBuf], dir: &Path, tolerance: f64, started: Instant) -> Result<i32> {
    let mut empirical = Vec::new();
    let mut predicted = Vec::new();
    for d in inputs {
        let meta_path = d.join("moments_meta.json");
        let text = std::fs::read_to_string(&meta_path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", meta_path.display())))?;
        let meta: MomentsMeta =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", meta_path.display())))?;
        let result = EmpiricalResult::load_csv(&d.join("moments.csv"))
            .map_err(|e| Error::Config(format!("{}: {e}", d.display())))?;
        empirical.push(EmpiricalSet {
            key: meta.key,
            result,
        });
        predicted.extend(meta.predicted);
    }
    let report = write_report(&empirical, &predicted, tolerance).map_err(config_err)?;
    let mut out = Outputs::new(dir);
    out.add_json("report.json", &report)?;
    out.commit("report", None, started)?;
    Ok(if report.all_pass { EXIT_OK } else { EXIT_VERDICT_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_row_example() {
        let r = regime_row(0.25, 0.0, 2.0).unwrap();
        assert_eq!(r.moment_exponent, 1.0);
        assert_eq!(r.holder_delta, "0.25");
        assert_eq!(r.ld_p, 4.0);
        assert!(r.dmr && r.wm && r.sm);
    }

    #[test]
    fn bad_invocations() {
        assert_eq!(run_command(["alphadep", "frobnicate"]), EXIT_CONFIG);
        assert_eq!(run_command(["alphadep", "regimes", "--gamma", "0.25"]), EXIT_CONFIG);
        assert_eq!(run_command(["alphadep", "regimes", "--gamma", "1.5", "--b", "0", "--p", "2"]), EXIT_CONFIG);
        assert_eq!(run_command(["alphadep", "regimes", "--gamma", "0.25", "--b", "0", "--p", "2"]), EXIT_OK);
    }

    #[test]
    fn invalid_is_config_error() {
        assert_eq!(exit_code(&crate::error::invalid("x")), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::Quadrature("x".into())), EXIT_NUMERICAL);
    }
}
