//! Normalise Birkhoff sums by an estimated long-run variance and measure the
//! Kolmogorov-Smirnov distance to the standard normal.

use alphadep::dynamics::MapSpec;
use alphadep::montecarlo::{default_bandwidth, ks_normal, sigma2_estimate, simulate, SimConfig, SimParams};
use alphadep::observables::{Observable, ObservableKind};

fn main() -> alphadep::Result<()> {
    let n = 1u64 << 13;
    let mut params = SimParams::new(vec![n], 1000, 2024);
    params.sigma_length = 2_000_000;
    params.center_budget = 100_000_000;
    let cfg = SimConfig::map(
        MapSpec::lsv(0.2),
        Observable::from(ObservableKind::Indicator { lo: 0.5, hi: 1.0 }),
        params,
    );
    let sigma2 = sigma2_estimate(&cfg, default_bandwidth(cfg.params.sigma_length))?.rows[0].clone();
    let sim = simulate(&cfg)?;
    let z = sim.normalized_endpoints(n, sigma2.estimate.sqrt())?;
    let d = ks_normal(&z, 1.0)?;
    println!("sigma^2 = {:.5} ± {:.5}", sigma2.estimate, sigma2.stderr);
    println!("KS distance at n = {n} over {} replicas: {d:.4}", z.len());
    println!("reference 95% point for a perfect normal sample: {:.4}", 1.36 / (z.len() as f64).sqrt());
    Ok(())
}
