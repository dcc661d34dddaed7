//! Long-run variance estimates on moving-average oracles with known answers.

use std::f64::consts::FRAC_1_SQRT_2;

use alphadep::montecarlo::{default_bandwidth, sigma2_estimate, SimConfig, SimParams};

fn main() -> alphadep::Result<()> {
    let len = 500_000;
    for (label, weights, truth) in [
        ("white noise", vec![1.0], 1.0),
        ("MA(1), equal weights", vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2], 2.0),
        ("first difference", vec![1.0, -1.0], 0.0),
    ] {
        let mut params = SimParams::new(vec![1], 100, 1);
        params.sigma_length = len;
        let cfg = SimConfig::moving_average(weights, false, params);
        let row = sigma2_estimate(&cfg, default_bandwidth(len))?.rows[0].clone();
        println!("{label:<22} estimate {:.4} ± {:.4}  (exact {truth})", row.estimate, row.stderr);
    }
    Ok(())
}
