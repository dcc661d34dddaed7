//! Long-run variance `σ² = Var(X₀) + 2 Σ_{k>0} Cov(X₀, X_k)` from one long run.

use crate::error::{invalid, Result};

use super::result::{EmpiricalResult, EmpiricalRow, Flag};
use super::{SimConfig, SIGMA_SALT};

const BATCHES: usize = 20;

/// `⌊N^(1/3)⌋`, computed without floating-point rounding surprises.
pub fn default_bandwidth(len: usize) -> usize {
    let mut b = (len as f64).cbrt().floor() as usize;
    while (b + 1).pow(3) <= len {
        b += 1;
    }
    while b > 0 && b.pow(3) > len {
        b -= 1;
    }
    b.max(1)
}

/// Bartlett-weighted covariance sum and `Σ_{k ≤ L} k γ̂_k`.
fn bartlett(x: &[f64], bandwidth: usize) -> (f64, f64) {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let c: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let autocov = |k: usize| c[..n - k].iter().zip(&c[k..]).map(|(a, b)| a * b).sum::<f64>() / n as f64;
    let l = bandwidth as f64;
    let mut est = autocov(0);
    let mut moment = 0.0;
    for k in 1..=bandwidth {
        let g = autocov(k);
        est += 2.0 * (1.0 - k as f64 / (l + 1.0)) * g;
        moment += k as f64 * g;
    }
    (est, moment)
}

/// Bartlett estimate of `σ²` from a series, with a standard error.
///
/// The error combines the batch-means spread of per-batch estimates with the
/// estimated taper bias `(2/(L+1)) |Σ_{k≤L} k γ̂_k|`, which dominates when `σ²`
/// is close to 0.
pub fn sigma2_from_series(x: &[f64], bandwidth: usize) -> Result<(f64, f64)> {
    if bandwidth == 0 {
        return Err(invalid("bandwidth must be positive"));
    }
    if x.len() < 100 * bandwidth {
        return Err(invalid(format!(
            "series of length {} is too short for bandwidth {bandwidth} (needs ≥ 100 × bandwidth)",
            x.len()
        )));
    }
    let (est, moment) = bartlett(x, bandwidth);
    let m = x.len() / BATCHES;
    let batch: Vec<f64> = x.chunks_exact(m).take(BATCHES).map(|c| bartlett(c, bandwidth).0).collect();
    let bm = batch.iter().sum::<f64>() / BATCHES as f64;
    let var = batch.iter().map(|v| (v - bm).powi(2)).sum::<f64>() / (BATCHES - 1) as f64;
    let batch_se = (var / BATCHES as f64).sqrt();
    let taper = 2.0 / (bandwidth as f64 + 1.0) * moment.abs();
    Ok((est, batch_se.hypot(taper)))
}

/// `σ²` of the configured process from one run of length `sigma_length`.
pub fn sigma2_estimate(cfg: &SimConfig, bandwidth: usize) -> Result<EmpiricalResult> {
    cfg.validate()?;
    let len = cfg.params.sigma_length;
    if len < 100 * bandwidth.max(1) {
        return Err(invalid(format!(
            "sigma_length {len} is too short for bandwidth {bandwidth}"
        )));
    }
    let series: Vec<f64> = cfg.increments(len, cfg.params.seed ^ SIGMA_SALT, 0)?.collect();
    let (estimate, stderr) = sigma2_from_series(&series, bandwidth)?;
    Ok(EmpiricalResult {
        config_hash: cfg.hash()?,
        rows: vec![EmpiricalRow {
            n: len as u64,
            statistic: "sigma2".into(),
            param: bandwidth as f64,
            estimate,
            stderr,
            replicas: 1,
            seed: cfg.params.seed,
            flags: vec![Flag::TaperBias],
        }],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::SimParams;

    fn oracle(weights: Vec<f64>, len: usize) -> SimConfig {
        let mut p = SimParams::new(vec![10], 100, 17);
        p.sigma_length = len;
        SimConfig::moving_average(weights, false, p)
    }

    #[test]
    fn bandwidth_rule() {
        assert_eq!(default_bandwidth(1_000_000), 100);
        assert_eq!(default_bandwidth(999_999), 99);
        assert_eq!(default_bandwidth(8), 2);
    }

    #[test]
    fn oracle_variances() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (w, truth) in [(vec![1.0], 1.0), (vec![h, h], 2.0), (vec![1.0, -1.0], 0.0)] {
            let cfg = oracle(w, 200_000);
            let r = &sigma2_estimate(&cfg, default_bandwidth(200_000)).unwrap().rows[0];
            assert!(r.stderr > 0.0);
            assert!((r.estimate - truth).abs() <= 3.0 * r.stderr, "{r:?} vs {truth}");
        }
    }

    #[test]
    fn short_series_rejected() {
        let cfg = oracle(vec![1.0], 1000);
        assert!(sigma2_estimate(&cfg, 11).is_err());
    }
}
