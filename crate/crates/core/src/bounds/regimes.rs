//! Predicted growth of `‖max_{k≤n} |S_k|‖_p^p` for LSV-type systems.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

use super::conditions::critical_moment;

const EQUALITY_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimePrediction {
    /// `θ` with `‖max |S_k|‖_p^p ≪ n^θ` (times `ln n` when `log_factor`).
    pub moment_exponent: f64,
    pub log_factor: bool,
    /// Hölder exponent `1/2 − γ − b(1−γ)` of the invariance principle, if positive.
    pub holder_delta: Option<f64>,
    /// Largest order with polynomial large-deviation decay.
    pub ld_p: f64,
    /// Largest `b` for which the moment exponent is the diffusive one.
    pub threshold: f64,
}

fn equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= EQUALITY_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

pub fn regime_predict(gamma: f64, b: f64, p: f64) -> Result<RegimePrediction> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(invalid(format!("gamma must lie in (0,1), got {gamma}")));
    }
    if !(0.0..1.0).contains(&b) {
        return Err(invalid(format!("b must lie in [0,1), got {b}")));
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(invalid(format!("p must exceed 1, got {p}")));
    }
    let power = (p * gamma + (gamma - 1.0) * (1.0 - p * b)) / gamma;
    let (threshold, moment_exponent, log_factor) = if p > 2.0 {
        let t = (2.0 - gamma * (p + 2.0)) / (2.0 * p * (1.0 - gamma));
        if b <= t || equal(b, t) {
            (t, p / 2.0, false)
        } else {
            (t, power, false)
        }
    } else {
        let t = if p == 2.0 {
            (1.0 - 2.0 * gamma) / (2.0 * (1.0 - gamma))
        } else {
            (1.0 - p * gamma) / (p * (1.0 - gamma))
        };
        if equal(b, t) {
            (t, 1.0, true)
        } else if b < t {
            (t, 1.0, false)
        } else {
            (t, power, false)
        }
    };
    let delta = 0.5 - gamma - b * (1.0 - gamma);
    Ok(RegimePrediction {
        moment_exponent,
        log_factor,
        holder_delta: (delta > 0.0).then_some(delta),
        ld_p: critical_moment(gamma / (1.0 - gamma), b),
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn diffusive_case() {
        let r = regime_predict(0.25, 0.0, 2.0).unwrap();
        assert_eq!(r.moment_exponent, 1.0);
        assert!(!r.log_factor);
        assert_relative_eq!(r.threshold, 1.0 / 3.0, max_relative = 1e-15);
        assert_eq!(r.holder_delta, Some(0.25));
        assert_eq!(r.ld_p, 4.0);
    }

    #[test]
    fn critical_case_has_log() {
        let r = regime_predict(0.25, 1.0 / 3.0, 2.0).unwrap();
        assert_eq!(r.moment_exponent, 1.0);
        assert!(r.log_factor);
    }

    #[test]
    fn superdiffusive_case() {
        let r = regime_predict(0.5, 0.25, 2.0).unwrap();
        assert_relative_eq!(r.moment_exponent, 1.5, max_relative = 1e-15);
        assert_eq!(r.holder_delta, None);
    }

    #[test]
    fn higher_moments() {
        // p = 4, γ = 0.1: threshold (2 − 0.6)/(8 · 0.9)
        let r = regime_predict(0.1, 0.0, 4.0).unwrap();
        assert_eq!(r.moment_exponent, 2.0);
        let r = regime_predict(0.1, 0.5, 4.0).unwrap();
        assert_relative_eq!(r.moment_exponent, (0.4 - 0.9 * (1.0 - 2.0)) / 0.1, max_relative = 1e-14);
    }

    #[test]
    fn small_moments() {
        let r = regime_predict(0.25, 0.0, 1.5).unwrap();
        assert_eq!((r.moment_exponent, r.log_factor), (1.0, false));
        let r = regime_predict(0.8, 0.0, 1.5).unwrap();
        assert!(r.moment_exponent > 1.0);
    }

    #[test]
    fn exponent_is_continuous_at_thresholds() {
        for (g, p) in [(0.2, 3.0), (0.3, 1.5), (0.25, 2.0), (0.1, 5.0)] {
            let t = regime_predict(g, 0.0, p).unwrap().threshold;
            let below = regime_predict(g, t - 1e-9, p).unwrap().moment_exponent;
            let above = regime_predict(g, t + 1e-9, p).unwrap().moment_exponent;
            assert!((below - above).abs() < 1e-6, "g={g} p={p}: {below} vs {above}");
        }
    }
}
