//! Moment conditions on `(α₂, Q)` decided analytically for power-law inputs.
//!
//! With `α₂⁻¹(u) ≍ u^(−a)` and `Q(u) ≍ u^(−b)`, every condition reduces to an
//! integrability question for `u^(−e)` near 0, and all of them share the
//! critical order `p_max = (1 + a)/(a + b)`. A vanishing factor
//! `ε(u) = ln(e/u)^(−q)` only matters exactly at the critical order.

use serde::{Deserialize, Serialize};

use crate::coefficients::AlphaModel;
use crate::error::{invalid, Error, Result};
use crate::observables::QuantileModel;

const BOUNDARY_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    /// `sup_x x^(p−1) ∫ Q 1_{R > x} < ∞`
    #[serde(rename = "WM")]
    Wm,
    /// `x^(p−1) ∫ Q 1_{R > x} → 0`
    #[serde(rename = "WM0")]
    Wm0,
    /// `∫ (α₂⁻¹)^(p−1) Q^p < ∞`
    #[serde(rename = "SM")]
    Sm,
    /// `∫ α₂⁻¹ Q² < ∞`
    #[serde(rename = "DMR")]
    Dmr,
}

impl std::str::FromStr for Condition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| invalid(format!("unknown condition '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub holds: bool,
    /// Distance from the critical order: `p_max − p` (`p_max − 2` for DMR).
    pub margin: f64,
    pub critical_p: f64,
}

/// `p_max = (1 + a)/(a + b)`, infinite when `a = b = 0`.
///
/// For the power-law coefficients of a map with parameter γ, `a = γ/(1−γ)` and
/// this equals `1/(γ + b(1−γ))`.
pub fn critical_moment(inverse_growth: f64, b: f64) -> f64 {
    let denom = inverse_growth + b;
    if denom == 0.0 {
        f64::INFINITY
    } else {
        (1.0 + inverse_growth) / denom
    }
}

fn at_boundary(p: f64, p_max: f64) -> bool {
    p_max.is_finite() && (p - p_max).abs() <= BOUNDARY_TOLERANCE * p_max
}

pub fn check_conditions(alpha2: &AlphaModel, q: &QuantileModel, p: f64, which: Condition) -> Result<ConditionCheck> {
    alpha2.validate()?;
    q.validate()?;
    if !(p > 1.0) || !p.is_finite() {
        return Err(invalid(format!("p must exceed 1, got {p}")));
    }
    if matches!(q, QuantileModel::Tabulated { .. }) && matches!(which, Condition::Wm | Condition::Wm0) {
        return Err(Error::Undecidable(
            "weak moment conditions need a power-law quantile model".into(),
        ));
    }
    let p_max = critical_moment(alpha2.inverse_growth(), q.exponent());
    let eps_q = q.vanishing().map(|e| e.q);
    let below = |target: f64| target < p_max && !at_boundary(target, p_max);
    let boundary = |target: f64| at_boundary(target, p_max);
    let (holds, margin) = match which {
        Condition::Wm => (below(p) || boundary(p), p_max - p),
        Condition::Wm0 => (below(p) || (boundary(p) && eps_q.is_some()), p_max - p),
        Condition::Sm => (
            below(p) || (boundary(p) && eps_q.is_some_and(|e| e * p > 1.0)),
            p_max - p,
        ),
        Condition::Dmr => (
            below(2.0) || (boundary(2.0) && eps_q.is_some_and(|e| 2.0 * e > 1.0)),
            p_max - 2.0,
        ),
    };
    Ok(ConditionCheck {
        holds,
        margin,
        critical_p: p_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::VanishingFactor;
    use proptest::prelude::*;

    fn lsv(gamma: f64) -> AlphaModel {
        AlphaModel::power_law(1.0, gamma)
    }

    #[test]
    fn bounded_observable_quarter() {
        let q = QuantileModel::constant(1.0);
        let wm = check_conditions(&lsv(0.25), &q, 4.0, Condition::Wm).unwrap();
        assert!(wm.holds);
        assert_eq!(wm.critical_p, 4.0);
        assert!(!check_conditions(&lsv(0.25), &q, 4.0, Condition::Wm0).unwrap().holds);
        assert!(!check_conditions(&lsv(0.25), &q, 4.0, Condition::Sm).unwrap().holds);
        assert!(check_conditions(&lsv(0.25), &q, 3.9, Condition::Sm).unwrap().holds);
        let dmr = check_conditions(&lsv(0.25), &q, 3.0, Condition::Dmr).unwrap();
        assert!(dmr.holds);
        assert_eq!(dmr.margin, 2.0);
    }

    #[test]
    fn vanishing_factor_at_the_boundary() {
        let q = QuantileModel::PowerLaw {
            scale: 1.0,
            b: 0.5,
            vanishing: Some(VanishingFactor { q: 0.4 }),
        };
        let a = lsv(0.5);
        // p_max = 1/(0.5 + 0.25) = 4/3
        let p = critical_moment(a.inverse_growth(), 0.5);
        assert!(check_conditions(&a, &q, p, Condition::Wm0).unwrap().holds);
        // q·p = 0.533 < 1
        assert!(!check_conditions(&a, &q, p, Condition::Sm).unwrap().holds);
    }

    #[test]
    fn independent_bounded_case_has_no_ceiling() {
        let c = check_conditions(&AlphaModel::independent(), &QuantileModel::constant(1.0), 50.0, Condition::Sm).unwrap();
        assert!(c.holds);
        assert!(c.critical_p.is_infinite());
    }

    #[test]
    fn tabulated_weak_conditions_are_undecidable() {
        let q = QuantileModel::Tabulated {
            tail: vec![(0.0, 1.0), (1.0, 0.0)],
        };
        assert!(matches!(
            check_conditions(&lsv(0.3), &q, 2.0, Condition::Wm),
            Err(Error::Undecidable(_))
        ));
        assert!(check_conditions(&lsv(0.3), &q, 2.0, Condition::Sm).unwrap().holds);
    }

    proptest! {
        #[test]
        fn strong_implies_weak(g in 0.05f64..0.95, b in 0.0f64..0.95, p in 1.01f64..8.0) {
            let q = QuantileModel::power_law(1.0, b);
            let sm = check_conditions(&lsv(g), &q, p, Condition::Sm).unwrap();
            let wm = check_conditions(&lsv(g), &q, p, Condition::Wm).unwrap();
            let wm0 = check_conditions(&lsv(g), &q, p, Condition::Wm0).unwrap();
            prop_assert!(!sm.holds || wm0.holds);
            prop_assert!(!wm0.holds || wm.holds);
            let direct = 1.0 / (g + b * (1.0 - g));
            prop_assert!((sm.critical_p - direct).abs() <= 1e-12 * direct);
        }
    }
}
