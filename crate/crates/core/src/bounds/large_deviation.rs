//! Algebraic large-deviation shapes for `P(max_k |S_k| ≥ n x)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

use super::{BoundInputs, BoundReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LdVariant {
    /// Weak moment condition, `p > 2`.
    #[serde(rename = "WB")]
    Wb,
    /// Weak moment condition, `p = 2`.
    #[serde(rename = "WB2")]
    Wb2,
    /// Weak moment condition, `1 < p < 2`.
    #[serde(rename = "WBeasy")]
    WbEasy,
    /// Strong moment condition, `p ≥ 2`.
    #[serde(rename = "SB")]
    Sb,
    /// Strong moment condition, `1 < p < 2`.
    #[serde(rename = "SBeasy")]
    SbEasy,
}

impl std::str::FromStr for LdVariant {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| invalid(format!("unknown large-deviation variant '{s}'")))
    }
}

fn check_a(p: f64, a: f64) -> Result<()> {
    if !(a > p - 1.0 && a < p) {
        return Err(invalid(format!("a must lie in (p − 1, p) = ({}, {p}), got {a}", p - 1.0)));
    }
    Ok(())
}

fn check_small_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p < 2.0) {
        return Err(invalid(format!("this variant needs 1 < p < 2, got {p}")));
    }
    Ok(())
}

pub fn large_deviation_bound(inputs: &BoundInputs, x: f64, variant: LdVariant) -> Result<BoundReport> {
    if !(x > 0.0) {
        return Err(invalid(format!("deviation level must be positive, got {x}")));
    }
    if inputs.n == 0 {
        return Err(invalid("n must be a positive integer"));
    }
    let (p, a, c) = (inputs.p, inputs.a(), inputs.c());
    let n = inputs.n as f64;
    let mut report = BoundReport::new("large_deviation", inputs.parameter_map());
    report.parameters.insert("x".into(), x);
    match variant {
        LdVariant::Wb => {
            if !(p > 2.0) {
                return Err(invalid(format!("WB needs p > 2, got {p}")));
            }
            check_a(p, a)?;
            report.term("term1", n.powf(-a) * x.powf(-2.0 * a));
            report.term("term2", n.powf(-(p - 1.0)) * x.powf(-p));
        }
        LdVariant::Wb2 => {
            if p != 2.0 {
                return Err(invalid(format!("WB2 needs p = 2, got {p}")));
            }
            check_a(p, a)?;
            if !(c > 0.0 && c < 1.0) {
                return Err(invalid(format!("c must lie in (0, 1), got {c}")));
            }
            report.term("term1", n.powf(-a * c) * x.powf(-a * (1.0 + c)));
            report.term("term2", 1.0 / (n * x * x));
        }
        LdVariant::WbEasy => {
            check_small_p(p)?;
            report.term("term1", n.powf(-(p - 1.0)) * x.powf(-p));
        }
        LdVariant::Sb => {
            if !(p >= 2.0) {
                return Err(invalid(format!("SB needs p ≥ 2, got {p}")));
            }
            check_a(p, a)?;
            report.term("term1", x.powf(-2.0 * a));
            report.term("term2", x.powf(-p));
        }
        LdVariant::SbEasy => {
            check_small_p(p)?;
            report.term("term1", x.powf(-p));
        }
    }
    report.parameters.insert("a".into(), a);
    if variant == LdVariant::Wb2 {
        report.parameters.insert("c".into(), c);
    }
    report.diagnostics.insert("n_decay_exponent".into(), p - 1.0);
    Ok(report)
}
