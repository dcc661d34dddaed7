//! Right-hand sides of the deviation, moment and large-deviation inequalities.
//!
//! Every bound is reported as its additive shape terms. The universal constants
//! hidden in `≪` are never instantiated, so a [`BoundReport`] describes the
//! shape of a bound, not a certified probability.

mod conditions;
mod deviation;
pub mod integrals;
mod large_deviation;
mod regimes;
mod rosenthal;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coefficients::{AlphaModel, AlphaPair};
use crate::error::{invalid, Result};
use crate::observables::QuantileModel;

pub use conditions::{check_conditions, critical_moment, Condition, ConditionCheck};
pub use deviation::{deviation_bound, ln_eval, r_function_eval};
pub use integrals::Method;
pub use large_deviation::{large_deviation_bound, LdVariant};
pub use regimes::{regime_predict, RegimePrediction};
pub use rosenthal::rosenthal_bound;

/// Parameters shared by all bound evaluations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub alpha: AlphaPair,
    pub quantile: QuantileModel,
    pub n: u64,
    pub p: f64,
    /// Free exponent `r > 2` of the deviation inequality; defaults from `p`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Free exponent `β ∈ (r − 2, r)`; defaults from `p`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// `a ∈ (p − 1, p)` for large-deviation bounds; defaults to `r / 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    /// `c ∈ (0, 1)` for the `p = 2` large-deviation bound; defaults to 1/2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default)]
    pub method: Method,
}

impl BoundInputs {
    pub fn new(alpha: AlphaModel, quantile: QuantileModel, n: u64, p: f64) -> Self {
        Self {
            alpha: AlphaPair::same(alpha),
            quantile,
            n,
            p,
            r: None,
            beta: None,
            a: None,
            c: None,
            method: Method::Auto,
        }
    }

    /// `r = 2p − 1` (so `r/2 = p − 1/2 ∈ (p − 1, p)`) for `p ≥ 2`, else 3.
    pub fn r(&self) -> f64 {
        self.r
            .unwrap_or(if self.p >= 2.0 { 2.0 * self.p - 1.0 } else { 3.0 })
    }

    /// `β = 2p − 2.5` for `p ≥ 2`, which lies in `(r − 2, r)` and below `2p − 2`; else 2.
    pub fn beta(&self) -> f64 {
        self.beta
            .unwrap_or(if self.p >= 2.0 { 2.0 * self.p - 2.5 } else { 2.0 })
    }

    pub fn a(&self) -> f64 {
        self.a.unwrap_or(self.p - 0.5)
    }

    pub fn c(&self) -> f64 {
        self.c.unwrap_or(0.5)
    }

    pub fn validate(&self) -> Result<()> {
        self.alpha.validate()?;
        self.quantile.validate()?;
        if self.n == 0 {
            return Err(invalid("n must be a positive integer"));
        }
        if !(self.p > 1.0) || !self.p.is_finite() {
            return Err(invalid(format!("p must exceed 1, got {}", self.p)));
        }
        let (r, beta) = (self.r(), self.beta());
        if !(r > 2.0) {
            return Err(invalid(format!("r must exceed 2, got {r}")));
        }
        if !(beta > r - 2.0 && beta < r) {
            return Err(invalid(format!("beta must lie in (r − 2, r) = ({}, {r}), got {beta}", r - 2.0)));
        }
        Ok(())
    }

    pub(crate) fn parameter_map(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        m.insert("n".into(), self.n as f64);
        m.insert("p".into(), self.p);
        m.insert("r".into(), self.r());
        m.insert("beta".into(), self.beta());
        m.insert("b".into(), self.quantile.exponent());
        m
    }
}

/// Additive terms of one bound, with provenance.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound: String,
    /// Named additive terms; `total` is their sum.
    pub terms: BTreeMap<String, f64>,
    pub total: f64,
    /// Auxiliary quantities (not part of the total).
    pub diagnostics: BTreeMap<String, f64>,
    /// Estimated absolute error of each integral that entered a term.
    pub quadrature_error: BTreeMap<String, f64>,
    pub parameters: BTreeMap<String, f64>,
    /// Always true: terms are shapes up to an unspecified universal constant.
    pub constants_omitted: bool,
}

impl BoundReport {
    pub(crate) fn new(bound: &str, parameters: BTreeMap<String, f64>) -> Self {
        Self {
            bound: bound.to_string(),
            parameters,
            constants_omitted: true,
            ..Default::default()
        }
    }

    pub(crate) fn term(&mut self, name: &str, value: f64) {
        self.terms.insert(format!("{}.{name}", self.bound), value);
        self.total = self.terms.values().sum();
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.terms.get(&format!("{}.{name}", self.bound)).copied()
    }
}
