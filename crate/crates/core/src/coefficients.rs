//! Dependence coefficient sequences and their generalised inverses.
//!
//! `α(0) = 1/2` always. The inverse is `α⁻¹(u) = min { q : α(q) ≤ u }`, which for
//! a non-increasing sequence also equals `Σ_n 1_{u < α(n)}`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailRule {
    /// `α(n) = 0` past the stored prefix.
    Zero,
    /// `α(n) = min(last stored value, c · n^(−(1−γ)/γ))` past the stored prefix.
    PowerLaw { c: f64, gamma: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphaModel {
    Explicit { values: Vec<f64>, tail: TailRule },
    /// `α(n) = min(1/2, c · n^(−(1−γ)/γ))` for `n ≥ 1`.
    PowerLaw { c: f64, gamma: f64 },
}

fn rate(gamma: f64) -> f64 {
    (1.0 - gamma) / gamma
}

fn check_power(c: f64, gamma: f64) -> Result<()> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(invalid(format!("coefficient scale C must be positive, got {c}")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(invalid(format!("coefficient gamma must lie in (0,1), got {gamma}")));
    }
    Ok(())
}

impl AlphaModel {
    pub fn power_law(c: f64, gamma: f64) -> Self {
        AlphaModel::PowerLaw { c, gamma }
    }

    /// `α(0) = 1/2` and `α(n) = 0` afterwards: the independent case.
    pub fn independent() -> Self {
        AlphaModel::Explicit {
            values: vec![0.5],
            tail: TailRule::Zero,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AlphaModel::PowerLaw { c, gamma } => check_power(*c, *gamma),
            AlphaModel::Explicit { values, tail } => {
                if values.first() != Some(&0.5) {
                    return Err(invalid("explicit coefficients must start with α(0) = 1/2"));
                }
                if values.iter().any(|v| !(0.0..=0.5).contains(v)) {
                    return Err(invalid("coefficients must lie in [0, 1/2]"));
                }
                if values.windows(2).any(|w| w[1] > w[0]) {
                    return Err(invalid("coefficients must be non-increasing"));
                }
                if let TailRule::PowerLaw { c, gamma } = tail {
                    check_power(*c, *gamma)?;
                }
                Ok(())
            }
        }
    }

    /// Power `a` with `α⁻¹(u) ≍ u^(−a)` as `u → 0`; 0 when the inverse is bounded.
    pub fn inverse_growth(&self) -> f64 {
        match self.gamma() {
            Some(g) => g / (1.0 - g),
            None => 0.0,
        }
    }

    /// The decay parameter γ of the power-law part, if any.
    pub fn gamma(&self) -> Option<f64> {
        match self {
            AlphaModel::PowerLaw { gamma, .. } => Some(*gamma),
            AlphaModel::Explicit {
                tail: TailRule::PowerLaw { gamma, .. },
                ..
            } => Some(*gamma),
            AlphaModel::Explicit {
                tail: TailRule::Zero,
                ..
            } => None,
        }
    }

    #[inline]
    pub fn eval(&self, n: u64) -> f64 {
        match self {
            AlphaModel::PowerLaw { c, gamma } => {
                if n == 0 {
                    0.5
                } else {
                    (c / (n as f64).powf(rate(*gamma))).min(0.5)
                }
            }
            AlphaModel::Explicit { values, tail } => match values.get(n as usize) {
                Some(v) => *v,
                None => match tail {
                    TailRule::Zero => 0.0,
                    TailRule::PowerLaw { c, gamma } => {
                        let last = *values.last().unwrap();
                        (c / (n as f64).powf(rate(*gamma))).min(last)
                    }
                },
            },
        }
    }

    /// Smallest `q ≥ start` with `α(q) ≤ u`, given a closed-form guess.
    /// Requires `α(start − 1) > u`.
    fn settle(&self, guess: u64, start: u64, u: f64) -> u64 {
        let is_first = |q: u64| self.eval(q) <= u && (q == start || self.eval(q - 1) > u);
        let q = guess.max(start);
        for cand in [q, q.saturating_add(1), q.saturating_sub(1)] {
            if cand >= start && is_first(cand) {
                return cand;
            }
        }
        // Rounding disagreed with the closed form: bracket and bisect.
        let mut hi = q.max(start);
        while self.eval(hi) > u {
            if hi == u64::MAX {
                return hi;
            }
            hi = hi.saturating_mul(2);
        }
        // invariant: α(lo) > u ≥ α(hi)
        let mut lo = start - 1;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.eval(mid) <= u {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    fn power_guess(c: f64, gamma: f64, u: f64) -> u64 {
        let x = (c / u).powf(gamma / (1.0 - gamma)).ceil();
        if x >= u64::MAX as f64 {
            u64::MAX
        } else {
            x as u64
        }
    }

    /// `α⁻¹(u)` without capping.
    fn inverse(&self, u: f64) -> u64 {
        if u >= 0.5 {
            return 0;
        }
        match self {
            AlphaModel::PowerLaw { c, gamma } => {
                let guess = Self::power_guess(*c, *gamma, u);
                self.settle(guess, 1, u)
            }
            AlphaModel::Explicit { values, tail } => {
                let i = values.partition_point(|&v| v > u);
                if i < values.len() {
                    return i as u64;
                }
                let len = values.len() as u64;
                match tail {
                    TailRule::Zero => len,
                    TailRule::PowerLaw { c, gamma } => {
                        let guess = Self::power_guess(*c, *gamma, u);
                        self.settle(guess, len, u)
                    }
                }
            }
        }
    }
}

/// `α(n)`, clamped to `[0, 1/2]`.
pub fn alpha_eval(m: &AlphaModel, n: u64) -> f64 {
    m.eval(n).clamp(0.0, 0.5)
}

/// `α⁻¹(u) = min { q : α(q) ≤ u }`, optionally capped: `min(α⁻¹(u), cap)`.
pub fn alpha_inverse(m: &AlphaModel, u: f64, cap: Option<u64>) -> Result<u64> {
    if !(u > 0.0) {
        return Err(Error::Domain(format!(
            "inverse coefficient needs u > 0 (got {u}); α⁻¹(0) may be infinite"
        )));
    }
    let q = m.inverse(u);
    Ok(match cap {
        Some(n) => q.min(n),
        None => q,
    })
}

/// `Σ_{n < horizon} 1_{u < α(n)}`, the counting form of the inverse. Agrees with
/// [`alpha_inverse`] whenever `α(horizon) ≤ u`.
pub fn alpha_inverse_count(m: &AlphaModel, u: f64, horizon: u64) -> u64 {
    (0..horizon).filter(|&n| u < m.eval(n)).count() as u64
}

/// Intervals `[lo, hi)` of `[0, 1]` on which `α⁻¹ ∧ cap` is constant, with that
/// value, ordered from `u = 0` upwards. Empty intervals are dropped.
pub fn inverse_steps(m: &AlphaModel, cap: u64) -> Vec<(f64, f64, u64)> {
    let mut out = Vec::new();
    if cap == 0 {
        out.push((0.0, 1.0, 0));
        return out;
    }
    // α⁻¹(u) ≥ q  ⇔  u < α(q − 1)
    let mut lo = 0.0;
    let top = m.eval(cap - 1);
    if top > 0.0 {
        out.push((0.0, top, cap));
        lo = top;
    }
    for q in (1..cap).rev() {
        let hi = m.eval(q - 1);
        if hi > lo {
            out.push((lo, hi, q));
            lo = hi;
        }
    }
    if lo < 1.0 {
        out.push((lo, 1.0, 0));
    }
    out
}

/// A pair of coefficient sequences `(α₁, α₂)` with `α₁ ≤ α₂`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaPair {
    pub alpha1: AlphaModel,
    pub alpha2: AlphaModel,
}

impl AlphaPair {
    /// Same sequence for both orders.
    pub fn same(model: AlphaModel) -> Self {
        Self {
            alpha1: model.clone(),
            alpha2: model,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.alpha1.validate()?;
        self.alpha2.validate()
    }
}
