//! Test functions, tail functions and quantile models.
//!
//! A tail function `H` is non-increasing, right-continuous and vanishes at
//! infinity; its quantile is the generalised inverse
//! `Q(u) = inf { t ≥ 0 : H(t) ≤ u }`. Observables are mapped to a quantile model
//! `Q(u) ≤ K u^(−b) ε(u)` whose exponent `b` drives every regime prediction.

use serde::{Deserialize, Serialize};

use crate::dynamics::{MapSpec, Orbit, OrbitConfig};
use crate::error::{invalid, Error, Result};
use crate::rng::run_replicas;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailFunction {
    /// `H(t) = 1` below `threshold`, `min(1, (t/scale)^(−exponent))` from there on.
    PowerLaw {
        exponent: f64,
        scale: f64,
        #[serde(default)]
        threshold: f64,
    },
    /// `H(t) = 1_{t < bound}`.
    Bounded { bound: f64 },
    /// Right-continuous step function through `(t, H(t))`, starting at `t = 0`
    /// and ending with `H = 0`.
    Tabulated { points: Vec<(f64, f64)> },
}

impl TailFunction {
    pub fn validate(&self) -> Result<()> {
        match self {
            TailFunction::PowerLaw {
                exponent,
                scale,
                threshold,
            } => {
                if !(*exponent > 0.0) || !(*scale > 0.0) || !(*threshold >= 0.0) {
                    return Err(invalid("power-law tail needs exponent > 0, scale > 0, threshold ≥ 0"));
                }
            }
            TailFunction::Bounded { bound } => {
                if !(*bound >= 0.0) || !bound.is_finite() {
                    return Err(invalid("bounded tail needs a finite bound ≥ 0"));
                }
            }
            TailFunction::Tabulated { points } => {
                if points.is_empty() || points[0].0 != 0.0 {
                    return Err(invalid("tabulated tail must start at t = 0"));
                }
                if points.windows(2).any(|w| !(w[0].0 < w[1].0) || w[1].1 > w[0].1) {
                    return Err(invalid(
                        "tabulated tail needs strictly increasing t and non-increasing H",
                    ));
                }
                if points.iter().any(|p| !(0.0..=1.0).contains(&p.1) || !p.0.is_finite()) {
                    return Err(invalid("tabulated tail values must lie in [0,1]"));
                }
                if points.last().unwrap().1 != 0.0 {
                    return Err(invalid("tabulated tail must reach 0"));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TailFunction::PowerLaw {
                exponent,
                scale,
                threshold,
            } => {
                if t < *threshold {
                    1.0
                } else {
                    (t / scale).powf(-exponent).min(1.0)
                }
            }
            TailFunction::Bounded { bound } => {
                if t < *bound {
                    1.0
                } else {
                    0.0
                }
            }
            TailFunction::Tabulated { points } => {
                let i = points.partition_point(|p| p.0 <= t);
                if i == 0 {
                    1.0
                } else {
                    points[i - 1].1
                }
            }
        }
    }
}

/// Generalised inverse of `h` at level `u`. Returns `f64::INFINITY` when no `t`
/// satisfies `H(t) ≤ u`.
pub fn quantile_from_tail(h: &TailFunction, u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!("quantile level u = {u} is outside [0,1]")));
    }
    h.validate()?;
    Ok(match h {
        TailFunction::PowerLaw {
            exponent,
            scale,
            threshold,
        } => {
            if u >= 1.0 {
                0.0
            } else if u == 0.0 {
                f64::INFINITY
            } else {
                threshold.max(scale * u.powf(-1.0 / exponent))
            }
        }
        TailFunction::Bounded { bound } => {
            if u >= 1.0 {
                0.0
            } else {
                *bound
            }
        }
        TailFunction::Tabulated { points } => tabulated_quantile(points, u),
    })
}

fn tabulated_quantile(points: &[(f64, f64)], u: f64) -> f64 {
    // H is non-increasing, so the first index with H ≤ u is a partition point.
    let i = points.partition_point(|p| p.1 > u);
    points.get(i).map_or(f64::INFINITY, |p| p.0)
}

/// Vanishing factor `ε(u) = min(1, (ln(e/u))^(−q))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VanishingFactor {
    pub q: f64,
}

impl VanishingFactor {
    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        (1.0 - u.ln()).powf(-self.q).min(1.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuantileModel {
    /// `Q(u) = scale · u^(−b) · ε(u)`.
    PowerLaw {
        scale: f64,
        b: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vanishing: Option<VanishingFactor>,
    },
    /// Step quantile of a tabulated tail function, `(t, H(t))` pairs.
    Tabulated { tail: Vec<(f64, f64)> },
}

impl QuantileModel {
    pub fn power_law(scale: f64, b: f64) -> Self {
        QuantileModel::PowerLaw {
            scale,
            b,
            vanishing: None,
        }
    }

    pub fn constant(value: f64) -> Self {
        Self::power_law(value, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            QuantileModel::PowerLaw {
                scale,
                b,
                vanishing,
            } => {
                if !(*scale >= 0.0) || !scale.is_finite() {
                    return Err(invalid("quantile scale must be finite and ≥ 0"));
                }
                if !(0.0..1.0).contains(b) {
                    return Err(invalid(format!("quantile exponent b = {b} must lie in [0,1)")));
                }
                if let Some(eps) = vanishing {
                    // u^(−b) ε(u) is non-increasing exactly when q ≤ b.
                    if !(eps.q > 0.0) || eps.q > *b {
                        return Err(invalid(format!(
                            "vanishing factor needs 0 < q ≤ b for a monotone quantile (q = {}, b = {b})",
                            eps.q
                        )));
                    }
                }
            }
            QuantileModel::Tabulated { tail } => TailFunction::Tabulated {
                points: tail.clone(),
            }
            .validate()?,
        }
        Ok(())
    }

    /// Exponent `b` of the `u^(−b)` envelope; 0 for bounded models.
    pub fn exponent(&self) -> f64 {
        match self {
            QuantileModel::PowerLaw { b, .. } => *b,
            QuantileModel::Tabulated { .. } => 0.0,
        }
    }

    pub fn vanishing(&self) -> Option<VanishingFactor> {
        match self {
            QuantileModel::PowerLaw { vanishing, .. } => *vanishing,
            QuantileModel::Tabulated { .. } => None,
        }
    }

    /// True when `Q ≡ 0`.
    pub fn is_zero(&self) -> bool {
        match self {
            QuantileModel::PowerLaw { scale, .. } => *scale == 0.0,
            QuantileModel::Tabulated { tail } => tail.iter().all(|p| p.0 == 0.0 || p.1 == 0.0),
        }
    }

    /// `sup_u Q(u)`, infinite for singular models.
    pub fn sup(&self) -> f64 {
        match self {
            QuantileModel::PowerLaw { scale, b, .. } => {
                if *scale == 0.0 {
                    0.0
                } else if *b > 0.0 {
                    f64::INFINITY
                } else {
                    *scale
                }
            }
            QuantileModel::Tabulated { tail } => tail.iter().map(|p| p.0).fold(0.0, f64::max),
        }
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            QuantileModel::PowerLaw {
                scale,
                b,
                vanishing,
            } => {
                if *scale == 0.0 {
                    return 0.0;
                }
                let base = if *b == 0.0 { *scale } else { scale * u.powf(-b) };
                match vanishing {
                    Some(eps) => base * eps.eval(u),
                    None => base,
                }
            }
            QuantileModel::Tabulated { tail } => tabulated_quantile(tail, u),
        }
    }

    /// Points in `(0, 1)` where a tabulated quantile jumps.
    pub fn jumps(&self) -> Vec<f64> {
        match self {
            QuantileModel::PowerLaw { .. } => Vec::new(),
            QuantileModel::Tabulated { tail } => {
                let mut v: Vec<f64> = tail.iter().map(|p| p.1).filter(|&h| h > 0.0 && h < 1.0).collect();
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pole {
    Left,
    Right,
}

/// `scale · dist(x, pole)^(−exponent)` on `(lo, hi)`, zero elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneBranch {
    pub lo: f64,
    pub hi: f64,
    pub scale: f64,
    pub exponent: f64,
    pub pole: Pole,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObservableKind {
    Constant { value: f64 },
    /// `x^(−s)`
    NeutralSingularity { s: f64 },
    /// `(1 − x)^(−s)`
    BoundarySingularity { s: f64 },
    /// `1_{[lo, hi]}`
    Indicator { lo: f64, hi: f64 },
    /// Ramp `clamp(m2 (x − 1/2), −m1, m1)`: sup norm ≤ m1, total variation ≤ m2.
    Bv { m1: f64, m2: f64 },
    /// Sum of monotone branches; `tail` dominates `μ(|branch| > t)` for each branch.
    PiecewiseMonotone {
        branches: Vec<MonotoneBranch>,
        tail: TailFunction,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Center {
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    #[serde(flatten)]
    pub kind: ObservableKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Center>,
}

impl From<ObservableKind> for Observable {
    fn from(kind: ObservableKind) -> Self {
        Observable { kind, center: None }
    }
}

impl Observable {
    pub fn with_center(mut self, center: Center) -> Self {
        self.center = Some(center);
        self
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            ObservableKind::Constant { value } if !value.is_finite() => {
                Err(invalid("constant observable must be finite"))
            }
            ObservableKind::NeutralSingularity { s } | ObservableKind::BoundarySingularity { s }
                if !(0.0..1.0).contains(s) =>
            {
                Err(invalid(format!("singularity exponent s = {s} must lie in [0,1)")))
            }
            ObservableKind::Indicator { lo, hi } if !(lo <= hi) => {
                Err(invalid("indicator interval needs lo ≤ hi"))
            }
            ObservableKind::Bv { m1, m2 } if !(*m1 >= 0.0 && *m2 >= 0.0) => {
                Err(invalid("BV bounds must be non-negative"))
            }
            ObservableKind::PiecewiseMonotone { branches, tail } => {
                if branches.is_empty() {
                    return Err(invalid("piecewise-monotone observable needs at least one branch"));
                }
                for br in branches {
                    if !(br.lo < br.hi) || !(br.exponent >= 0.0) || !br.scale.is_finite() {
                        return Err(invalid("monotone branch needs lo < hi, exponent ≥ 0, finite scale"));
                    }
                }
                tail.validate()
            }
            _ => Ok(()),
        }
    }

    /// Checks that the observable is admissible for a map with parameter `gamma`.
    pub fn validate_for(&self, gamma: f64) -> Result<()> {
        self.validate()?;
        if let ObservableKind::NeutralSingularity { s } = self.kind {
            if s >= 1.0 - gamma {
                return Err(invalid(format!(
                    "neutral singularity needs s < 1 − γ = {} (s = {s})",
                    1.0 - gamma
                )));
            }
        }
        Ok(())
    }

    pub fn is_constant(&self) -> Option<f64> {
        match self.kind {
            ObservableKind::Constant { value } => Some(value),
            ObservableKind::Indicator { lo, hi } if lo <= 0.0 && hi >= 1.0 => Some(1.0),
            ObservableKind::Bv { m1, m2 } if m1 == 0.0 || m2 == 0.0 => Some(0.0),
            _ => None,
        }
    }

    /// Raw value; poles evaluate to `+∞`.
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        match &self.kind {
            ObservableKind::Constant { value } => *value,
            ObservableKind::NeutralSingularity { s } => x.powf(-s),
            ObservableKind::BoundarySingularity { s } => (1.0 - x).powf(-s),
            ObservableKind::Indicator { lo, hi } => {
                if *lo <= x && x <= *hi {
                    1.0
                } else {
                    0.0
                }
            }
            ObservableKind::Bv { m1, m2 } => (m2 * (x - 0.5)).clamp(-m1, *m1),
            ObservableKind::PiecewiseMonotone { branches, .. } => branches
                .iter()
                .filter(|br| br.lo < x && x < br.hi)
                .map(|br| {
                    let d = match br.pole {
                        Pole::Left => x - br.lo,
                        Pole::Right => br.hi - x,
                    };
                    br.scale * d.powf(-br.exponent)
                })
                .sum(),
        }
    }

    /// `f(x) − ν(f)` using the stored center (0 when absent).
    #[inline]
    pub fn centered(&self, x: f64) -> f64 {
        self.value(x) - self.center.map_or(0.0, |c| c.mean)
    }
}

/// Pointwise value of the uncentered observable.
pub fn observable_eval(f: &Observable, x: f64) -> Result<f64> {
    f.validate()?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {x} is outside [0,1]")));
    }
    match f.kind {
        ObservableKind::NeutralSingularity { s } if x == 0.0 && s > 0.0 => {
            return Err(Error::Singularity(x))
        }
        ObservableKind::BoundarySingularity { s } if x == 1.0 && s > 0.0 => {
            return Err(Error::Singularity(x))
        }
        _ => {}
    }
    let v = f.value(x);
    if v.is_infinite() {
        return Err(Error::Singularity(x));
    }
    Ok(v)
}

/// Quantile model tagging `f` for a map with parameter `gamma`.
///
/// The scale is the shape's natural constant (1 for pure singularities); the
/// constant hidden in `Q(u) ≪ u^(−b)` is fitted separately by
/// [`fit_quantile_scale`].
pub fn observable_quantile_params(f: &Observable, gamma: f64) -> Result<QuantileModel> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(invalid(format!("gamma must lie in (0,1), got {gamma}")));
    }
    f.validate_for(gamma)?;
    Ok(match &f.kind {
        ObservableKind::Constant { value } => QuantileModel::constant(value.abs()),
        ObservableKind::NeutralSingularity { s } => QuantileModel::power_law(1.0, s / (1.0 - gamma)),
        ObservableKind::BoundarySingularity { s } => QuantileModel::power_law(1.0, *s),
        ObservableKind::Indicator { lo, hi } => {
            let branches = if *lo <= 0.0 || *hi >= 1.0 { 1.0 } else { 2.0 };
            QuantileModel::constant(branches)
        }
        ObservableKind::Bv { m1, m2 } => QuantileModel::constant(m1 + 2.0 * m2),
        ObservableKind::PiecewiseMonotone { branches, tail } => {
            let n = branches.len() as f64;
            // H(t) = tail(t / N), hence Q(u) = N · Q_tail(u).
            match tail {
                TailFunction::PowerLaw {
                    exponent,
                    scale,
                    threshold,
                } => {
                    let b = 1.0 / exponent;
                    if b >= 1.0 {
                        return Err(invalid("branch tail must have exponent > 1 for an integrable quantile"));
                    }
                    QuantileModel::power_law(n * scale.max(*threshold), b)
                }
                TailFunction::Bounded { bound } => QuantileModel::constant(n * bound),
                TailFunction::Tabulated { points } => QuantileModel::Tabulated {
                    tail: points.iter().map(|&(t, h)| (n * t, h)).collect(),
                },
            }
        }
    })
}

/// Generalised inverse of the empirical tail of `|values|`, given values
/// sorted in decreasing order.
pub fn empirical_quantile(sorted_desc: &[f64], u: f64) -> f64 {
    let m = (u * sorted_desc.len() as f64).floor() as usize;
    sorted_desc.get(m).copied().unwrap_or(0.0)
}

/// Smallest `K` such that `K · shape(u)` dominates the empirical quantile of
/// `|samples|` at every level in `levels`, where `shape` is `model` at unit scale.
pub fn fit_quantile_scale(model: &QuantileModel, samples: &[f64], levels: &[f64]) -> Result<f64> {
    let QuantileModel::PowerLaw { b, vanishing, .. } = model else {
        return Err(invalid("scale fitting applies to power-law quantile models"));
    };
    let shape = QuantileModel::PowerLaw {
        scale: 1.0,
        b: *b,
        vanishing: *vanishing,
    };
    let mut abs: Vec<f64> = samples.iter().map(|v| v.abs()).collect();
    abs.sort_by(|a, b| b.total_cmp(a));
    Ok(levels
        .iter()
        .filter(|&&u| u > 0.0 && u < 1.0)
        .map(|&u| empirical_quantile(&abs, u) / shape.eval(u))
        .fold(0.0, f64::max))
}

/// Minimum iteration budget accepted by [`estimate_center`].
pub const MIN_CENTER_BUDGET: u64 = 100_000;
const CENTER_BATCHES: u64 = 32;

/// Time-average estimate of `ν(f)` with a batch-means standard error.
///
/// The budget is split over independent burned-in orbits (one per batch), so
/// batches may run in parallel and are combined in batch order.
pub fn estimate_center(f: &Observable, spec: &MapSpec, budget: u64, seed: u64) -> Result<Center> {
    if budget < MIN_CENTER_BUDGET {
        return Err(invalid(format!(
            "center estimation needs a budget of at least {MIN_CENTER_BUDGET} iterations"
        )));
    }
    f.validate_for(spec.gamma)?;
    if let Some(c) = f.is_constant() {
        return Ok(Center { mean: c, stderr: 0.0 });
    }
    let per_batch = (budget / CENTER_BATCHES) as usize;
    let batches = run_replicas(CENTER_BATCHES as usize, None, |batch| -> Result<f64> {
        let orbit = Orbit::new(&OrbitConfig::sampled(per_batch, seed, batch), spec)?;
        let sum: f64 = orbit.map(|x| f.value(x)).sum();
        Ok(sum / per_batch as f64)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let k = batches.len() as f64;
    let mean = batches.iter().sum::<f64>() / k;
    let var = batches.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (k - 1.0);
    Ok(Center {
        mean,
        stderr: (var / k).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn obs(kind: ObservableKind) -> Observable {
        kind.into()
    }

    #[test]
    fn bounded_tail_quantile_is_the_bound() {
        let h = TailFunction::Bounded { bound: 3.5 };
        assert_eq!(quantile_from_tail(&h, 0.3).unwrap(), 3.5);
        assert_eq!(quantile_from_tail(&h, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn power_tail_quantile() {
        let h = TailFunction::PowerLaw {
            exponent: 2.0,
            scale: 1.0,
            threshold: 0.0,
        };
        assert_relative_eq!(quantile_from_tail(&h, 0.25).unwrap(), 2.0, max_relative = 1e-15);
        assert_eq!(quantile_from_tail(&h, 0.0).unwrap(), f64::INFINITY);
        assert!(matches!(quantile_from_tail(&h, 1.5), Err(Error::Domain(_))));
        assert!(matches!(quantile_from_tail(&h, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn tabulated_tail_is_a_right_continuous_step() {
        let h = TailFunction::Tabulated {
            points: vec![(0.0, 1.0), (1.0, 0.5), (2.0, 0.2), (4.0, 0.0)],
        };
        assert_eq!(h.eval(0.999), 1.0);
        assert_eq!(h.eval(1.0), 0.5);
        assert_eq!(h.eval(3.9), 0.2);
        assert_eq!(h.eval(10.0), 0.0);
        assert_eq!(quantile_from_tail(&h, 0.5).unwrap(), 1.0);
        assert_eq!(quantile_from_tail(&h, 0.49).unwrap(), 2.0);
        assert_eq!(quantile_from_tail(&h, 0.0).unwrap(), 4.0);
        assert_eq!(quantile_from_tail(&h, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn tabulated_tail_validation() {
        let bad = TailFunction::Tabulated {
            points: vec![(0.0, 1.0), (1.0, 0.7), (2.0, 0.8), (3.0, 0.0)],
        };
        assert!(bad.validate().is_err());
        let no_zero = TailFunction::Tabulated {
            points: vec![(0.0, 1.0), (1.0, 0.3)],
        };
        assert!(no_zero.validate().is_err());
    }

    #[test]
    fn pointwise_values() {
        let f = obs(ObservableKind::NeutralSingularity { s: 0.25 });
        assert_relative_eq!(observable_eval(&f, 0.0625).unwrap(), 2.0, max_relative = 1e-15);
        assert!(matches!(observable_eval(&f, 0.0), Err(Error::Singularity(_))));
        let g = obs(ObservableKind::BoundarySingularity { s: 0.5 });
        assert_relative_eq!(observable_eval(&g, 0.75).unwrap(), 2.0, max_relative = 1e-15);
        assert!(matches!(observable_eval(&g, 1.0), Err(Error::Singularity(_))));
        let ind = obs(ObservableKind::Indicator { lo: 0.5, hi: 1.0 });
        assert_eq!(observable_eval(&ind, 0.3).unwrap(), 0.0);
        assert_eq!(observable_eval(&ind, 0.5).unwrap(), 1.0);
        let bv = obs(ObservableKind::Bv { m1: 1.0, m2: 4.0 });
        assert_eq!(observable_eval(&bv, 0.0).unwrap(), -1.0);
        assert_relative_eq!(observable_eval(&bv, 0.6).unwrap(), 0.4, max_relative = 1e-12);
    }

    #[test]
    fn piecewise_monotone_sums_branches() {
        let f = obs(ObservableKind::PiecewiseMonotone {
            branches: vec![
                MonotoneBranch { lo: 0.0, hi: 0.5, scale: 1.0, exponent: 0.5, pole: Pole::Left },
                MonotoneBranch { lo: 0.5, hi: 1.0, scale: 2.0, exponent: 0.0, pole: Pole::Right },
            ],
            tail: TailFunction::PowerLaw { exponent: 2.0, scale: 2.0, threshold: 0.0 },
        });
        assert_relative_eq!(observable_eval(&f, 0.25).unwrap(), 2.0);
        assert_relative_eq!(observable_eval(&f, 0.75).unwrap(), 2.0);
        let q = observable_quantile_params(&f, 0.3).unwrap();
        assert_eq!(q, QuantileModel::power_law(4.0, 0.5));
    }

    #[test]
    fn quantile_tags() {
        let f = obs(ObservableKind::NeutralSingularity { s: 0.25 });
        let q = observable_quantile_params(&f, 0.25).unwrap();
        assert_relative_eq!(q.exponent(), 1.0 / 3.0, max_relative = 1e-15);

        let g = obs(ObservableKind::BoundarySingularity { s: 0.3 });
        for gamma in [0.1, 0.5, 0.9] {
            assert_eq!(observable_quantile_params(&g, gamma).unwrap().exponent(), 0.3);
        }

        let bv = obs(ObservableKind::Bv { m1: 1.0, m2: 2.0 });
        let q = observable_quantile_params(&bv, 0.4).unwrap();
        assert_eq!(q, QuantileModel::constant(5.0));
        assert_eq!(q.eval(0.01), 5.0);
        assert_eq!(q.exponent(), 0.0);
    }

    #[test]
    fn neutral_singularity_too_strong_is_rejected() {
        let f = obs(ObservableKind::NeutralSingularity { s: 0.8 });
        assert!(observable_quantile_params(&f, 0.25).is_err());
        let f = obs(ObservableKind::NeutralSingularity { s: 0.75 });
        assert!(observable_quantile_params(&f, 0.25).is_err());
    }

    #[test]
    fn vanishing_factor_requires_monotone_quantile() {
        let ok = QuantileModel::PowerLaw { scale: 1.0, b: 0.3, vanishing: Some(VanishingFactor { q: 0.2 }) };
        assert!(ok.validate().is_ok());
        let bad = QuantileModel::PowerLaw { scale: 1.0, b: 0.1, vanishing: Some(VanishingFactor { q: 0.5 }) };
        assert!(bad.validate().is_err());
        let eps = VanishingFactor { q: 1.0 };
        assert_eq!(eps.eval(1.0), 1.0);
        assert!(eps.eval(1e-300) < 0.01);
    }

    #[test]
    fn constant_center_is_exact() {
        let spec = MapSpec::lsv(0.25);
        let c = estimate_center(&obs(ObservableKind::Constant { value: 0.3 }), &spec, 100_000, 1).unwrap();
        assert_eq!(c, Center { mean: 0.3, stderr: 0.0 });
        let one = estimate_center(&obs(ObservableKind::Indicator { lo: 0.0, hi: 1.0 }), &spec, 100_000, 1).unwrap();
        assert_eq!(one.mean, 1.0);
        assert_eq!(one.stderr, 0.0);
        assert!(estimate_center(&obs(ObservableKind::Constant { value: 1.0 }), &spec, 10, 1).is_err());
    }

    #[test]
    fn empirical_quantile_inverts_the_empirical_tail() {
        let v = [5.0, 4.0, 3.0, 2.0, 1.0];
        assert_eq!(empirical_quantile(&v, 0.0), 5.0);
        assert_eq!(empirical_quantile(&v, 0.2), 4.0);
        assert_eq!(empirical_quantile(&v, 0.99), 1.0);
        assert_eq!(empirical_quantile(&v, 1.0), 0.0);
    }

    fn tail_strategy() -> impl Strategy<Value = TailFunction> {
        prop::collection::vec((0.01f64..3.0, 0.0f64..1.0), 1..12).prop_map(|steps| {
            let mut t = 0.0;
            let mut h = 1.0f64;
            let mut points = vec![(0.0, 1.0)];
            for (dt, shrink) in steps {
                t += dt;
                h *= shrink;
                points.push((t, h));
            }
            points.push((t + 1.0, 0.0));
            TailFunction::Tabulated { points }
        })
    }

    proptest! {
        #[test]
        fn galois_pair(h in tail_strategy(), u in 0.0f64..=1.0, t in 0.0f64..40.0) {
            let q = quantile_from_tail(&h, u).unwrap();
            if h.eval(t) <= u {
                prop_assert!(q <= t);
            }
            if q <= t {
                prop_assert!(h.eval(t + 1e-9) <= u);
                prop_assert!(h.eval(q) <= u);
            }
        }

        #[test]
        fn quantile_non_increasing(h in tail_strategy(), u in 0.0f64..=1.0, v in 0.0f64..=1.0) {
            let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
            prop_assert!(quantile_from_tail(&h, lo).unwrap() >= quantile_from_tail(&h, hi).unwrap());
        }
    }
}
