//! Pure statistics on sample arrays: partial sums, Donsker lines, Hölder
//! norms, scaling regressions and the Kolmogorov–Smirnov distance.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{invalid, Error, Result};
use crate::observables::Observable;

/// Breakpoint count up to which Hölder seminorms are computed over all pairs.
pub const HOLDER_EXACT_LIMIT: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffStats {
    /// `S_1, …, S_n`
    pub partial_sums: Vec<f64>,
    pub max_abs: f64,
}

/// Running sums of `f(x_i) − ν(f)` along an orbit.
pub fn birkhoff_stats(orbit: &[f64], f: &Observable) -> BirkhoffStats {
    partial_sums(orbit.iter().map(|&x| f.centered(x)))
}

/// Running sums of arbitrary increments.
pub fn partial_sums<I: IntoIterator<Item = f64>>(increments: I) -> BirkhoffStats {
    let mut s = 0.0;
    let mut max_abs: f64 = 0.0;
    let partial_sums = increments
        .into_iter()
        .map(|x| {
            s += x;
            max_abs = max_abs.max(s.abs());
            s
        })
        .collect();
    BirkhoffStats { partial_sums, max_abs }
}

/// `W_n(t) = (S_[nt] + (nt − [nt]) X_{[nt]+1}) / √n`, with `sums[k−1] = S_k`
/// and `increments[k−1] = X_k`.
pub fn donsker_path(sums: &[f64], increments: &[f64], t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("Donsker time must lie in [0,1], got {t}")));
    }
    let n = increments.len();
    if n == 0 || sums.len() != n {
        return Err(invalid("Donsker line needs matching non-empty sums and increments"));
    }
    let nt = n as f64 * t;
    let k = (nt.floor() as usize).min(n);
    let s_k = if k == 0 { 0.0 } else { sums[k - 1] };
    let value = if k == n { s_k } else { s_k + (nt - k as f64) * increments[k] };
    Ok(value / (n as f64).sqrt())
}

/// Breakpoints `(k/n, S_k/√n)`, `k = 0..=n`, of the Donsker line.
pub fn donsker_breakpoints(sums: &[f64]) -> Vec<(f64, f64)> {
    let n = sums.len() as f64;
    let root = n.sqrt();
    std::iter::once((0.0, 0.0))
        .chain(sums.iter().enumerate().map(|(k, s)| ((k + 1) as f64 / n, s / root)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderNorm {
    /// `w_β(f, 1) = sup |f(t) − f(s)| / |t − s|^β`
    pub seminorm: f64,
    /// `|f(0)| + w_β(f, 1)`
    pub norm: f64,
    /// True when only pairs with power-of-two index gaps were examined, in
    /// which case `seminorm` is a lower bound.
    pub approximate: bool,
}

/// Hölder seminorm and norm of the piecewise-linear path through `points`.
///
/// For a piecewise-linear path the supremum is attained at a pair of
/// breakpoints, so only those pairs are scanned.
pub fn holder_norm(points: &[(f64, f64)], beta: f64) -> Result<HolderNorm> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(invalid(format!("Hölder exponent must lie in (0,1), got {beta}")));
    }
    if points.is_empty() {
        return Err(invalid("path needs at least one breakpoint"));
    }
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(invalid("breakpoints must be strictly increasing in t"));
    }
    let m = points.len();
    let mut sup: f64 = 0.0;
    let approximate = m > HOLDER_EXACT_LIMIT;
    if !approximate {
        for (i, &(ti, fi)) in points.iter().enumerate() {
            for &(tj, fj) in &points[i + 1..] {
                sup = sup.max((fj - fi).abs() / (tj - ti).powf(beta));
            }
        }
    } else {
        let mut gap = 1;
        while gap < m {
            let mut cached = (f64::NAN, f64::NAN);
            for i in 0..m - gap {
                let (ti, fi) = points[i];
                let (tj, fj) = points[i + gap];
                let dt = tj - ti;
                if dt != cached.0 {
                    cached = (dt, dt.powf(beta));
                }
                sup = sup.max((fj - fi).abs() / cached.1);
            }
            gap *= 2;
        }
    }
    Ok(HolderNorm {
        seminorm: sup,
        norm: points[0].1.abs() + sup,
        approximate,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub log_coefficient: Option<f64>,
    pub log_coefficient_stderr: Option<f64>,
    /// Weighted residual sum of squares.
    pub chi2: f64,
    pub dof: usize,
}

/// Weighted least squares of `ln y` on `ln n` (plus `ln ln n` when `with_log`).
///
/// Points are `(n, y, stderr of y)`. The weights are `(y / stderr)²`; when every
/// stderr is 0 the fit is unweighted. Standard errors are inflated by the
/// reduced χ² whenever it exceeds 1.
pub fn scaling_fit(points: &[(f64, f64, f64)], with_log: bool) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(invalid("scaling fit needs at least 3 points"));
    }
    if points.iter().any(|&(n, y, se)| !(n > 1.0) || !(y > 0.0) || !(se >= 0.0) || !y.is_finite()) {
        return Err(Error::Degenerate(
            "scaling fit needs n > 1, positive finite estimates and non-negative errors".into(),
        ));
    }
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    if hi / lo < 4.0 {
        return Err(Error::Degenerate("n values must span at least two octaves".into()));
    }
    let k = if with_log { 3 } else { 2 };
    let m = points.len();
    let unweighted = points.iter().all(|p| p.2 == 0.0);
    if !unweighted && points.iter().any(|p| p.2 == 0.0) {
        return Err(Error::Degenerate("mixed zero and positive standard errors".into()));
    }
    let x = DMatrix::from_fn(m, k, |i, j| {
        let ln = points[i].0.ln();
        match j {
            0 => 1.0,
            1 => ln,
            _ => ln.ln(),
        }
    });
    let z = DVector::from_iterator(m, points.iter().map(|p| p.1.ln()));
    let w = DVector::from_iterator(
        m,
        points.iter().map(|p| if unweighted { 1.0 } else { (p.1 / p.2).powi(2) }),
    );
    let xtw = DMatrix::from_fn(k, m, |j, i| x[(i, j)] * w[i]);
    let normal = &xtw * &x;
    let cov = normal
        .clone()
        .try_inverse()
        .filter(|c| c.iter().all(|v| v.is_finite()))
        .ok_or_else(|| Error::Degenerate("singular design matrix".into()))?;
    let coef = &cov * (&xtw * &z);
    let resid = &z - &x * &coef;
    let chi2: f64 = resid.iter().zip(w.iter()).map(|(r, w)| w * r * r).sum();
    let dof = m - k;
    let reduced = if dof > 0 { chi2 / dof as f64 } else { 0.0 };
    let scale = if unweighted { reduced } else { reduced.max(1.0) };
    let se = |j: usize| (cov[(j, j)] * scale).max(0.0).sqrt();
    Ok(ScalingFit {
        exponent: coef[1],
        stderr: se(1),
        intercept: coef[0],
        log_coefficient: with_log.then(|| coef[2]),
        log_coefficient_stderr: with_log.then(|| se(2)),
        chi2,
        dof,
    })
}

/// Kolmogorov–Smirnov distance between the samples and `N(0, sigma²)`.
pub fn ks_normal(samples: &[f64], sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Degenerate(format!("sigma must be positive, got {sigma}")));
    }
    if samples.len() < 100 {
        return Err(Error::Degenerate("KS distance needs at least 100 samples".into()));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Degenerate("samples must be finite".into()));
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::Degenerate(e.to_string()))?;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal.cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max))
}

/// Mean and jackknife standard error of the mean.
pub fn mean_jackknife(values: &[f64]) -> (f64, f64) {
    let r = values.len();
    if r == 0 {
        return (f64::NAN, f64::NAN);
    }
    let total: f64 = values.iter().sum();
    let mean = total / r as f64;
    if r == 1 {
        return (mean, 0.0);
    }
    let rf = r as f64;
    // leave-one-out means, accumulated in index order
    let ss: f64 = values
        .iter()
        .map(|v| {
            let loo = (total - v) / (rf - 1.0);
            (loo - mean).powi(2)
        })
        .sum();
    (mean, ((rf - 1.0) / rf * ss).sqrt())
}

/// Empirical `level`-quantile (nearest rank) of unsorted values.
pub fn quantile(values: &[f64], level: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let idx = ((level * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1;
    v[idx]
}
