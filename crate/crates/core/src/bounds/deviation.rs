//! Maximal deviation inequality for partial sums.

use crate::coefficients::{alpha_inverse, inverse_steps};
use crate::error::{invalid, Error, Result};

use super::integrals::{check_accuracy, quantile_integral, step_weighted_integral};
use super::{BoundInputs, BoundReport};

/// Absolute tolerance of the bisection inside one constancy interval of `α₂⁻¹ ∧ n`.
const LN_TOLERANCE: f64 = 1e-12;

/// `R(u) = α₂⁻¹(u) Q(u)`, or `R_n(u) = (α₂⁻¹(u) ∧ n) Q(u)` when `capped`.
pub fn r_function_eval(inputs: &BoundInputs, u: f64, capped: bool) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::Domain(format!("R is defined for u > 0, got {u}")));
    }
    let cap = capped.then_some(inputs.n);
    let k = alpha_inverse(&inputs.alpha.alpha2, u, cap)?;
    if k == 0 {
        return Ok(0.0);
    }
    Ok(k as f64 * inputs.quantile.eval(u))
}

/// `L_n(x) = inf { u ∈ [0,1] : R_n(u) ≤ x }`.
///
/// `R_n` is a product of a step function and a non-increasing `Q`, so the
/// search walks the steps upwards and bisects only inside the first step whose
/// right end satisfies the inequality. The returned point always satisfies
/// `R_n(L_n(x)) ≤ x`.
pub fn ln_eval(inputs: &BoundInputs, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(invalid(format!("L_n needs x ≥ 0, got {x}")));
    }
    let q = &inputs.quantile;
    if q.is_zero() {
        return Ok(0.0);
    }
    for (lo, hi, step) in inverse_steps(&inputs.alpha.alpha2, inputs.n) {
        let w = step as f64;
        if step == 0 || w * q.eval(lo) <= x {
            return Ok(lo);
        }
        // Q(hi) ≤ Q(u) on [lo, hi): if even the right end fails, so does the whole step.
        if w * q.eval(hi) > x {
            continue;
        }
        let (mut bad, mut good) = (lo, hi);
        while good - bad > LN_TOLERANCE {
            let mid = 0.5 * (bad + good);
            if !(mid > bad && mid < good) {
                break;
            }
            if w * q.eval(mid) <= x {
                good = mid;
            } else {
                bad = mid;
            }
        }
        return Ok(good);
    }
    Ok(1.0)
}

/// The four additive terms of the maximal deviation inequality at level `x`.
///
/// With `x_free`, `s_n²(x)` is replaced by its majorant
/// `n Σ_{k<n} ∫_0^{α₁(k)} Q²`, which does not depend on `x`.
pub fn deviation_bound(inputs: &BoundInputs, x: f64, x_free: bool) -> Result<BoundReport> {
    inputs.validate()?;
    if !(x > 0.0) {
        return Err(invalid(format!("deviation level must be positive, got {x}")));
    }
    let n = inputs.n;
    let nf = n as f64;
    let (r, beta, method) = (inputs.r(), inputs.beta(), inputs.method);
    let q = &inputs.quantile;
    let (a1, a2) = (&inputs.alpha.alpha1, &inputs.alpha.alpha2);
    let mut report = BoundReport::new("deviation", inputs.parameter_map());
    report.parameters.insert("x".into(), x);

    let l = ln_eval(inputs, x)?;
    report.diagnostics.insert("l_n".into(), l);

    let s_lo = if x_free { 0.0 } else { l };
    let s2 = step_weighted_integral(a1, n, |k| k as f64, q, 2.0, s_lo, 1.0, method)?;
    let head = quantile_integral(q, 1.0, 0.0, l, method)?;
    let mid = step_weighted_integral(a2, n, |k| (k as f64).powf(beta / 2.0), q, 1.0 + beta / 2.0, 0.0, l, method)?;
    let tail = step_weighted_integral(a2, n, |k| (k as f64).powf(r / 2.0), q, 1.0 + r / 2.0, l, 1.0, method)?;
    for (name, integral) in [("s2", &s2), ("head", &head), ("mid", &mid), ("tail", &tail)] {
        check_accuracy(name, integral)?;
        report.quadrature_error.insert(name.into(), integral.abs_error);
    }

    let s2n = nf * s2.value;
    report.diagnostics.insert("s_n2".into(), s2n);
    report.term("term1", s2n.powf(r / 2.0) / x.powf(r));
    report.term("term2", nf / x * head.value);
    report.term("term3", nf / x.powf(1.0 + beta / 2.0) * mid.value);
    report.term("term4", nf / x.powf(1.0 + r / 2.0) * tail.value);
    Ok(report)
}
