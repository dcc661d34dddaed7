//! Rosenthal-type moment bound for maxima of partial sums.
//!
//! Both sums over lags are folded into a single integral against the step
//! function `α⁻¹ ∧ n`: `Σ_{k<n} w_k 1_{u < α(k)} = Σ_{k < α⁻¹(u) ∧ n} w_k`.

use crate::error::{invalid, Result};

use super::integrals::{check_accuracy, step_weighted_integral};
use super::{BoundInputs, BoundReport};

pub fn rosenthal_bound(inputs: &BoundInputs) -> Result<BoundReport> {
    inputs.validate()?;
    let p = inputs.p;
    if p < 2.0 {
        return Err(invalid(format!("the moment bound needs p ≥ 2, got {p}")));
    }
    let b = inputs.quantile.exponent();
    if p * b >= 1.0 {
        return Err(invalid(format!(
            "quantile function is not in L^p: p·b = {} ≥ 1",
            p * b
        )));
    }
    let n = inputs.n;
    let nf = n as f64;
    let q = &inputs.quantile;

    // prefix[m] = Σ_{j=1}^{m} j^(p−2)
    let mut prefix = Vec::with_capacity(n as usize + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for j in 1..=n {
        acc += (j as f64).powf(p - 2.0);
        prefix.push(acc);
    }

    let var = step_weighted_integral(&inputs.alpha.alpha1, n, |m| m as f64, q, 2.0, 0.0, 1.0, inputs.method)?;
    let high = step_weighted_integral(&inputs.alpha.alpha2, n, |m| prefix[m as usize], q, p, 0.0, 1.0, inputs.method)?;
    check_accuracy("variance", &var)?;
    check_accuracy("high_moment", &high)?;

    let mut report = BoundReport::new("rosenthal", inputs.parameter_map());
    report.quadrature_error.insert("variance".into(), var.abs_error);
    report.quadrature_error.insert("high_moment".into(), high.abs_error);
    report.diagnostics.insert("variance_sum".into(), var.value);
    report.term("term1", nf.powf(p / 2.0) * var.value.powf(p / 2.0));
    report.term("term2", nf * high.value);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::integrals::{quantile_integral, Method};
    use crate::coefficients::AlphaModel;
    use crate::observables::QuantileModel;
    use approx::assert_relative_eq;

    #[test]
    fn independent_example() {
        let inp = BoundInputs::new(AlphaModel::independent(), QuantileModel::constant(1.0), 100, 2.0);
        let rep = rosenthal_bound(&inp).unwrap();
        assert_relative_eq!(rep.get("term1").unwrap(), 50.0, max_relative = 1e-14);
        assert_relative_eq!(rep.get("term2").unwrap(), 50.0, max_relative = 1e-14);
    }

    #[test]
    fn zero_quantile() {
        let inp = BoundInputs::new(AlphaModel::power_law(1.0, 0.3), QuantileModel::constant(0.0), 10, 3.0);
        let rep = rosenthal_bound(&inp).unwrap();
        assert_eq!((rep.get("term1").unwrap(), rep.get("term2").unwrap()), (0.0, 0.0));
    }

    #[test]
    fn rejects_non_integrable_quantile() {
        let inp = BoundInputs::new(AlphaModel::power_law(1.0, 0.3), QuantileModel::power_law(1.0, 0.5), 10, 2.0);
        assert!(rosenthal_bound(&inp).is_err());
    }

    #[test]
    fn matches_lagwise_sums() {
        let alpha = AlphaModel::power_law(0.8, 0.3);
        let q = QuantileModel::power_law(1.0, 0.2);
        let (n, p) = (40u64, 3.0);
        let rep = rosenthal_bound(&BoundInputs::new(alpha.clone(), q.clone(), n, p)).unwrap();
        let mut var = 0.0;
        let mut high = 0.0;
        for k in 0..n {
            let a = alpha.eval(k);
            var += quantile_integral(&q, 2.0, 0.0, a, Method::ClosedForm).unwrap().value;
            high += ((k + 1) as f64).powf(p - 2.0) * quantile_integral(&q, p, 0.0, a, Method::ClosedForm).unwrap().value;
        }
        let nf = n as f64;
        assert_relative_eq!(rep.get("term1").unwrap(), nf.powf(p / 2.0) * var.powf(p / 2.0), max_relative = 1e-10);
        assert_relative_eq!(rep.get("term2").unwrap(), nf * high, max_relative = 1e-10);
    }

    #[test]
    fn non_decreasing_in_n() {
        let alpha = AlphaModel::power_law(1.0, 0.25);
        let q = QuantileModel::power_law(1.0, 0.1);
        let mut prev = (0.0, 0.0);
        for n in [1u64, 2, 4, 8, 64, 512] {
            let rep = rosenthal_bound(&BoundInputs::new(alpha.clone(), q.clone(), n, 2.5)).unwrap();
            let cur = (rep.get("term1").unwrap(), rep.get("term2").unwrap());
            assert!(cur.0 >= prev.0 && cur.1 >= prev.1);
            prev = cur;
        }
    }
}
