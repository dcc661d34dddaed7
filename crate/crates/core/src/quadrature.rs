//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Integrands of the form `u^(−c) g(u)` with an integrable singularity at 0
//! are handled by the substitution `u = v^(1/(1−c))`, which turns them into
//! `g(v^(1/(1−c))) / (1 − c)` on `[a^(1−c), b^(1−c)]`. The transformed range is
//! seeded with log-spaced panels towards 0 before adaptive bisection.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-11,
            abs_tol: 0.0,
            max_panels: 1 << 16,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub panels: usize,
}

impl Integral {
    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.abs_error == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.abs_error / self.value.abs()
        }
    }

    pub fn scaled(self, k: f64) -> Self {
        Self {
            value: self.value * k,
            abs_error: self.abs_error * k.abs(),
            panels: self.panels,
        }
    }
}

impl std::ops::Add for Integral {
    type Output = Integral;
    fn add(self, rhs: Integral) -> Integral {
        Integral {
            value: self.value + rhs.value,
            abs_error: self.abs_error + rhs.abs_error,
            panels: self.panels + rhs.panels,
        }
    }
}

impl std::iter::Sum for Integral {
    fn sum<I: Iterator<Item = Integral>>(iter: I) -> Integral {
        iter.fold(Integral::default(), |a, b| a + b)
    }
}

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Panel { a, b, value, error }
}

/// Adaptive integral of `f` over `[a, b]`, starting from the given panel edges.
fn adaptive<F: Fn(f64) -> f64>(f: &F, edges: &[f64], opts: &QuadOptions) -> Result<Integral> {
    let mut heap: BinaryHeap<Panel> = edges
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gk15(f, w[0], w[1]))
        .collect();
    let mut total: f64 = heap.iter().map(|p| p.value).sum();
    let mut err: f64 = heap.iter().map(|p| p.error).sum();
    if !total.is_finite() {
        return Err(Error::Quadrature("integrand is not finite on the range".into()));
    }
    while err > opts.abs_tol.max(opts.rel_tol * total.abs()) && heap.len() < opts.max_panels {
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval exhausted at machine precision
            heap.push(Panel { error: 0.0, ..worst });
            err -= worst.error;
            continue;
        }
        let left = gk15(f, worst.a, mid);
        let right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Recompute sums to shed accumulated cancellation.
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let abs_error: f64 = heap.iter().map(|p| p.error).sum();
    if !value.is_finite() {
        return Err(Error::Quadrature("integrand is not finite on the range".into()));
    }
    Ok(Integral {
        value,
        abs_error: abs_error.max(f64::EPSILON * value.abs()),
        panels: heap.len(),
    })
}

/// `∫_a^b f(u) du` for a bounded integrand.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<Integral> {
    if !(b > a) {
        return Ok(Integral::default());
    }
    adaptive(&f, &[a, b], opts)
}

/// `∫_a^b u^(−c) g(u) du` over `0 ≤ a < b`, for `c < 1` and `g` bounded.
pub fn integrate_singular<G: Fn(f64) -> f64>(
    g: G,
    c: f64,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<Integral> {
    if !(c < 1.0) {
        return Err(Error::Quadrature(format!(
            "u^(−{c}) is not integrable at 0"
        )));
    }
    if !(b > a) {
        return Ok(Integral::default());
    }
    if a < 0.0 {
        return Err(Error::Domain("singular integrals live on [0, ∞)".into()));
    }
    let power = 1.0 - c;
    let inv = 1.0 / power;
    let (va, vb) = (a.powf(power), b.powf(power));
    let f = |v: f64| g(v.powf(inv)) * inv;
    // log-spaced seeding towards v = 0 captures slowly varying factors like ln(1/u)
    let mut edges = vec![va];
    if va == 0.0 {
        let mut p = vb * 2f64.powi(-48);
        while p < vb {
            edges.push(p);
            p *= 4.0;
        }
    }
    edges.push(vb);
    adaptive(&f, &edges, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomials_are_exact() {
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, &QuadOptions::default()).unwrap();
        assert_relative_eq!(r.value, 8.0, max_relative = 1e-14);
    }

    #[test]
    fn oscillatory() {
        let r = integrate(|x: f64| (10.0 * x).sin(), 0.0, 3.0, &QuadOptions::default()).unwrap();
        let exact = (1.0 - (30.0f64).cos()) / 10.0;
        assert_relative_eq!(r.value, exact, max_relative = 1e-10);
    }

    #[test]
    fn power_singularity_is_removed() {
        for c in [0.0, 0.3, 2.0 / 3.0, 0.95] {
            let r = integrate_singular(|_| 1.0, c, 0.0, 0.7, &QuadOptions::default()).unwrap();
            let exact = 0.7f64.powf(1.0 - c) / (1.0 - c);
            assert_relative_eq!(r.value, exact, max_relative = 1e-12);
        }
    }

    #[test]
    fn log_factor_with_singularity() {
        // ∫_0^1 u^(-1/2) (1 - ln u)^(-1) du
        let r = integrate_singular(|u: f64| 1.0 / (1.0 - u.ln()), 0.5, 0.0, 1.0, &QuadOptions::default())
            .unwrap();
        let reference = integrate(
            // substitute u = e^{-t}: ∫_0^∞ e^{-t/2} / (1 + t) dt, truncated at t = 80
            |t: f64| (-0.5 * t).exp() / (1.0 + t),
            0.0,
            80.0,
            &QuadOptions::default(),
        )
        .unwrap();
        assert_relative_eq!(r.value, reference.value, max_relative = 1e-9);
    }

    #[test]
    fn divergent_exponent_is_rejected() {
        assert!(integrate_singular(|_| 1.0, 1.0, 0.0, 1.0, &QuadOptions::default()).is_err());
    }

    #[test]
    fn empty_range_is_zero() {
        let r = integrate(|x| x, 1.0, 1.0, &QuadOptions::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }
}
