//! Intermittent interval maps and synthetic oracle processes.
//!
//! The LSV map is
//!
//! ```text
//! θ(x) = x (1 + 2^γ x^γ)   for x ∈ [0, 1/2)
//! θ(x) = 2x − 1            for x ∈ [1/2, 1]
//! ```
//!
//! with a neutral fixed point at 0. The piecewise GPM family generalises it to a
//! neutral branch on `[0, y₁)` followed by full affine expanding branches.
//! Orbits sampled from a uniform start are burned in so that retained points are
//! (approximately) distributed according to the absolutely continuous invariant
//! measure.

use rand::Rng;
use rand_distr::{Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{substream, StreamRng};

/// Default number of discarded iterations for invariant-measure sampling.
pub const DEFAULT_BURN_IN: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Increasing,
    Decreasing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapKind {
    /// Two implicit branches split at 1/2.
    Lsv,
    /// `breakpoints` are `0 = y₀ < y₁ < … < y_d = 1`. Branch 0 is neutral of LSV
    /// form scaled to be onto `[0, 1]`; branch `k ≥ 1` is affine and onto, with
    /// `orientations[k - 1]`.
    PiecewiseGpm {
        breakpoints: Vec<f64>,
        orientations: Vec<Orientation>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    pub gamma: f64,
    #[serde(flatten)]
    pub kind: MapKind,
}

impl MapSpec {
    pub fn lsv(gamma: f64) -> Self {
        Self {
            gamma,
            kind: MapKind::Lsv,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(invalid(format!("gamma must lie in (0,1), got {}", self.gamma)));
        }
        if let MapKind::PiecewiseGpm {
            breakpoints,
            orientations,
        } = &self.kind
        {
            if breakpoints.len() < 3 {
                return Err(invalid("a GPM map needs at least two branches"));
            }
            if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
                return Err(invalid("GPM breakpoints must start at 0 and end at 1"));
            }
            if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(invalid("GPM breakpoints must be strictly increasing"));
            }
            if orientations.len() != breakpoints.len() - 2 {
                return Err(invalid(format!(
                    "expected {} branch orientations, got {}",
                    breakpoints.len() - 2,
                    orientations.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
enum PowKind {
    Quarter,
    Half,
    General(f64),
}

impl PowKind {
    fn new(gamma: f64) -> Self {
        if gamma == 0.25 {
            PowKind::Quarter
        } else if gamma == 0.5 {
            PowKind::Half
        } else {
            PowKind::General(gamma)
        }
    }

    #[inline]
    fn pow(self, x: f64) -> f64 {
        match self {
            PowKind::Quarter => x.sqrt().sqrt(),
            PowKind::Half => x.sqrt(),
            PowKind::General(g) => x.powf(g),
        }
    }
}

#[derive(Clone, Debug)]
enum Branches {
    Lsv,
    Gpm {
        breakpoints: Vec<f64>,
        orientations: Vec<Orientation>,
        neutral_scale: f64,
    },
}

/// A validated map ready for iteration.
#[derive(Clone, Debug)]
pub struct IntervalMap {
    pow: PowKind,
    branches: Branches,
}

impl IntervalMap {
    pub fn new(spec: &MapSpec) -> Result<Self> {
        spec.validate()?;
        let branches = match &spec.kind {
            MapKind::Lsv => Branches::Lsv,
            MapKind::PiecewiseGpm {
                breakpoints,
                orientations,
            } => {
                let y1 = breakpoints[1];
                Branches::Gpm {
                    breakpoints: breakpoints.clone(),
                    orientations: orientations.clone(),
                    // x(1 + c x^γ) maps [0, y₁] onto [0, 1].
                    neutral_scale: (1.0 / y1 - 1.0) / y1.powf(spec.gamma),
                }
            }
        };
        Ok(Self {
            pow: PowKind::new(spec.gamma),
            branches,
        })
    }

    /// One application of the map. `x` must already be in `[0, 1]`.
    #[inline]
    pub fn step(&self, x: f64) -> f64 {
        let y = match &self.branches {
            Branches::Lsv => {
                if x < 0.5 {
                    x * (1.0 + self.pow.pow(2.0 * x))
                } else {
                    2.0 * x - 1.0
                }
            }
            Branches::Gpm {
                breakpoints,
                orientations,
                neutral_scale,
            } => {
                // Branch k covers [y_k, y_{k+1}); the last branch also owns 1.
                let k = breakpoints
                    .partition_point(|&b| b <= x)
                    .saturating_sub(1)
                    .min(breakpoints.len() - 2);
                if k == 0 {
                    x * (1.0 + neutral_scale * self.pow.pow(x))
                } else {
                    let (lo, hi) = (breakpoints[k], breakpoints[k + 1]);
                    match orientations[k - 1] {
                        Orientation::Increasing => (x - lo) / (hi - lo),
                        Orientation::Decreasing => (hi - x) / (hi - lo),
                    }
                }
            }
        };
        y.clamp(0.0, 1.0)
    }
}

/// Applies the map once, rejecting points outside `[0, 1]` by more than one ulp.
pub fn map_step(x: f64, spec: &MapSpec) -> Result<f64> {
    let x = check_unit(x)?;
    Ok(IntervalMap::new(spec)?.step(x))
}

fn check_unit(x: f64) -> Result<f64> {
    if !(-f64::EPSILON..=1.0 + f64::EPSILON).contains(&x) {
        return Err(Error::Domain(format!("x = {x} is outside [0,1]")));
    }
    Ok(x.clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RandomStart {
    #[serde(rename = "uniform-random")]
    UniformRandom,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialPoint {
    Fixed(f64),
    Random(RandomStart),
}

impl Default for InitialPoint {
    fn default() -> Self {
        InitialPoint::Random(RandomStart::UniformRandom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitConfig {
    #[serde(default)]
    pub initial_point: InitialPoint,
    #[serde(default = "default_burn_in")]
    pub burn_in: u64,
    pub length: usize,
    pub seed: u64,
    #[serde(default)]
    pub replica_index: u64,
}

fn default_burn_in() -> u64 {
    DEFAULT_BURN_IN
}

impl OrbitConfig {
    /// Uniform start with the default burn-in.
    pub fn sampled(length: usize, seed: u64, replica_index: u64) -> Self {
        Self {
            initial_point: InitialPoint::default(),
            burn_in: DEFAULT_BURN_IN,
            length,
            seed,
            replica_index,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.length == 0 {
            return Err(invalid("orbit length must be positive"));
        }
        if self.burn_in.checked_add(self.length as u64).is_none() {
            return Err(invalid("burn_in + length overflows the iteration counter"));
        }
        if let InitialPoint::Fixed(x) = self.initial_point {
            if !(0.0..=1.0).contains(&x) {
                return Err(invalid(format!("initial point {x} is outside [0,1]")));
            }
        }
        Ok(())
    }
}

/// Streaming orbit `x_{burn_in+1}, x_{burn_in+2}, …`.
///
/// Orbits started from a uniform draw are reinjected at the smallest positive
/// normal number whenever an iterate rounds to exactly 0; orbits started at a
/// fixed point follow the map exactly, so preimages of 0 land on 0 and stay.
#[derive(Clone, Debug)]
pub struct Orbit {
    map: IntervalMap,
    x: f64,
    reinject: bool,
    remaining: usize,
}

impl Orbit {
    pub fn new(cfg: &OrbitConfig, spec: &MapSpec) -> Result<Self> {
        cfg.validate()?;
        let map = IntervalMap::new(spec)?;
        let (x0, reinject) = match cfg.initial_point {
            InitialPoint::Fixed(x) => (x, false),
            InitialPoint::Random(_) => {
                let mut rng = substream(cfg.seed, cfg.replica_index);
                (rng.sample::<f64, _>(Open01), true)
            }
        };
        let mut orbit = Self {
            map,
            x: x0,
            reinject,
            remaining: usize::MAX,
        };
        for _ in 0..cfg.burn_in {
            orbit.advance();
        }
        orbit.remaining = cfg.length;
        Ok(orbit)
    }

    #[inline]
    fn advance(&mut self) -> f64 {
        let mut y = self.map.step(self.x);
        if self.reinject && y == 0.0 {
            y = f64::MIN_POSITIVE;
        }
        self.x = y;
        y
    }
}

impl Iterator for Orbit {
    type Item = f64;

    #[inline]
    fn next(&mut self) -> Option<f64> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        Some(self.advance())
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

/// Emits `cfg.length` iterates after discarding `cfg.burn_in`.
pub fn generate_orbit(cfg: &OrbitConfig, spec: &MapSpec) -> Result<Vec<f64>> {
    Ok(Orbit::new(cfg, spec)?.collect())
}

/// Moving average `X_i = Σ_j w_j ε_{i−j}` of i.i.d. standard normals, exactly
/// `(weights.len() − 1)`-dependent.
#[derive(Clone, Debug)]
pub struct MovingAverage {
    weights: Vec<f64>,
    // ring of the last weights.len() innovations, newest at `head`
    window: Vec<f64>,
    head: usize,
    rng: StreamRng,
    remaining: usize,
}

impl MovingAverage {
    pub fn new(cfg: &OrbitConfig, weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(invalid("moving-average weights must be non-empty"));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(invalid("moving-average weights must be finite"));
        }
        cfg.validate()?;
        let mut rng = substream(cfg.seed, cfg.replica_index);
        let window: Vec<f64> = (0..weights.len())
            .map(|_| rng.sample(StandardNormal))
            .collect();
        Ok(Self {
            weights: weights.to_vec(),
            window,
            head: weights.len() - 1,
            rng,
            remaining: cfg.length,
        })
    }
}

impl Iterator for MovingAverage {
    type Item = f64;

    #[inline]
    fn next(&mut self) -> Option<f64> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let m = self.weights.len();
        // window holds ε_{i−m+1..=i}
        let value = (0..m)
            .map(|j| self.weights[j] * self.window[(self.head + m - j) % m])
            .sum();
        self.head = (self.head + 1) % m;
        self.window[self.head] = self.rng.sample(StandardNormal);
        Some(value)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

/// Collects a moving-average oracle sequence of length `cfg.length`.
pub fn mdep_sequence(cfg: &OrbitConfig, weights: &[f64]) -> Result<Vec<f64>> {
    Ok(MovingAverage::new(cfg, weights)?.collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fixed(x0: f64, burn_in: u64, length: usize) -> OrbitConfig {
        OrbitConfig {
            initial_point: InitialPoint::Fixed(x0),
            burn_in,
            length,
            seed: 1,
            replica_index: 0,
        }
    }

    #[test]
    fn lsv_branches() {
        let spec = MapSpec::lsv(0.5);
        assert_eq!(map_step(0.5, &spec).unwrap(), 0.0);
        assert_eq!(map_step(0.75, &spec).unwrap(), 0.5);
        assert_relative_eq!(
            map_step(0.25, &spec).unwrap(),
            0.25 * (1.0 + 2f64.sqrt() * 0.25f64.sqrt()),
            max_relative = 1e-15
        );
        assert_relative_eq!(map_step(0.25, &spec).unwrap(), 0.426_776_695_296_636_9, max_relative = 1e-15);
        assert_eq!(map_step(0.0, &spec).unwrap(), 0.0);
        assert_eq!(map_step(1.0, &spec).unwrap(), 1.0);
    }

    #[test]
    fn general_gamma_matches_formula() {
        let spec = MapSpec::lsv(0.3);
        let x: f64 = 0.2;
        let want = x * (1.0 + 2f64.powf(0.3) * x.powf(0.3));
        assert_relative_eq!(map_step(x, &spec).unwrap(), want, max_relative = 1e-14);
    }

    #[test]
    fn rejects_points_outside_unit_interval() {
        let spec = MapSpec::lsv(0.5);
        assert!(matches!(map_step(1.1, &spec), Err(Error::Domain(_))));
        assert!(matches!(map_step(-0.01, &spec), Err(Error::Domain(_))));
        assert!(map_step(1.0 + f64::EPSILON / 2.0, &spec).is_ok());
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(MapSpec::lsv(1.0).validate().is_err());
        assert!(MapSpec::lsv(0.0).validate().is_err());
        let bad = MapSpec {
            gamma: 0.3,
            kind: MapKind::PiecewiseGpm {
                breakpoints: vec![0.0, 0.6, 0.4, 1.0],
                orientations: vec![Orientation::Increasing; 2],
            },
        };
        assert!(bad.validate().is_err());
        let wrong_count = MapSpec {
            gamma: 0.3,
            kind: MapKind::PiecewiseGpm {
                breakpoints: vec![0.0, 0.5, 1.0],
                orientations: vec![],
            },
        };
        assert!(wrong_count.validate().is_err());
    }

    #[test]
    fn gpm_with_lsv_breakpoints_is_lsv() {
        let gpm = MapSpec {
            gamma: 0.35,
            kind: MapKind::PiecewiseGpm {
                breakpoints: vec![0.0, 0.5, 1.0],
                orientations: vec![Orientation::Increasing],
            },
        };
        let lsv = MapSpec::lsv(0.35);
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            assert_relative_eq!(
                map_step(x, &gpm).unwrap(),
                map_step(x, &lsv).unwrap(),
                max_relative = 1e-12,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn gpm_branches_are_onto() {
        let spec = MapSpec {
            gamma: 0.4,
            kind: MapKind::PiecewiseGpm {
                breakpoints: vec![0.0, 0.4, 0.7, 1.0],
                orientations: vec![Orientation::Increasing, Orientation::Decreasing],
            },
        };
        let m = IntervalMap::new(&spec).unwrap();
        assert_eq!(m.step(0.4), 0.0);
        assert_relative_eq!(m.step(0.4 - 1e-12), 1.0, epsilon = 1e-9);
        assert_eq!(m.step(0.7), 1.0);
        assert_eq!(m.step(1.0), 0.0);
    }

    #[test]
    fn orbit_from_half_hits_fixed_point() {
        let orbit = generate_orbit(&fixed(0.5, 0, 2), &MapSpec::lsv(0.5)).unwrap();
        assert_eq!(orbit, vec![0.0, 0.0]);
    }

    #[test]
    fn orbit_is_deterministic_and_in_range() {
        let spec = MapSpec::lsv(0.25);
        let cfg = OrbitConfig::sampled(5000, 42, 3);
        let a = generate_orbit(&cfg, &spec).unwrap();
        let b = generate_orbit(&cfg, &spec).unwrap();
        assert_eq!(a.len(), 5000);
        assert_eq!(a, b);
        assert!(a.iter().all(|v| (0.0..=1.0).contains(v)));
        let other = generate_orbit(&OrbitConfig::sampled(5000, 42, 4), &spec).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn orbit_config_validation() {
        let mut cfg = fixed(0.3, u64::MAX, 10);
        assert!(cfg.validate().is_err());
        cfg.burn_in = 0;
        cfg.length = 0;
        assert!(cfg.validate().is_err());
        assert!(fixed(1.5, 0, 3).validate().is_err());
    }

    #[test]
    fn initial_point_serde() {
        let cfg: OrbitConfig =
            serde_json::from_str(r#"{"initial_point":"uniform-random","length":3,"seed":1}"#).unwrap();
        assert_eq!(cfg.initial_point, InitialPoint::Random(RandomStart::UniformRandom));
        assert_eq!(cfg.burn_in, DEFAULT_BURN_IN);
        let cfg: OrbitConfig =
            serde_json::from_str(r#"{"initial_point":0.25,"length":3,"seed":1}"#).unwrap();
        assert_eq!(cfg.initial_point, InitialPoint::Fixed(0.25));
    }

    fn lag_cov(xs: &[f64], lag: usize) -> f64 {
        let n = xs.len() - lag;
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        (0..n).map(|i| (xs[i] - mean) * (xs[i + lag] - mean)).sum::<f64>() / n as f64
    }

    #[test]
    fn moving_average_covariances() {
        let n = 400_000;
        let tol = 4.0 / (n as f64).sqrt();
        let iid = mdep_sequence(&OrbitConfig::sampled(n, 9, 0), &[1.0]).unwrap();
        assert!(lag_cov(&iid, 1).abs() < tol);
        assert!((lag_cov(&iid, 0) - 1.0).abs() < 3.0 * tol);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ma = mdep_sequence(&OrbitConfig::sampled(n, 9, 1), &[h, h]).unwrap();
        assert!((lag_cov(&ma, 1) - 0.5).abs() < 2.0 * tol);
        assert!(lag_cov(&ma, 2).abs() < tol);
    }

    #[test]
    fn differenced_noise_has_bounded_partial_sums() {
        // S_n = ε_n − ε_0, so Var(S_n) = 2 for every n.
        let xs = mdep_sequence(&OrbitConfig::sampled(1 << 16, 5, 0), &[1.0, -1.0]).unwrap();
        let s: f64 = xs.iter().sum();
        assert!(s.abs() < 8.0);
    }

    #[test]
    fn moving_average_rejects_empty_weights() {
        assert!(mdep_sequence(&OrbitConfig::sampled(10, 1, 0), &[]).is_err());
    }
}
