//! Dependence coefficients, moment and deviation bounds, and Monte Carlo
//! experiments for Birkhoff sums of intermittent interval maps.

// Parameter checks are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod coefficients;
pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod montecarlo;
pub mod observables;
pub mod quadrature;
pub mod rng;

pub use error::{Error, Result};
