//! Empirical large-deviation frequencies P(max|S_k| ≥ n x) against the
//! algebraic shape of the weak-moment bound.

use alphadep::bounds::{large_deviation_bound, regime_predict, BoundInputs, LdVariant};
use alphadep::coefficients::AlphaModel;
use alphadep::dynamics::MapSpec;
use alphadep::montecarlo::{simulate, SimConfig, SimParams};
use alphadep::observables::{Observable, ObservableKind, QuantileModel};

fn main() -> alphadep::Result<()> {
    let gamma = 0.25;
    let ld_p = regime_predict(gamma, 0.0, 2.0)?.ld_p;
    let n_grid: Vec<u64> = (7..=10).map(|k| 1u64 << k).collect();
    let params = SimParams::new(n_grid.clone(), 20_000, 9);
    let cfg = SimConfig::map(
        MapSpec::lsv(gamma),
        Observable::from(ObservableKind::Indicator { lo: 0.5, hi: 1.0 }),
        params,
    );
    let sim = simulate(&cfg)?;
    let x = 0.08;
    println!("x = {x}, critical moment {ld_p}");
    for &n in &n_grid {
        let row = sim.tail(x, n)?;
        let inputs = BoundInputs::new(AlphaModel::power_law(1.0, gamma), QuantileModel::constant(1.0), n, 3.5);
        let shape = large_deviation_bound(&inputs, x, LdVariant::Wb)?.total;
        println!("n = {n:>5}  tail = {:.3e} ± {:.1e}  WB shape = {shape:.3e}  flags {:?}", row.estimate, row.stderr, row.flags);
    }
    Ok(())
}
