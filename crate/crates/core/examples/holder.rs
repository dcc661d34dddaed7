//! Hölder norms of the Donsker path: quantiles should stabilise in n when
//! beta is below the predicted exponent.

use alphadep::bounds::regime_predict;
use alphadep::dynamics::MapSpec;
use alphadep::montecarlo::{simulate, SimConfig, SimParams};
use alphadep::observables::{Observable, ObservableKind};

fn main() -> alphadep::Result<()> {
    let gamma = 0.25;
    let delta = regime_predict(gamma, 0.0, 2.0)?.holder_delta;
    println!("predicted Hölder exponent: {delta:?}");
    for beta in [0.1, 0.2] {
        let mut params = SimParams::new(vec![1 << 10, 1 << 12], 500, 3);
        params.holder_beta = Some(beta);
        let cfg = SimConfig::map(
            MapSpec::lsv(gamma),
            Observable::from(ObservableKind::Indicator { lo: 0.5, hi: 1.0 }),
            params,
        );
        let sim = simulate(&cfg)?;
        for row in sim.holder_quantile(0.95, delta)? {
            println!("beta = {beta}  n = {:>5}  q95 = {:.4} ± {:.4}  flags {:?}", row.n, row.estimate, row.stderr, row.flags);
        }
    }
    Ok(())
}
