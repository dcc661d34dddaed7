//! Fit the growth exponent of E max|S_k|^p for an indicator observable and
//! compare it with the predicted regime.

use alphadep::bounds::regime_predict;
use alphadep::dynamics::MapSpec;
use alphadep::montecarlo::{scaling_fit, simulate, SimConfig, SimParams};
use alphadep::observables::{Observable, ObservableKind};

fn main() -> alphadep::Result<()> {
    let gamma = 0.25;
    let mut params = SimParams::new((9..=13).map(|k| 1u64 << k).collect(), 1000, 7);
    params.p_list = vec![2.0, 3.0];
    let cfg = SimConfig::map(
        MapSpec::lsv(gamma),
        Observable::from(ObservableKind::Indicator { lo: 0.5, hi: 1.0 }),
        params,
    );
    let sim = simulate(&cfg)?;
    for p in [2.0, 3.0] {
        for row in sim.moments(p) {
            println!("p = {p}  n = {:>5}  moment = {:>12.4} ± {:.4}", row.n, row.estimate, row.stderr);
        }
        let fit = scaling_fit(&sim.moment_points(p), false)?;
        let predicted = regime_predict(gamma, 0.0, p)?;
        println!(
            "p = {p}: fitted exponent {:.3} ± {:.3}, predicted {:.3}\n",
            fit.exponent, fit.stderr, predicted.moment_exponent
        );
    }
    Ok(())
}
