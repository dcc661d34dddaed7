//! Tabulate predicted regimes and moment conditions over a small parameter grid.

use alphadep::bounds::{check_conditions, regime_predict, Condition};
use alphadep::coefficients::AlphaModel;
use alphadep::observables::QuantileModel;

fn main() -> alphadep::Result<()> {
    println!("gamma     b     p  exponent  log  delta     ld_p   WM    SM    DMR");
    for gamma in [0.1, 0.25, 0.4] {
        for b in [0.0, 0.2] {
            for p in [1.5, 2.0, 4.0] {
                let r = regime_predict(gamma, b, p)?;
                let alpha = AlphaModel::power_law(1.0, gamma);
                let q = QuantileModel::power_law(1.0, b);
                let holds = |c| check_conditions(&alpha, &q, p, c).map(|r| r.holds);
                println!(
                    "{gamma:5.2} {b:5.2} {p:5.1} {:9.4}  {:<4} {:<9} {:5.2}  {:<5} {:<5} {}",
                    r.moment_exponent,
                    if r.log_factor { "yes" } else { "no" },
                    r.holder_delta.map_or("none".into(), |d| format!("{d:.3}")),
                    r.ld_p,
                    holds(Condition::Wm)?,
                    holds(Condition::Sm)?,
                    holds(Condition::Dmr)?,
                );
            }
        }
    }
    Ok(())
}
