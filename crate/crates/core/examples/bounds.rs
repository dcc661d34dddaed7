//! Evaluate the deviation, Rosenthal and large-deviation bounds for a
//! power-law coefficient sequence and a singular quantile function.

use alphadep::bounds::{deviation_bound, large_deviation_bound, rosenthal_bound, BoundInputs, LdVariant};
use alphadep::coefficients::AlphaModel;
use alphadep::observables::QuantileModel;

fn main() -> alphadep::Result<()> {
    let alpha = AlphaModel::power_law(1.0, 0.25);
    let q = QuantileModel::power_law(1.0, 0.1);
    println!("{:>6} {:>14} {:>14} {:>14}", "n", "rosenthal", "deviation", "LD (WB)");
    for n in [100u64, 1_000, 10_000, 100_000] {
        let inputs = BoundInputs::new(alpha.clone(), q.clone(), n, 3.0);
        let ros = rosenthal_bound(&inputs)?;
        let x = 0.1 * n as f64;
        let dev = deviation_bound(&inputs, x, false)?;
        let ld = large_deviation_bound(&inputs, 0.1, LdVariant::Wb)?;
        println!("{n:>6} {:>14.6e} {:>14.6e} {:>14.6e}", ros.total, dev.total, ld.total);
    }
    let detail = deviation_bound(&BoundInputs::new(alpha, q, 1_000, 3.0), 100.0, false)?;
    println!("\nterms at n = 1000, x = 100:");
    for (name, value) in &detail.terms {
        println!("  {name:<18} {value:.6e}");
    }
    for (name, value) in &detail.diagnostics {
        println!("  {name:<18} {value:.6e}");
    }
    Ok(())
}
