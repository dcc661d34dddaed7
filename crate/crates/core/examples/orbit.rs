//! Generate an LSV orbit and print a coarse histogram of its occupation measure.

use alphadep::dynamics::{generate_orbit, MapSpec, OrbitConfig};

fn main() -> alphadep::Result<()> {
    let spec = MapSpec::lsv(0.25);
    let orbit = generate_orbit(&OrbitConfig::sampled(1_000_000, 42, 0), &spec)?;
    let bins = 10;
    let mut counts = vec![0usize; bins];
    for &x in &orbit {
        counts[((x * bins as f64) as usize).min(bins - 1)] += 1;
    }
    println!("occupation of [k/10, (k+1)/10) along 10^6 steps, gamma = 0.25");
    for (k, c) in counts.iter().enumerate() {
        let share = *c as f64 / orbit.len() as f64;
        println!("{:.1}-{:.1}  {:.4}  {}", k as f64 / 10.0, (k + 1) as f64 / 10.0, share, "#".repeat((share * 200.0) as usize));
    }
    Ok(())
}
