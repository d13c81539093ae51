// Read time off a single n-level clock with the canonical covariant
// measurement, then do the same jointly on the synchronized pair.  The
// likelihood of outcome k given true time t is a Fejer kernel, so the
// pointer sharpens like 1/n; the joint standard deviation of the
// synchronism beats the uniform-guess baseline T/sqrt(12) accordingly.

use synclab::clock::{default_povm_points, time_likelihood, CovariantPovm, QuantumClock};
use synclab::sync::Synchronism;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // single clock, n = 4: likelihood profile around the true time
    let n = 4;
    let clock = QuantumClock::nlevel(n)?;
    let povm = CovariantPovm::canonical(&clock, default_povm_points(n))?;
    let true_t = 0.0;
    println!("single {n}-level clock, {} outcomes, true time 0:", povm.len());
    for k in 0..povm.len() {
        let p = time_likelihood(&clock, &povm, true_t, k)?;
        if p > 5e-3 {
            let bar = "#".repeat((400.0 * p).round() as usize);
            println!("  t_{k:>2} = {:>6.3}  p = {p:.4}  {bar}", povm.times()[k]);
        }
    }

    // synchronized pair: timing accuracy vs clock size
    println!("\njoint reading of the synchronized pair:");
    println!("{:>3} {:>12} {:>12} {:>8}", "n", "dt", "T/sqrt(12)", "ratio");
    for n in 2..=10 {
        let sync = Synchronism::two_clock(n)?;
        let clock = QuantumClock::nlevel(n)?;
        let povm = CovariantPovm::canonical(&clock, default_povm_points(n))?;
        let dt = sync.standard_time_deviation(&povm, &povm)?;
        let uniform = sync.period() / 12f64.sqrt();
        println!("{n:>3} {dt:>12.6} {uniform:>12.6} {:>8.4}", dt / uniform);
    }
    Ok(())
}
