//! Realize a Melnikov function with prescribed zeros, then look for the
//! corresponding limit cycles by simulating the perturbed pendulum.
//!
//! ```bash
//! cargo run --release --example limit_cycles
//! ```

use melkit::sim::{find_cycles, melnikov_agreement, SimOptions, SystemSpec};
use melkit::zeros::{geometric_grid, realize_zeros, BoundQuery, RealizeOptions};

fn main() -> melkit::Result<()> {
    let opts = SimOptions::default();

    let one = realize_zeros(&BoundQuery::Smooth { n: 0, m: 2 }, &[0.05], &RealizeOptions::default())?;
    let spec = SystemSpec::new(1e-4, one.perturbation()?)?;
    let (lo, hi) = one.validation_interval;
    let cycles = find_cycles(&spec, lo, hi, 64, &opts)?;
    println!("one designed zero at h = 0.05, epsilon = 1e-4");
    for c in &cycles.cycles {
        println!("  cycle at h* = {:.6} (stability {:+})", c.h_star, c.stability);
    }

    let three = realize_zeros(
        &BoundQuery::Smooth { n: 1, m: 2 },
        &[0.02, 0.06, 0.12],
        &RealizeOptions::default(),
    )?;
    let p = three.perturbation()?;
    let (lo, hi) = three.validation_interval;
    let hs = geometric_grid(lo, hi, 64);
    println!("three designed zeros at 0.02, 0.06, 0.12");
    for eps in [1e-3, 5e-4] {
        let report = melnikov_agreement(&SystemSpec::new(eps, p.clone())?, &hs, &opts)?;
        println!(
            "  epsilon = {eps:e}: max |d/eps - M| = {:.3e}, signs agree: {}",
            report.max_deviation, report.sign_pattern_agrees
        );
    }
    Ok(())
}
