//! One turn of the Poincaré map of the damped pendulum, and a trajectory
//! written as CSV.
//!
//! ```bash
//! cargo run --release --example return_map > trajectory.csv
//! ```

use melkit::melnikov::Perturbation;
use melkit::quadrature::quad_I;
use melkit::sim::{integrate, return_map, SimOptions, SystemSpec};

fn main() -> melkit::Result<()> {
    let damping = Perturbation::from_json(r#"{"kind":"smooth","n":0,"s1":1,"s2":1,"a":[["-1"]]}"#)?;
    let spec = SystemSpec::new(1e-3, damping)?;
    let opts = SimOptions::default();
    for h in [0.1, 0.5, 1.0] {
        let r = return_map(&spec, h, &opts)?;
        let area = quad_I(0, 1, h, 1e-13)?.value;
        eprintln!("h = {h}: d/eps = {:.8}, -area = {:.8}, period {:.6}", r.displacement_per_epsilon, -area, r.flight_time);
    }
    let traj = integrate(&spec, 0.0, 1.0, 30.0, &opts)?;
    print!("{}", traj.to_csv());
    Ok(())
}
