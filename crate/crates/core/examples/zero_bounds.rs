//! Maximum number of small-amplitude limit cycles for each family.
//!
//! ```bash
//! cargo run --example zero_bounds
//! ```

use melkit::zeros::{max_zero_bound, BoundQuery};

fn main() -> melkit::Result<()> {
    println!("smooth");
    for n in 0..4 {
        let row: Vec<String> = (1..5)
            .map(|m| max_zero_bound(&BoundQuery::Smooth { n, m }).map(|b| format!("{b:>3}")))
            .collect::<melkit::Result<_>>()?;
        println!("  n={n}: {}", row.join(" "));
    }
    println!("piecewise (s1 = 1)");
    for n in 0..4 {
        let row: Vec<String> = (1..5)
            .map(|s_hat| max_zero_bound(&BoundQuery::Piecewise { n, s1: 1, s_hat }).map(|b| format!("{b:>3}")))
            .collect::<melkit::Result<_>>()?;
        println!("  n={n}: {}", row.join(" "));
    }
    Ok(())
}
