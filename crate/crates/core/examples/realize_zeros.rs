//! Construct perturbations that reach the zero bound, with the zeros placed
//! where we ask, and print the resulting perturbation JSON.
//!
//! ```bash
//! cargo run --release --example realize_zeros
//! ```

use melkit::zeros::{describe, realize_zeros, BoundQuery, RealizeOptions};

fn main() -> melkit::Result<()> {
    let cases = [
        (BoundQuery::Smooth { n: 1, m: 2 }, vec![0.02, 0.06, 0.12]),
        (BoundQuery::Smooth { n: 0, m: 3 }, vec![0.04, 0.12]),
        (BoundQuery::Piecewise { n: 1, s1: 1, s_hat: 2 }, vec![0.02, 0.06, 0.12]),
    ];
    for (query, locations) in cases {
        let r = realize_zeros(&query, &locations, &RealizeOptions::default())?;
        println!("{query:?} via {:?}", r.method);
        for line in describe(&r.parameters) {
            println!("  {line}");
        }
        let found: Vec<String> = r.zeros.iter().map(|b| format!("{:.6}", b.mid())).collect();
        println!("  zeros at {}", found.join(", "));
        println!("  {}", serde_json::to_string(&r.perturbation)?);
    }
    Ok(())
}
