//! Count sign changes of M(h) for a perturbation read from JSON.
//!
//! ```bash
//! cargo run --release --example count_zeros -- examples/data/damping.json
//! ```

use melkit::melnikov::Perturbation;
use melkit::quadrature::quad_melnikov;
use melkit::zeros::count_sign_changes;

const DEFAULT: &str = r#"{"kind":"smooth","n":1,"s1":1,"s2":1,"a":[["-3"],["4"]]}"#;

fn main() -> melkit::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => DEFAULT.to_string(),
    };
    let p = Perturbation::from_json(&text)?;
    let report = count_sign_changes(|h| quad_melnikov(&p, h, 1e-13), 1e-3, 1.5, 64)?;
    println!("{} sign changes (clean: {})", report.count, report.is_clean());
    for b in &report.brackets {
        println!("  h in [{:.10}, {:.10}]", b.lo, b.hi);
    }
    Ok(())
}
