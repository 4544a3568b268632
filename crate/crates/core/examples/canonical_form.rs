//! Reduce the Melnikov function of a perturbation to its canonical form and
//! print the linear map from input coefficients to canonical coefficients.
//!
//! ```bash
//! cargo run --example canonical_form
//! ```

use melkit::exact::format_rational;
use melkit::melnikov::{reduce_to_canonical, Perturbation};

const INPUT: &str = r#"{
  "kind": "smooth", "n": 1, "s1": 1, "s2": 3,
  "a": [["1", "0", "1/2"], ["-3", "0", "2"]]
}"#;

fn main() -> melkit::Result<()> {
    let combination = Perturbation::from_json(INPUT)?.assemble();
    println!("M(h) = {}", combination.expand(4).series().unwrap());

    let form = reduce_to_canonical(&combination)?;
    for ladder in &form.ladders {
        println!("inputs: {:?}", ladder.inputs.iter().map(ToString::to_string).collect::<Vec<_>>());
        for row in ladder.map.to_strings() {
            println!("  [{}]", row.join(", "));
        }
        for t in ladder.terms() {
            println!("  {} * {}", format_rational(&t.coeff), t.element);
        }
    }
    let base = combination.params.base_half_exponent();
    let same = form.series_window(base, base + 20) == combination.series_window(base, base + 20);
    println!("canonical series equals the original: {same}");
    Ok(())
}
