//! Exact half-power series of the basis integrals.
//!
//! ```bash
//! cargo run --example exact_series
//! ```

use melkit::melnikov::BasisTerm;

fn main() {
    // The area of the level curve, 2πh + πh²/8 + ...
    let area = BasisTerm::i(0, 1);
    println!("{area} = {}", area.series(2, 8));

    // Even powers of y live on the √2 half-grid.
    let j = BasisTerm::j(0, 2);
    let base = j.leading_half_exponent().unwrap();
    println!("{j} = {}", j.series(base, base + 6));

    for t in [BasisTerm::l(1, 1), BasisTerm::l_tilde(1, 1)] {
        let base = t.leading_half_exponent().unwrap();
        let s = t.series(base, base + 4);
        let (e, c) = s.leading_term().unwrap();
        println!("{t}: leading h^({e}/2) coefficient {c} ~ {:.6}", c.to_f64());
    }
}
