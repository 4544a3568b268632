//! Cross-check the exact series against adaptive Gauss-Legendre quadrature.
//!
//! Near the center the truncated series and the quadrature agree to the
//! truncation error; towards the separatrix the series degrades.
//!
//! ```bash
//! cargo run --release --example quadrature_oracle
//! ```

use melkit::melnikov::BasisTerm;
use melkit::quadrature::quad_I;

fn main() -> melkit::Result<()> {
    let term = BasisTerm::i(1, 3);
    let base = term.leading_half_exponent().unwrap();
    let series = term.series(base, base + 40);
    println!("{:>6} {:>22} {:>22} {:>10}", "h", "quadrature", "series (20 terms)", "rel diff");
    for h in [0.01, 0.1, 0.5, 1.0, 1.5] {
        let q = quad_I(1, 3, h, 1e-13)?;
        let s = series.eval_f64(h);
        println!("{h:>6} {:>22.15e} {s:>22.15e} {:>10.2e}", q.value, (q.value - s).abs() / q.value.abs());
    }
    Ok(())
}
