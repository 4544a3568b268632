//! The chain identities that rewrite high indices in terms of low ones,
//! checked exactly on the series and numerically by quadrature.
//!
//! ```bash
//! cargo run --example identities
//! ```

use melkit::exact::format_rational;
use melkit::melnikov::{rewrite_I, rewrite_J};

fn main() -> melkit::Result<()> {
    let rel = rewrite_I(0, 0, 2);
    print!("{} =", rel.lhs);
    for t in &rel.rhs {
        print!(" + ({}) {}", format_rational(&t.coeff), t.element);
    }
    println!();
    println!("  series residual through h^12 is zero: {}", rel.series_residual(12).is_zero());
    println!("  relative quadrature residual at h = 0.7: {:.2e}", rel.quad_residual(0.7, 1e-13)?.relative);

    let rel = rewrite_J(1, 1, 1)?;
    println!("{}: series residual zero: {}", rel.lhs, rel.series_residual(12).is_zero());
    Ok(())
}
