//! Exact rank of the tail matrix and of the parameter Jacobian.
//!
//! ```bash
//! cargo run --example rank_check
//! ```

use melkit::melnikov::{Family, Ladder};
use melkit::zeros::{jacobian_rank, rank_D_piecewise, rank_D_smooth};

fn main() -> melkit::Result<()> {
    for (n, m) in [(1, 2), (1, 3), (2, 4)] {
        let d = rank_D_smooth(n, m, 0)?;
        println!("smooth n={n} m={m}: rank {} expected {} factorizes {}", d.rank, d.expected_rank, d.factorizes);
    }
    let d = rank_D_piecewise(2, 3, 1)?;
    println!("piecewise n=2 l=3: rank {} expected {}", d.rank, d.expected_rank);

    let jac = jacobian_rank(Family::Smooth, Ladder::odd(1, 0, 3), 42)?;
    println!(
        "Jacobian {}x{}: rank {}, block lower triangular {}, vanishing {}",
        jac.matrix.rows(),
        jac.matrix.cols(),
        jac.rank,
        jac.block_lower_triangular,
        jac.vanishing_holds
    );
    Ok(())
}
