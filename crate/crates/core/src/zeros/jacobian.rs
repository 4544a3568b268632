use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::params::LadderParams;
use crate::error::{Error, Result};
use crate::exact::{int, Rational};
use crate::linalg::Matrix;
use crate::melnikov::{series_of, Family, Ladder, Term};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JacobianReport {
    pub schema_version: u32,
    pub family: Family,
    pub ladder: Ladder,
    /// Free parameter elements, in column order.
    pub parameters: Vec<String>,
    /// Half-exponents of the rows.
    pub exponents: Vec<i64>,
    #[serde(with = "crate::linalg::matrix_strings")]
    pub matrix: Matrix,
    pub rank: usize,
    pub expected_rank: usize,
    /// Every entry above the diagonal is zero.
    pub lower_triangular: bool,
    /// The head columns are lower triangular and the tail columns vanish on
    /// the head rows; the tail block is the D-matrix.
    pub block_lower_triangular: bool,
    pub diagonal_nonzero: bool,
    /// Random inputs in the kernel of `∂B/∂(inputs)` that were checked.
    pub vanishing_trials: usize,
    /// Every such input gave an identically zero series.
    pub vanishing_holds: bool,
    /// Integer steps of the series checked for vanishing.
    pub vanishing_order: usize,
}

/// Jacobian of the controlled coefficients with respect to the free
/// parameters of one ladder, plus the vanishing check: inputs that zero
/// every controlled coefficient make the whole series vanish.
pub fn jacobian_rank(family: Family, ladder: Ladder, seed: u64) -> Result<JacobianReport> {
    if ladder.blocks == 0 {
        return Err(Error::InvalidArgument("ladder needs at least one block".to_string()));
    }
    let params = LadderParams::new(family, ladder)?;
    let matrix = params.jacobian();
    let size = matrix.rows();
    let head = if ladder.n == 0 { size } else { (ladder.n + ladder.blocks) as usize };
    let mut lower = true;
    let mut block_lower = true;
    for r in 0..size {
        for c in (r + 1)..size {
            let zero = matrix.get(r, c).is_zero();
            lower &= zero;
            if r < head {
                block_lower &= zero;
            }
        }
    }
    let diagonal_nonzero = (0..head).all(|k| !matrix.get(k, k).is_zero());
    let rank = matrix.rank();

    // Vanishing: kernel of the input Jacobian.
    let input_jac = params.matrix_over(&params.inputs, &params.exponents);
    let kernel = input_jac.nullspace();
    let order = size + 10;
    let base = ladder.base_half_exponent();
    let end = base + 2 * order as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trials = if kernel.is_empty() { 1 } else { 5 };
    let mut holds = true;
    for _ in 0..trials {
        let mut v = vec![Rational::zero(); params.inputs.len()];
        for basis in &kernel {
            let w = int(rng.gen_range(-9..=9)) / int(rng.gen_range(1..=7));
            for (a, b) in v.iter_mut().zip(basis) {
                *a += &w * b;
            }
        }
        let terms: Vec<Term> = params
            .inputs
            .iter()
            .zip(v)
            .map(|(e, c)| Term { element: *e, coeff: c })
            .collect();
        holds &= series_of(&terms, base, end).is_zero();
    }

    Ok(JacobianReport {
        schema_version: crate::SCHEMA_VERSION,
        family,
        ladder,
        parameters: params.elements.iter().map(|e| e.to_string()).collect(),
        exponents: params.exponents.clone(),
        matrix,
        rank,
        expected_rank: ladder.free_count(),
        lower_triangular: lower,
        block_lower_triangular: block_lower,
        diagonal_nonzero,
        vanishing_trials: trials,
        vanishing_holds: holds,
        vanishing_order: order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangular_cases() {
        let r = jacobian_rank(Family::Smooth, Ladder::odd(2, 0, 1), 1).unwrap();
        assert_eq!((r.rows(), r.rank), (3, 3));
        assert!(r.lower_triangular && r.diagonal_nonzero && r.vanishing_holds);
        let r = jacobian_rank(Family::Smooth, Ladder::odd(1, 0, 2), 1).unwrap();
        assert_eq!(r.rank, 4);
        assert!(r.lower_triangular && r.diagonal_nonzero && r.vanishing_holds);
        let r = jacobian_rank(Family::Piecewise, Ladder::even(1, 1, 1), 1).unwrap();
        assert_eq!(r.rank, 2);
        assert!(r.lower_triangular);
    }

    #[test]
    fn three_blocks_are_block_triangular() {
        let r = jacobian_rank(Family::Smooth, Ladder::odd(1, 0, 3), 7).unwrap();
        assert_eq!(r.rank, r.expected_rank);
        assert!(r.block_lower_triangular && !r.lower_triangular);
        assert!(r.vanishing_holds);
        let r = jacobian_rank(Family::Smooth, Ladder::odd(0, 1, 3), 7).unwrap();
        assert_eq!(r.rank, 3);
        assert!(r.lower_triangular);
    }

    impl JacobianReport {
        fn rows(&self) -> usize {
            self.matrix.rows()
        }
    }
}
