//! Exact rank of the coefficient matrices `D_{m-1}` that decide whether the
//! tail coefficients can be chosen freely.
//!
//! Entry `(k, i-1)` of `D_{m-1}` is `b^k_{n+i, r+m-i}` (smooth) or
//! `c^k_{n+i, r̃+l-i}` (piecewise). Pulling out row and column factors
//! leaves `D̃[t][c] = Π_{κ=n}^{n+t-1} (κ + 3/2 + c)`, whose rank follows from
//! the row recursion `D̃_{s}(n) → D̃_{s-1}(n+1)`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{b_coeff, c_coeff, int, rat, Irrational, Rational};
use crate::linalg::{Matrix, PivotStep};
use crate::melnikov::Family;

/// One level of the row recursion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecursionStep {
    pub n: u32,
    pub size: usize,
    #[serde(with = "crate::linalg::matrix_strings")]
    pub matrix: Matrix,
    /// After the row operations and column scaling the lower-right block
    /// equals the next level exactly and the first column is `e_0`.
    pub reduces_exactly: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub schema_version: u32,
    pub family: Family,
    pub n: u32,
    /// `m` (smooth) or `l` (piecewise).
    pub blocks: u32,
    /// `r` (smooth) or `r̃` (piecewise).
    pub r: u32,
    pub rows: usize,
    pub cols: usize,
    /// `D_{m-1}` with the common π or √2 factor removed.
    #[serde(with = "crate::linalg::matrix_strings")]
    pub matrix: Matrix,
    pub rank: usize,
    pub expected_rank: usize,
    pub pivots: Vec<PivotStep>,
    /// `D = diag(row factors) · D̃ · diag(column factors)`.
    pub factorizes: bool,
    pub recursion: Vec<RecursionStep>,
    pub recursion_rank: usize,
    pub matches: bool,
}

/// `D̃_{size}(n)`.
pub fn d_tilde(n: u32, size: usize) -> Matrix {
    let mut m = Matrix::zeros(size, size);
    for c in 0..size {
        let mut v = int(1);
        for t in 0..size {
            m.set(t, c, v.clone());
            v *= rat(2 * (n as i64 + t as i64 + c as i64) + 3, 2);
        }
    }
    m
}

/// Applies one recursion step; returns the next matrix and whether it
/// matched `D̃_{size-1}(n+1)` exactly.
fn reduce_step(n: u32, d: &Matrix) -> (Matrix, bool) {
    let size = d.rows();
    let mut rows: Vec<Vec<Rational>> = d.as_rows().to_vec();
    // Bottom-up, so each step uses an untouched row above it.
    for t in (0..size - 1).rev() {
        let factor = rat(2 * (n as i64 + t as i64) + 3, 2);
        for c in 0..size {
            let v = &rows[t + 1][c] - &factor * &rows[t][c];
            rows[t + 1][c] = v;
        }
    }
    let first_column_ok = (0..size).all(|t| rows[t][0] == if t == 0 { int(1) } else { int(0) });
    let mut next = Matrix::zeros(size - 1, size - 1);
    for t in 1..size {
        for c in 1..size {
            next.set(t - 1, c - 1, &rows[t][c] / int(c as i64));
        }
    }
    let exact = first_column_ok && next == d_tilde(n + 1, size - 1);
    (next, exact)
}

fn recursion(n: u32, size: usize) -> (Vec<RecursionStep>, usize) {
    let mut steps = Vec::new();
    let mut level_n = n;
    let mut current = d_tilde(n, size);
    let mut peeled = 0;
    while current.rows() > 2 {
        let (next, exact) = reduce_step(level_n, &current);
        steps.push(RecursionStep {
            n: level_n,
            size: current.rows(),
            matrix: current,
            reduces_exactly: exact,
        });
        if !exact {
            return (steps, 0);
        }
        peeled += 1;
        level_n += 1;
        current = next;
    }
    let base_rank = current.rank();
    steps.push(RecursionStep {
        n: level_n,
        size: current.rows(),
        matrix: current,
        reduces_exactly: true,
    });
    (steps, peeled + base_rank)
}

/// Whether `d[k][c] / d̃[k][c]` has the form `R_k · C_c`.
fn factorizes(d: &Matrix, dt: &Matrix) -> bool {
    let size = d.rows();
    let mut q = vec![vec![Rational::zero(); size]; size];
    for k in 0..size {
        for c in 0..size {
            if d.get(k, c).is_zero() || dt.get(k, c).is_zero() {
                return false;
            }
            q[k][c] = d.get(k, c) / dt.get(k, c);
        }
    }
    (0..size).all(|k| (0..size).all(|c| &q[k][c] * &q[0][0] == &q[k][0] * &q[0][c]))
}

fn report(family: Family, n: u32, blocks: u32, r: u32, d: Matrix) -> RankReport {
    let size = d.rows();
    let (rank, pivots) = d.bareiss_rank();
    let (steps, recursion_rank) = recursion(n, size);
    let fact = factorizes(&d, &d_tilde(n, size));
    let expected = (blocks - 1) as usize;
    RankReport {
        schema_version: crate::SCHEMA_VERSION,
        family,
        n,
        blocks,
        r,
        rows: size,
        cols: d.cols(),
        matrix: d,
        rank,
        expected_rank: expected,
        pivots,
        factorizes: fact,
        recursion: steps,
        recursion_rank,
        matches: rank == expected && recursion_rank == expected && fact,
    }
}

fn check(n: u32, blocks: u32) -> Result<()> {
    if blocks < 2 || n < 1 {
        return Err(Error::InvalidArgument(format!(
            "D-matrix needs n >= 1 and at least two blocks (got n = {n}, {blocks})"
        )));
    }
    Ok(())
}

/// Rank of `D_{m-1}` built from `b^k_{n+i, r+m-i}`.
#[allow(non_snake_case)]
pub fn rank_D_smooth(n: u32, m: u32, r: u32) -> Result<RankReport> {
    check(n, m)?;
    let size = (m - 1) as usize;
    let mut d = Matrix::zeros(size, size);
    for k in 0..size {
        for i in 1..m {
            let v = b_coeff(n + i, r + m - i, k as u32);
            d.set(k, (i - 1) as usize, v.part(Irrational::Pi).clone());
        }
    }
    Ok(report(Family::Smooth, n, m, r, d))
}

/// Rank of `D_{l-1}` built from `c^k_{n+i, r̃+l-i}`.
#[allow(non_snake_case)]
pub fn rank_D_piecewise(n: u32, l: u32, r_tilde: u32) -> Result<RankReport> {
    check(n, l)?;
    if r_tilde < 1 {
        return Err(Error::InvalidArgument("r̃ must be >= 1".to_string()));
    }
    let size = (l - 1) as usize;
    let mut d = Matrix::zeros(size, size);
    for k in 0..size {
        for i in 1..l {
            let v = c_coeff(n + i, r_tilde + l - i, k as u32)?;
            d.set(k, (i - 1) as usize, v.part(Irrational::Sqrt2).clone());
        }
    }
    Ok(report(Family::Piecewise, n, l, r_tilde, d))
}
