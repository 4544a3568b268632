//! Exact linear algebra over the rationals: fraction-free (Bareiss) rank,
//! Gauss–Jordan nullspace and solves. Matrices here are small (tens of
//! rows), so dense `Vec<Vec<_>>` storage is all we need.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<Rational>>,
}

/// One pivot of a fraction-free elimination.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PivotStep {
    pub row: usize,
    pub col: usize,
    /// Pivot value in the integer-scaled matrix.
    pub pivot: String,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![vec![Rational::zero(); cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = Rational::one();
        }
        m
    }

    /// Panics when the rows are ragged.
    pub fn from_rows(data: Vec<Vec<Rational>>) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, Vec::len);
        assert!(data.iter().all(|r| r.len() == cols), "ragged matrix rows");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Rational) {
        self.data[r][c] = value;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r]
    }

    pub fn as_rows(&self) -> &[Vec<Rational>] {
        &self.data
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.data
            .iter()
            .map(|row| row.iter().map(format_rational).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c][r] = self.data[r][c].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[r][k];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r][c] += a * &other.data[k][c];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        self.data
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Sub-matrix of the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|&r| cols.iter().map(|&c| self.data[r][c].clone()).collect())
                .collect(),
        )
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|r| ((r + 1)..self.cols).all(|c| self.data[r][c].is_zero()))
    }

    /// Row-wise denominators cleared: each row multiplied by the lcm of its
    /// denominators and divided by the gcd of the resulting numerators.
    pub fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        self.data
            .iter()
            .map(|row| {
                let lcm = row
                    .iter()
                    .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
                let ints: Vec<BigInt> = row
                    .iter()
                    .map(|v| (v * Rational::from_integer(lcm.clone())).to_integer())
                    .collect();
                let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
                if g.is_zero() || g.is_one() {
                    ints
                } else {
                    ints.into_iter().map(|v| v / &g).collect()
                }
            })
            .collect()
    }

    /// Rank by fraction-free Gaussian elimination on the integer-scaled
    /// rows, with the list of pivots taken.
    pub fn bareiss_rank(&self) -> (usize, Vec<PivotStep>) {
        let mut a = self.integer_rows();
        let (rows, cols) = (self.rows, self.cols);
        let mut prev = BigInt::one();
        let mut rank = 0;
        let mut trace = Vec::new();
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            trace.push(PivotStep {
                row: rank,
                col,
                pivot: a[rank][col].to_string(),
            });
            for r in (rank + 1)..rows {
                for c in (col + 1)..cols {
                    let v = &a[rank][col] * &a[r][c] - &a[r][col] * &a[rank][c];
                    // exact by Sylvester's identity
                    a[r][c] = v / &prev;
                }
                a[r][col] = BigInt::zero();
            }
            prev = a[rank][col].clone();
            rank += 1;
        }
        (rank, trace)
    }

    pub fn rank(&self) -> usize {
        self.bareiss_rank().0
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for col in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(p) = (lead..m.rows).find(|&r| !m.data[r][col].is_zero()) else {
                continue;
            };
            m.data.swap(lead, p);
            let inv = m.data[lead][col].recip();
            for v in m.data[lead].iter_mut() {
                *v *= &inv;
            }
            for r in 0..m.rows {
                if r != lead && !m.data[r][col].is_zero() {
                    let factor = m.data[r][col].clone();
                    for c in 0..m.cols {
                        let delta = &factor * &m.data[lead][c];
                        m.data[r][c] -= delta;
                    }
                }
            }
            pivots.push(col);
            lead += 1;
        }
        (m, pivots)
    }

    /// Basis of `{x : A x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![Rational::zero(); self.cols];
                x[f] = Rational::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    x[pc] = -r.data[row][f].clone();
                }
                x
            })
            .collect()
    }

    /// Unique solution of a square nonsingular system.
    pub fn solve(&self, rhs: &[Rational]) -> Option<Vec<Rational>> {
        if self.rows != self.cols || rhs.len() != self.rows {
            return None;
        }
        let mut aug = self.clone();
        for (row, b) in aug.data.iter_mut().zip(rhs) {
            row.push(b.clone());
        }
        aug.cols += 1;
        let (r, pivots) = aug.rref();
        if pivots.len() != self.rows || pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        Some((0..self.rows).map(|i| r.data[i][self.cols].clone()).collect())
    }

    /// Some `x` with `A x = b` for a full-row-rank `A`, using only a set of
    /// pivot columns (the remaining unknowns are zero).
    pub fn right_solve(&self, rhs: &[Rational]) -> Option<Vec<Rational>> {
        let (_, pivots) = self.rref();
        if pivots.len() != self.rows {
            return None;
        }
        let all_rows: Vec<usize> = (0..self.rows).collect();
        let square = self.select(&all_rows, &pivots);
        let y = square.solve(rhs)?;
        let mut x = vec![Rational::zero(); self.cols];
        for (value, &c) in y.into_iter().zip(&pivots) {
            x[c] = value;
        }
        Some(x)
    }
}

/// Solve a small dense real system by partial pivoting; `None` if singular.
pub fn solve_f64(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() == 0.0 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in (col + 1)..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = ((r + 1)..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    #[test]
    fn rank_of_simple_matrices() {
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(m(&[&[0, 1], &[1, 0]]).rank(), 2);
        assert_eq!(m(&[&[0, 0], &[0, 0]]).rank(), 0);
        assert_eq!(m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]).rank(), 2);
        let half = Matrix::from_rows(vec![vec![rat(1, 2), rat(1, 3)], vec![rat(1, 4), rat(1, 6)]]);
        assert_eq!(half.rank(), 1);
    }

    #[test]
    fn nullspace_and_solve() {
        let a = m(&[&[1, 2, 3], &[4, 5, 6]]);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(a.mul_vec(&ns[0]).iter().all(Zero::is_zero));
        let sq = m(&[&[2, 1], &[1, 3]]);
        let x = sq.solve(&[int(3), int(5)]).unwrap();
        assert_eq!(x, vec![rat(4, 5), rat(7, 5)]);
        assert!(m(&[&[1, 2], &[2, 4]]).solve(&[int(1), int(1)]).is_none());
        let y = a.right_solve(&[int(1), int(1)]).unwrap();
        assert_eq!(a.mul_vec(&y), vec![int(1), int(1)]);
    }

    #[test]
    fn solve_f64_small() {
        let x = solve_f64(vec![vec![2.0, 1.0], vec![1.0, 3.0]], vec![3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
    }

    proptest! {
        // Bareiss agrees with Gauss–Jordan, and rank + nullity = columns.
        #[test]
        fn rank_nullity(entries in prop::collection::vec(-3i64..4, 12), rows in 1usize..4) {
            let cols = 12 / rows.max(1);
            let cols = cols.min(5);
            let data: Vec<Vec<Rational>> = (0..rows)
                .map(|r| (0..cols).map(|c| rat(entries[(r * cols + c) % 12], 1 + (c as i64 % 2))).collect())
                .collect();
            let a = Matrix::from_rows(data);
            let (_, pivots) = a.rref();
            prop_assert_eq!(a.rank(), pivots.len());
            prop_assert_eq!(a.rank() + a.nullspace().len(), cols);
        }
    }
}

/// Serde adapter storing a matrix as rows of `"p/q"` strings.
pub mod matrix_strings {
    use super::Matrix;
    use serde::{Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &Matrix, s: S) -> Result<S::Ok, S::Error> {
        m.to_strings().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Matrix, D::Error> {
        let rows = crate::exact::rational_table::deserialize(d)?;
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        Ok(Matrix::from_rows(rows))
    }
}
