//! Closed forms for the Gamma-ratio coefficients of the I- and J-integral
//! expansions. Half-integer Gamma values are reduced to double factorials,
//! so nothing here touches floating point.

use num_bigint::BigInt;
use num_traits::One;

use super::{ExactCoeff, Rational};
use crate::error::{Error, Result};

/// `n!!` with the empty-product convention `(-1)!! = 0!! = 1`.
pub fn double_factorial(n: i64) -> Result<BigInt> {
    if n < -1 {
        return Err(Error::InvalidArgument(format!(
            "double factorial is defined for n >= -1, got {n}"
        )));
    }
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    Ok(acc)
}

pub fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

// (2n-1)!! for n >= 0
fn odd_double_factorial(n: u64) -> BigInt {
    double_factorial(2 * n as i64 - 1).expect("argument >= -1")
}

fn pow2(e: u64) -> BigInt {
    BigInt::one() << e as usize
}

/// `b̃_k = 2^{3-k} Γ(k+1/2) / (k! Γ(1/2)) = 8 (2k-1)!! / (4^k k!)`.
pub fn tilde_b(k: u32) -> Rational {
    let k = k as u64;
    Rational::new(
        BigInt::from(8) * odd_double_factorial(k),
        pow2(2 * k) * factorial(k),
    )
}

/// `b^k_{i,j} = 2^{j-1} Γ(i+k+1/2) Γ(j+3/2) / Γ(i+j+k+2)`, which equals
/// `(2(i+k)-1)!! (2j+1)!! π / (2^{i+k+2} (i+j+k+1)!)`.
pub fn b_coeff(i: u32, j: u32, k: u32) -> ExactCoeff {
    let (i, j, k) = (i as u64, j as u64, k as u64);
    let num = odd_double_factorial(i + k) * odd_double_factorial(j + 1);
    let den = pow2(i + k + 2) * factorial(i + j + k + 1);
    ExactCoeff::pi(Rational::new(num, den))
}

/// `c^k_{i,j} = 2^{j-5/2} Γ(i+k+1/2) Γ(j+1) / Γ(i+j+k+3/2)`, which equals
/// `√2 · 4^{j-1} (2(i+k)-1)!! j! / (2(i+j+k)+1)!!`.
///
/// Defined for `j >= 1`; the J-integrals with even power `2j` never need
/// `j = 0` because every admissible perturbation has `s >= 1`.
pub fn c_coeff(i: u32, j: u32, k: u32) -> Result<ExactCoeff> {
    if j == 0 {
        return Err(Error::InvalidArgument(
            "c_coeff requires j >= 1".to_string(),
        ));
    }
    let (i, j, k) = (i as u64, j as u64, k as u64);
    let num = pow2(2 * j) * odd_double_factorial(i + k) * factorial(j);
    let den = BigInt::from(4) * odd_double_factorial(i + j + k + 1);
    Ok(ExactCoeff::sqrt2(Rational::new(num, den)))
}

/// The chain coefficients `(c_{i,j}, e_{i,j})` of the iterated reduction
/// identity:
/// `c_{i,j} = (i+j)! (2i-1)!! / (i! (2i+2j+3)!!)`,
/// `e_{i,j} = (i+j)! (2i-1)!! / (i! (2i+2j+1)!!)`.
pub fn zb_chain_coeffs(i: u32, j: u32) -> (Rational, Rational) {
    let (i, j) = (i as u64, j as u64);
    let common = factorial(i + j) * odd_double_factorial(i);
    let c = Rational::new(common.clone(), factorial(i) * odd_double_factorial(i + j + 2));
    let e = Rational::new(common, factorial(i) * odd_double_factorial(i + j + 1));
    (c, e)
}
