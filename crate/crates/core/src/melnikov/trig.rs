use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::exact::{int, Rational};

fn binomial(n: usize, k: usize) -> Rational {
    let mut acc = int(1);
    for t in 0..k {
        acc = acc * int((n - t) as i64) / int(t as i64 + 1);
    }
    acc
}

/// `Σ a_i cos^i x + sin x · Σ ã_i cos^i x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrigPoly {
    #[serde(with = "crate::exact::rational_vec")]
    pub cos_coeffs: Vec<Rational>,
    #[serde(with = "crate::exact::rational_vec")]
    pub sin_coeffs: Vec<Rational>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        Self {
            cos_coeffs: Vec::new(),
            sin_coeffs: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cos_coeffs.iter().chain(&self.sin_coeffs).all(Zero::is_zero)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let c = x.cos();
        let horner = |coeffs: &[Rational]| {
            coeffs
                .iter()
                .rev()
                .fold(0.0, |acc, a| acc * c + crate::exact::to_f64(a))
        };
        horner(&self.cos_coeffs) + x.sin() * horner(&self.sin_coeffs)
    }

    /// Componentwise `self + factor · other`.
    pub fn add_scaled(&self, other: &TrigPoly, factor: &Rational) -> TrigPoly {
        let merge = |a: &[Rational], b: &[Rational]| {
            let len = a.len().max(b.len());
            (0..len)
                .map(|i| {
                    a.get(i).cloned().unwrap_or_default()
                        + b.get(i).cloned().unwrap_or_default() * factor
                })
                .collect()
        };
        TrigPoly {
            cos_coeffs: merge(&self.cos_coeffs, &other.cos_coeffs),
            sin_coeffs: merge(&self.sin_coeffs, &other.sin_coeffs),
        }
    }
}

/// `Σ c̃_i (1 - cos x)^i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosBasisPoly {
    #[serde(with = "crate::exact::rational_vec")]
    pub ctilde: Vec<Rational>,
}

/// Drops nothing but rewrites `Σ a_i cos^i x` in powers of `1 - cos x`,
/// via `cos x = 1 - (1 - cos x)`. Only the even (cosine) part is passed in;
/// the `sin x` part integrates to zero on every symmetric orbit.
pub fn even_part_to_cos_basis(cos_coeffs: &[Rational], n: usize) -> CosBasisPoly {
    let mut ctilde = vec![Rational::zero(); n + 1];
    for (k, a) in cos_coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (i, slot) in ctilde.iter_mut().enumerate().take(k + 1) {
            let sign = if i % 2 == 0 { int(1) } else { int(-1) };
            *slot += a * binomial(k, i) * sign;
        }
    }
    CosBasisPoly { ctilde }
}

/// Inverse of [`even_part_to_cos_basis`]: expands `(1 - cos x)^i` into
/// powers of `cos x`.
pub fn cos_basis_to_cos_powers(ctilde: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); ctilde.len()];
    for (i, c) in ctilde.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (k, slot) in out.iter_mut().enumerate().take(i + 1) {
            let sign = if k % 2 == 0 { int(1) } else { int(-1) };
            *slot += c * binomial(i, k) * sign;
        }
    }
    out
}
