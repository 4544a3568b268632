use serde::{Deserialize, Serialize};

use super::basis::{BasisKind, BasisTerm};
use super::combination::{series_of, Term};
use crate::error::{Error, Result};
use crate::exact::{int, zb_chain_coeffs, HalfPowerSeries, Rational};

/// `lhs = Σ rhs`, an exact linear identity between basis integrals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearRelation {
    pub lhs: BasisTerm,
    pub rhs: Vec<Term>,
}

/// Quadrature check of a relation at one energy level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResidual {
    pub h: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs| / |lhs|`.
    pub relative: f64,
}

/// Chain identity for `X_{i,P}` with `X = I` (odd `P`) or `X = J` (even `P`):
///
/// `X_{i,P} = 2P/(2i+1) X_{i+1,P-2} - P Σ_{j<k} c_{i,j} X_{i+j+2,P-2}
///            + e_{i,k} [(i+k+1) X_{i+k+1,P} - P X_{i+k+2,P-2}]`.
///
/// The bracket is `L_{i+k,(P-1)/2}` or `L̃_{i+k,(P-2)/2}`.
pub(crate) fn chain(kind: BasisKind, i: u32, power: u32, k: u32) -> Vec<Term> {
    let x = |a: u32, p: u32| BasisTerm { kind, i: a, j: p };
    let p = power as i64;
    let mut rhs = vec![Term {
        element: x(i + 1, power - 2),
        coeff: int(2 * p) / int(2 * i as i64 + 1),
    }];
    for j in 0..k {
        let (c, _) = zb_chain_coeffs(i, j);
        rhs.push(Term {
            element: x(i + j + 2, power - 2),
            coeff: -c * int(p),
        });
    }
    let (_, e) = zb_chain_coeffs(i, k);
    rhs.push(Term {
        element: x(i + k + 1, power),
        coeff: &e * int((i + k + 1) as i64),
    });
    rhs.push(Term {
        element: x(i + k + 2, power - 2),
        coeff: -e * int(p),
    });
    rhs
}

/// `I_{i,2r+3}` through `I_{i+1,2r+1}, …, I_{i+k+2,2r+1}` and
/// `I_{i+k+1,2r+3}`; `k = 0` is the single-step identity.
#[allow(non_snake_case)]
pub fn rewrite_I(i: u32, r: u32, k: u32) -> LinearRelation {
    let power = 2 * r + 3;
    LinearRelation {
        lhs: BasisTerm::i(i, power),
        rhs: chain(BasisKind::I, i, power, k),
    }
}

/// The even-power analogue for `J_{i,2r+2}`, `r >= 1`.
#[allow(non_snake_case)]
pub fn rewrite_J(i: u32, r: u32, k: u32) -> Result<LinearRelation> {
    if r == 0 {
        return Err(Error::InvalidArgument(
            "rewrite_J needs r >= 1 (J with y^0 is outside the basis)".to_string(),
        ));
    }
    let power = 2 * r + 2;
    Ok(LinearRelation {
        lhs: BasisTerm::j(i, power),
        rhs: chain(BasisKind::J, i, power, k),
    })
}

impl LinearRelation {
    /// `series(lhs) - series(rhs)` on `order` integer steps from the lowest
    /// exponent present.
    pub fn series_residual(&self, order: usize) -> HalfPowerSeries {
        let base = std::iter::once(self.lhs)
            .chain(self.rhs.iter().map(|t| t.element))
            .filter_map(|e| e.leading_half_exponent())
            .min()
            .unwrap_or(1);
        let end = base + 2 * order as i64;
        let lhs = series_of(
            &[Term {
                element: self.lhs,
                coeff: int(1),
            }],
            base,
            end,
        );
        lhs.sub(&series_of(&self.rhs, base, end))
    }

    pub fn quad_residual(&self, h: f64, tol: f64) -> Result<QuadResidual> {
        let lhs = self.lhs.quad(h, tol)?.value;
        let mut rhs = 0.0;
        for t in &self.rhs {
            rhs += crate::exact::to_f64(&t.coeff) * t.element.quad(h, tol)?.value;
        }
        Ok(QuadResidual {
            h,
            lhs,
            rhs,
            relative: (lhs - rhs).abs() / lhs.abs(),
        })
    }

    /// Coefficient of one element on the right-hand side.
    pub fn coeff_of(&self, element: BasisTerm) -> Rational {
        self.rhs
            .iter()
            .filter(|t| t.element == element)
            .map(|t| t.coeff.clone())
            .sum()
    }
}
