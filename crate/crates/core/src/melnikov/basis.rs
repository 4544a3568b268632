use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{b_coeff, c_coeff, int, rat, tilde_b, ExactCoeff, HalfPowerSeries, Rational};
use crate::quadrature::{quad_I, quad_J, QuadResult};

/// The four integral families combinations are written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BasisKind {
    /// `I_{i,j} = ∮ (1 - cos x)^i y^j dx`.
    I,
    /// `J_{i,j} = ∫_{Γ^+} (1 - cos x)^i y^j dx`.
    J,
    /// `L_{i,j} = (i+1) I_{i+1,2j+1} - (2j+1) I_{i+2,2j-1}`.
    L,
    /// `L̃_{i,j} = (i+1) J_{i+1,2j+2} - (2j+2) J_{i+2,2j}`.
    LTilde,
}

/// One basis element; `j` is the power of `y` for I and J and the second
/// index for L and L̃.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisTerm {
    pub kind: BasisKind,
    pub i: u32,
    pub j: u32,
}

impl fmt::Display for BasisTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            BasisKind::I => "I",
            BasisKind::J => "J",
            BasisKind::L => "L",
            BasisKind::LTilde => "Lt",
        };
        write!(f, "{name}[{},{}]", self.i, self.j)
    }
}

impl BasisTerm {
    pub fn i(i: u32, j: u32) -> Self {
        Self { kind: BasisKind::I, i, j }
    }

    pub fn j(i: u32, j: u32) -> Self {
        Self { kind: BasisKind::J, i, j }
    }

    pub fn l(i: u32, j: u32) -> Self {
        Self { kind: BasisKind::L, i, j }
    }

    pub fn l_tilde(i: u32, j: u32) -> Self {
        Self { kind: BasisKind::LTilde, i, j }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            BasisKind::I | BasisKind::J => self.j >= 1,
            BasisKind::L | BasisKind::LTilde => self.j >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("{self}: second index must be >= 1")))
        }
    }

    /// Expansion into I and J terms.
    pub fn unfold(&self) -> Vec<(BasisTerm, Rational)> {
        let (i, j) = (self.i, self.j);
        match self.kind {
            BasisKind::I | BasisKind::J => vec![(*self, int(1))],
            BasisKind::L => vec![
                (BasisTerm::i(i + 1, 2 * j + 1), int(i as i64 + 1)),
                (BasisTerm::i(i + 2, 2 * j - 1), int(-(2 * j as i64 + 1))),
            ],
            BasisKind::LTilde => vec![
                (BasisTerm::j(i + 1, 2 * j + 2), int(i as i64 + 1)),
                (BasisTerm::j(i + 2, 2 * j), int(-(2 * j as i64 + 2))),
            ],
        }
    }

    /// Half-exponent of the leading term, or `None` for elements that vanish
    /// identically (`I` with an even power of `y`).
    pub fn leading_half_exponent(&self) -> Option<i64> {
        let (i, j) = (self.i as i64, self.j as i64);
        match self.kind {
            BasisKind::I if j % 2 == 0 => None,
            BasisKind::I | BasisKind::J => Some(2 * i + j + 1),
            BasisKind::L => Some(2 * (i + j + 2)),
            BasisKind::LTilde => Some(2 * (i + j) + 5),
        }
    }

    /// Coefficient of `h^{half/2}` in the exact expansion.
    pub fn coeff(&self, half_exponent: i64) -> ExactCoeff {
        let Some(lead) = self.leading_half_exponent() else {
            return ExactCoeff::zero();
        };
        let offset = half_exponent - lead;
        if offset < 0 || offset % 2 != 0 {
            return ExactCoeff::zero();
        }
        let k = (offset / 2) as u32;
        let (i, j) = (self.i, self.j);
        // -(k + 1/2) b̃_k
        let damped = || tilde_b(k) * rat(-(2 * k as i64 + 1), 2);
        match self.kind {
            BasisKind::I => b_coeff(i, (j - 1) / 2, k).scale(&tilde_b(k)),
            BasisKind::J if j % 2 == 1 => b_coeff(i, (j - 1) / 2, k).scale(&(tilde_b(k) / int(2))),
            BasisKind::J => c_coeff(i, j / 2, k)
                .expect("even power at least 2")
                .scale(&tilde_b(k)),
            BasisKind::L => b_coeff(i + 1, j, k).scale(&damped()),
            BasisKind::LTilde => c_coeff(i + 1, j + 1, k)
                .expect("second index at least 1")
                .scale(&damped()),
        }
    }

    /// Exact expansion on the half-exponent window `[base, end)`.
    pub fn series(&self, base: i64, end: i64) -> HalfPowerSeries {
        let len = (end - base).max(0) as usize;
        HalfPowerSeries {
            base_half_exponent: base,
            coeffs: (0..len).map(|k| self.coeff(base + k as i64)).collect(),
        }
    }

    /// Quadrature value at `h`.
    pub fn quad(&self, h: f64, tol: f64) -> Result<QuadResult> {
        let mut total: Option<QuadResult> = None;
        for (term, c) in self.unfold() {
            let r = match term.kind {
                BasisKind::I => quad_I(term.i, term.j, h, tol)?,
                _ => quad_J(term.i, term.j, h, tol)?,
            }
            .scale(crate::exact::to_f64(&c));
            total = Some(match total {
                Some(t) => t.combine(r),
                None => r,
            });
        }
        Ok(total.expect("every element unfolds to at least one term"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window(t: BasisTerm, end: i64) -> HalfPowerSeries {
        t.series(1, end)
    }

    fn unfolded(t: BasisTerm, end: i64) -> HalfPowerSeries {
        t.unfold()
            .into_iter()
            .map(|(u, c)| window(u, end).scale(&c))
            .fold(HalfPowerSeries::zero(1, (end - 1) as usize), |a, b| a.add(&b))
    }

    #[test]
    fn area_integral_expansion() {
        let s = BasisTerm::i(0, 1).series(2, 8);
        assert_eq!(s.to_string(), "2*pi*h + 1/8*pi*h^2 + 3/128*pi*h^3");
    }

    #[test]
    fn half_orbit_leading_terms() {
        let s = BasisTerm::j(0, 2).series(3, 4);
        assert_eq!(s.coeffs[0], ExactCoeff::sqrt2(rat(8, 3)));
        assert_eq!(BasisTerm::j(1, 3).coeff(6), BasisTerm::i(1, 3).coeff(6).scale(&rat(1, 2)));
        assert!(BasisTerm::i(1, 2).series(1, 20).is_zero());
    }

    #[test]
    fn l_leading_term() {
        let l = BasisTerm::l(1, 1);
        assert_eq!(l.leading_half_exponent(), Some(8));
        assert_eq!(l.coeff(8), ExactCoeff::pi(rat(-3, 32)));
    }

    #[test]
    fn closed_forms_match_definitions() {
        for i in 0..5 {
            for j in 1..5 {
                for t in [BasisTerm::l(i, j), BasisTerm::l_tilde(i, j)] {
                    assert_eq!(window(t, 40), unfolded(t, 40), "{t}");
                }
            }
        }
    }

    #[test]
    fn quadrature_matches_series() {
        for t in [BasisTerm::i(2, 3), BasisTerm::j(1, 4), BasisTerm::l(0, 2), BasisTerm::l_tilde(1, 1)] {
            let h = 0.05;
            let q = t.quad(h, 1e-13).unwrap().value;
            let s = t.series(1, 60).eval_f64(h);
            assert!((q / s - 1.0).abs() < 1e-9, "{t}: {q} vs {s}");
        }
    }
}
