use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::basis::{BasisKind, BasisTerm};
use super::perturbation::{PiecewisePerturbation, SmoothPerturbation};
use super::trig::even_part_to_cos_basis;
use crate::exact::{int, HalfPowerSeries, Rational};
use crate::quadrature::QuadResult;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Closed-orbit integrals `I_{i,2j+1}` of a smooth perturbation.
    Smooth,
    /// Half-orbit integrals `J_{i,s}` of a piecewise perturbation.
    Piecewise,
}

/// Which parity of `y`-powers a ladder collects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    /// Powers `2r+1, …, 2(r+blocks)-1` in the I basis (π coefficients).
    Odd,
    /// Powers `2r, …, 2(r+blocks-1)` in the J basis (√2 coefficients).
    Even,
}

/// A run of consecutive same-parity powers, `blocks` of them, each carrying
/// a degree-`n` polynomial in `1 - cos x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ladder {
    pub parity: Parity,
    pub n: u32,
    /// `r` for odd ladders, `r̃` for even ones.
    pub r: u32,
    /// `m` for odd ladders, `l` for even ones.
    pub blocks: u32,
}

impl Ladder {
    pub fn odd(n: u32, r: u32, m: u32) -> Self {
        Self { parity: Parity::Odd, n, r, blocks: m }
    }

    pub fn even(n: u32, r_tilde: u32, l: u32) -> Self {
        Self { parity: Parity::Even, n, r: r_tilde, blocks: l }
    }

    /// Power of `y` in block `b`.
    pub fn power(&self, b: u32) -> u32 {
        match self.parity {
            Parity::Odd => 2 * (self.r + b) + 1,
            Parity::Even => 2 * (self.r + b),
        }
    }

    pub fn kind(&self) -> BasisKind {
        match self.parity {
            Parity::Odd => BasisKind::I,
            Parity::Even => BasisKind::J,
        }
    }

    pub fn element(&self, i: u32, b: u32) -> BasisTerm {
        BasisTerm {
            kind: self.kind(),
            i,
            j: self.power(b),
        }
    }

    /// Half-exponent of `h^{r+1}` (odd) or `h^{r̃+1/2}` (even).
    pub fn base_half_exponent(&self) -> i64 {
        match self.parity {
            Parity::Odd => 2 * self.r as i64 + 2,
            Parity::Even => 2 * self.r as i64 + 1,
        }
    }

    pub fn input_count(&self) -> usize {
        (self.n as usize + 1) * self.blocks as usize
    }

    /// Number of independent leading coefficients: `n + 2·blocks - 1`, or
    /// `blocks` when `n = 0`.
    pub fn free_count(&self) -> usize {
        if self.n == 0 {
            self.blocks as usize
        } else {
            (self.n + 2 * self.blocks - 1) as usize
        }
    }

    /// Half-exponents of the coefficients that the free parameters control.
    pub fn controlled_exponents(&self) -> Vec<i64> {
        (0..self.free_count() as i64)
            .map(|k| self.base_half_exponent() + 2 * k)
            .collect()
    }
}

/// Family parameters derived from the power range of a perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub family: Family,
    pub n: u32,
    pub s1: u32,
    /// `s2` for smooth perturbations, `ŝ = max(s2, s3)` for piecewise ones.
    pub s_top: u32,
}

impl FamilyParams {
    pub fn smooth(n: u32, s1: u32, s2: u32) -> Self {
        Self { family: Family::Smooth, n, s1, s_top: s2 }
    }

    pub fn piecewise(n: u32, s1: u32, s_hat: u32) -> Self {
        Self { family: Family::Piecewise, n, s1, s_top: s_hat }
    }

    /// `r = ⌊s1/2⌋`.
    pub fn r(&self) -> u32 {
        self.s1 / 2
    }

    /// `m = ⌊(s_top - 2r + 1)/2⌋`, the number of odd powers in range.
    pub fn m(&self) -> u32 {
        (self.s_top + 1 - 2 * self.r()) / 2
    }

    /// `r̃ = ⌊(s1 + 1)/2⌋`.
    pub fn r_tilde(&self) -> u32 {
        (self.s1 + 1) / 2
    }

    /// `l = ⌊(ŝ - 2r̃ + 2)/2⌋`, the number of even powers in range.
    pub fn l(&self) -> u32 {
        (self.s_top + 2).saturating_sub(2 * self.r_tilde()) / 2
    }

    /// Nonempty ladders: the odd one first.
    pub fn ladders(&self) -> Vec<Ladder> {
        let mut out = Vec::new();
        if self.m() > 0 {
            out.push(Ladder::odd(self.n, self.r(), self.m()));
        }
        if self.family == Family::Piecewise && self.l() > 0 {
            out.push(Ladder::even(self.n, self.r_tilde(), self.l()));
        }
        out
    }

    /// Lowest half-exponent that can appear in `M(h)`.
    pub fn base_half_exponent(&self) -> i64 {
        let odd = 2 * self.r() as i64 + 2;
        match self.family {
            Family::Smooth => odd,
            Family::Piecewise => odd.min(2 * self.r_tilde() as i64 + 1),
        }
    }
}

/// A term `coeff · element` of a combination.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub element: BasisTerm,
    #[serde(with = "crate::exact::rational_str")]
    pub coeff: Rational,
}

/// `M(h)` written as a rational combination of basis integrals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MelnikovCombination {
    pub params: FamilyParams,
    pub terms: Vec<Term>,
}

/// Result of [`MelnikovCombination::expand`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expansion {
    Series(HalfPowerSeries),
    /// The combination has no terms, so `M(h) ≡ 0`.
    IdenticallyZero,
}

impl Expansion {
    pub fn series(&self) -> Option<&HalfPowerSeries> {
        match self {
            Expansion::Series(s) => Some(s),
            Expansion::IdenticallyZero => None,
        }
    }
}

/// Exact series of `Σ coeff · element` on `[base, end)`.
pub fn series_of(terms: &[Term], base: i64, end: i64) -> HalfPowerSeries {
    let len = (end - base).max(0) as usize;
    let mut out = HalfPowerSeries::zero(base, len);
    for t in terms.iter().filter(|t| !t.coeff.is_zero()) {
        for (k, slot) in out.coeffs.iter_mut().enumerate() {
            let c = t.element.coeff(base + k as i64);
            if !c.is_zero() {
                *slot += &c.scale(&t.coeff);
            }
        }
    }
    out
}

impl MelnikovCombination {
    pub fn new(params: FamilyParams, terms: Vec<Term>) -> Self {
        let mut c = Self { params, terms };
        c.normalize();
        c
    }

    /// Merges repeated elements, drops zero coefficients and sorts.
    pub fn normalize(&mut self) {
        let mut merged: BTreeMap<BasisTerm, Rational> = BTreeMap::new();
        for t in self.terms.drain(..) {
            *merged.entry(t.element).or_insert_with(Rational::zero) += t.coeff;
        }
        self.terms = merged
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(element, coeff)| Term { element, coeff })
            .collect();
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff_of(&self, element: BasisTerm) -> Rational {
        self.terms
            .iter()
            .find(|t| t.element == element)
            .map(|t| t.coeff.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Expansion through `order` integer steps of `h`, starting at the
    /// family's lowest possible exponent.
    pub fn expand(&self, order: usize) -> Expansion {
        if self.is_empty() {
            return Expansion::IdenticallyZero;
        }
        let base = self.params.base_half_exponent();
        Expansion::Series(self.series_window(base, base + 2 * order as i64))
    }

    pub fn series_window(&self, base: i64, end: i64) -> HalfPowerSeries {
        series_of(&self.terms, base, end)
    }

    /// Rewrites odd-power `J` terms as `I/2`.
    pub fn to_i_basis(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| match t.element.kind {
                BasisKind::J if t.element.j % 2 == 1 => Term {
                    element: BasisTerm::i(t.element.i, t.element.j),
                    coeff: &t.coeff / int(2),
                },
                _ => t.clone(),
            })
            .collect();
        Self::new(self.params, terms)
    }

    /// Quadrature value of the combination at `h`.
    pub fn quad(&self, h: f64, tol: f64) -> Result<QuadResult> {
        let mut total = QuadResult::exact_zero();
        for t in &self.terms {
            total = total.combine(t.element.quad(h, tol)?.scale(crate::exact::to_f64(&t.coeff)));
        }
        Ok(total)
    }

    /// Coefficient tables `c̃[block][i]` of one ladder.
    pub fn ladder_blocks(&self, ladder: &Ladder) -> Vec<Vec<Rational>> {
        let mut blocks = vec![vec![Rational::zero(); ladder.n as usize + 1]; ladder.blocks as usize];
        for b in 0..ladder.blocks {
            for i in 0..=ladder.n {
                blocks[b as usize][i as usize] = self.coeff_of(ladder.element(i, b));
            }
        }
        blocks
    }
}

/// Symmetry-reduced `M(h)` of a smooth perturbation: only odd powers of
/// `y` and only the even part of each trigonometric coefficient survive.
pub fn assemble_smooth(p: &SmoothPerturbation) -> MelnikovCombination {
    let params = FamilyParams::smooth(p.n, p.s1, p.s2);
    let mut terms = Vec::new();
    for ladder in params.ladders() {
        for b in 0..ladder.blocks {
            let s = ladder.power(b);
            let basis = even_part_to_cos_basis(&p.poly(s).cos_coeffs, p.n as usize);
            for (i, c) in basis.ctilde.into_iter().enumerate() {
                terms.push(Term {
                    element: ladder.element(i as u32, b),
                    coeff: c,
                });
            }
        }
    }
    MelnikovCombination::new(params, terms)
}

/// `M(h) = Σ_s ∫_{Γ^+} (Q^+_s + (-1)^{s+1} Q^-_s) y^s dx`, reduced to the
/// even trigonometric part in the `J` basis.
pub fn assemble_piecewise(p: &PiecewisePerturbation) -> MelnikovCombination {
    let params = FamilyParams::piecewise(p.n, p.s1, p.s_hat());
    let mut terms = Vec::new();
    for s in p.s1..=p.s_hat() {
        let sign = if s % 2 == 1 { int(1) } else { int(-1) };
        let folded = p.plus_poly(s).add_scaled(&p.minus_poly(s), &sign);
        let basis = even_part_to_cos_basis(&folded.cos_coeffs, p.n as usize);
        for (i, c) in basis.ctilde.into_iter().enumerate() {
            terms.push(Term {
                element: BasisTerm::j(i as u32, s),
                coeff: c,
            });
        }
    }
    MelnikovCombination::new(params, terms)
}
