//! Reduction of a combination to the canonical form
//! `Σ A_i X_{i,p0} + Σ A_{n+m-1+i} T_i` (heads in the lowest power of the
//! ladder, tails in `L` or `L̃`). The longest available chain identity
//! clears the low indices first, then single steps push what is left up
//! to the tail.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::basis::BasisTerm;
use super::combination::{FamilyParams, Family, Ladder, MelnikovCombination, Parity, Term, Expansion, series_of};
use crate::error::{Error, Result};
use crate::exact::{int, zb_chain_coeffs, HalfPowerSeries, Rational};
use crate::linalg::Matrix;

/// Linear form over the inputs of one ladder.
type LinForm = Vec<Rational>;

fn axpy(acc: &mut LinForm, factor: &Rational, x: &LinForm) {
    if factor.is_zero() {
        return;
    }
    for (a, b) in acc.iter_mut().zip(x) {
        *a += factor * b;
    }
}

fn scaled(x: &LinForm, factor: &Rational) -> LinForm {
    x.iter().map(|v| v * factor).collect()
}

/// Head forms of `X_{i,p0}`, `i < n + blocks`, and tail forms of
/// `T(a, P)` in increasing `a`.
fn reduce_forms(blocks: &[Vec<LinForm>], n: usize, p0: u32) -> (Vec<LinForm>, Vec<LinForm>) {
    let width = blocks[0][0].len();
    let zero = vec![Rational::zero(); width];
    if blocks.len() == 1 {
        return (blocks[0].clone(), Vec::new());
    }
    let (upper, mut tail) = reduce_forms(&blocks[1..], n, p0 + 2);
    let k = blocks.len() - 1;
    let p = int((p0 + 2) as i64);
    let mut low: Vec<LinForm> = blocks[0].clone();
    low.resize(n + k + 1, zero.clone());
    let mut high = upper;
    let odd = |i: usize| int(2 * i as i64 + 1);

    // Chains of maximal length leave only X_{n-1,P} behind.
    for i in 0..n.saturating_sub(1) {
        let x = std::mem::replace(&mut high[i], zero.clone());
        let kk = (n - 2 - i) as u32;
        axpy(&mut low[i + 1], &(int(2) * &p / odd(i)), &x);
        for j in 0..kk {
            let (c, _) = zb_chain_coeffs(i as u32, j);
            axpy(&mut low[i + j as usize + 2], &(-c * &p), &x);
        }
        let (_, e) = zb_chain_coeffs(i as u32, kk);
        axpy(&mut high[n - 1], &(&e * int(n as i64 - 1)), &x);
        axpy(&mut low[n], &(-e * &p), &x);
    }
    // Single steps up to the last index.
    for i in (n - 1)..(n + k - 1) {
        let x = std::mem::replace(&mut high[i], zero.clone());
        axpy(&mut low[i + 1], &(int(2) * &p / odd(i)), &x);
        axpy(&mut high[i + 1], &(int(i as i64 + 1) / odd(i)), &x);
        axpy(&mut low[i + 2], &(-(&p) / odd(i)), &x);
    }
    let i = n + k - 1;
    let x = std::mem::replace(&mut high[i], zero);
    axpy(&mut low[n + k], &(int(2) * &p / odd(i)), &x);
    tail.push(scaled(&x, &(int(1) / odd(i))));
    (low, tail)
}

/// Canonical form of one ladder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalLadder {
    pub ladder: Ladder,
    /// Input elements, one per column of `map`.
    pub inputs: Vec<BasisTerm>,
    #[serde(with = "crate::exact::rational_vec")]
    pub input_values: Vec<Rational>,
    #[serde(with = "crate::exact::rational_vec")]
    pub head: Vec<Rational>,
    #[serde(with = "crate::exact::rational_vec")]
    pub tail: Vec<Rational>,
    /// Rows `head ++ tail`, columns `inputs`.
    #[serde(with = "crate::linalg::matrix_strings")]
    pub map: Matrix,
}

impl CanonicalLadder {
    pub fn head_elements(&self) -> Vec<BasisTerm> {
        let l = &self.ladder;
        (0..self.head.len() as u32).map(|i| l.element(i, 0)).collect()
    }

    /// `L_{n-1+i, r+m-i}` or `L̃_{n-1+i, r̃+l-1-i}` for `i = 1..blocks`.
    pub fn tail_elements(&self) -> Vec<BasisTerm> {
        let l = &self.ladder;
        (1..l.blocks)
            .map(|i| match l.parity {
                Parity::Odd => BasisTerm::l(l.n - 1 + i, l.r + l.blocks - i),
                Parity::Even => BasisTerm::l_tilde(l.n - 1 + i, l.r + l.blocks - 1 - i),
            })
            .collect()
    }

    pub fn terms(&self) -> Vec<Term> {
        self.head_elements()
            .into_iter()
            .zip(&self.head)
            .chain(self.tail_elements().into_iter().zip(&self.tail))
            .filter(|(_, c)| !c.is_zero())
            .map(|(element, c)| Term {
                element,
                coeff: c.clone(),
            })
            .collect()
    }

    /// All canonical coefficients, head first.
    pub fn coefficients(&self) -> Vec<Rational> {
        self.head.iter().chain(&self.tail).cloned().collect()
    }
}

/// Canonical form of a whole combination: one entry per nonempty ladder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub params: FamilyParams,
    pub ladders: Vec<CanonicalLadder>,
}

impl CanonicalForm {
    pub fn terms(&self) -> Vec<Term> {
        self.ladders.iter().flat_map(CanonicalLadder::terms).collect()
    }

    pub fn expand(&self, order: usize) -> Expansion {
        let terms = self.terms();
        if terms.is_empty() {
            return Expansion::IdenticallyZero;
        }
        let base = self.params.base_half_exponent();
        Expansion::Series(series_of(&terms, base, base + 2 * order as i64))
    }

    pub fn series_window(&self, base: i64, end: i64) -> HalfPowerSeries {
        series_of(&self.terms(), base, end)
    }
}

/// Input elements of a ladder in the order `block · (n+1) + i`, in the
/// basis the combination of `family` is written in.
pub fn ladder_inputs(family: Family, ladder: &Ladder) -> Vec<BasisTerm> {
    let mut out = Vec::with_capacity(ladder.input_count());
    for b in 0..ladder.blocks {
        for i in 0..=ladder.n {
            let e = ladder.element(i, b);
            out.push(match family {
                Family::Piecewise => BasisTerm::j(e.i, e.j),
                Family::Smooth => e,
            });
        }
    }
    out
}

/// Reduces one ladder given its input coefficients (`block · (n+1) + i`).
pub fn reduce_ladder(family: Family, ladder: Ladder, values: Vec<Rational>) -> Result<CanonicalLadder> {
    if ladder.blocks == 0 {
        return Err(Error::InvalidArgument("empty ladder".to_string()));
    }
    if ladder.n == 0 && ladder.blocks >= 2 {
        return Err(Error::InvalidArgument(
            "degree n = 0 has no canonical form with free tail coefficients; \
             the block coefficients themselves are the free parameters"
                .to_string(),
        ));
    }
    if ladder.parity == Parity::Even && ladder.r == 0 {
        return Err(Error::InvalidArgument("even ladders start at y^2 (r̃ >= 1)".to_string()));
    }
    let inputs = ladder_inputs(family, &ladder);
    let width = inputs.len();
    // Odd powers of a piecewise combination are J = I/2.
    let unit = match (family, ladder.parity) {
        (Family::Piecewise, Parity::Odd) => Rational::new(1.into(), 2.into()),
        _ => int(1),
    };
    let n = ladder.n as usize;
    let blocks: Vec<Vec<LinForm>> = (0..ladder.blocks as usize)
        .map(|b| {
            (0..=n)
                .map(|i| {
                    let mut form = vec![Rational::zero(); width];
                    form[b * (n + 1) + i] = unit.clone();
                    form
                })
                .collect()
        })
        .collect();
    let (head_forms, tail_forms) = reduce_forms(&blocks, n, ladder.power(0));
    let map = Matrix::from_rows(head_forms.into_iter().chain(tail_forms).collect());
    let coefficients = map.mul_vec(&values);
    let head_len = n + ladder.blocks as usize;
    Ok(CanonicalLadder {
        ladder,
        inputs,
        input_values: values,
        head: coefficients[..head_len].to_vec(),
        tail: coefficients[head_len..].to_vec(),
        map,
    })
}

/// Canonical form of a nonempty combination.
pub fn reduce_to_canonical(c: &MelnikovCombination) -> Result<CanonicalForm> {
    if c.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot reduce an identically zero combination".to_string(),
        ));
    }
    let ladders = c.params.ladders();
    let mut covered = 0;
    let mut out = Vec::new();
    for ladder in ladders {
        let inputs = ladder_inputs(c.params.family, &ladder);
        let values: Vec<Rational> = inputs.iter().map(|e| c.coeff_of(*e)).collect();
        covered += values.iter().filter(|v| !v.is_zero()).count();
        out.push(reduce_ladder(c.params.family, ladder, values)?);
    }
    if covered != c.terms.len() {
        return Err(Error::InvalidArgument(
            "combination has terms outside the ladders of its family".to_string(),
        ));
    }
    Ok(CanonicalForm {
        params: c.params,
        ladders: out,
    })
}

/// Outcome of [`fuzz_reduction`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub schema_version: u32,
    pub seed: u64,
    pub trials: usize,
    /// Trials where the canonical series differed from the input series.
    pub mismatches: Vec<String>,
    /// Trials outside the reducible range (`n = 0` with two or more blocks).
    pub skipped: usize,
}

/// Reduces random combinations and compares their exact series before and
/// after, through `order` integer steps.
pub fn fuzz_reduction(seed: u64, trials: usize, order: usize) -> FuzzReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = Vec::new();
    let mut skipped = 0;
    for t in 0..trials {
        let n = rng.gen_range(0..=3);
        let s1 = rng.gen_range(1..=3);
        let s_top = s1 + rng.gen_range(0..=4);
        let params = if rng.gen_bool(0.5) {
            FamilyParams::smooth(n, s1, s_top)
        } else {
            FamilyParams::piecewise(n, s1, s_top)
        };
        let mut terms = Vec::new();
        for ladder in params.ladders() {
            for element in ladder_inputs(params.family, &ladder) {
                let coeff = Rational::new(rng.gen_range(-9..=9).into(), rng.gen_range(1..=6).into());
                terms.push(Term { element, coeff });
            }
        }
        let c = MelnikovCombination::new(params, terms);
        if c.is_empty() {
            continue;
        }
        let form = match reduce_to_canonical(&c) {
            Ok(f) => f,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        let base = params.base_half_exponent();
        let end = base + 2 * order as i64;
        if c.series_window(base, end) != form.series_window(base, end) {
            mismatches.push(format!("trial {t}: {params:?}"));
        }
    }
    FuzzReport {
        schema_version: crate::SCHEMA_VERSION,
        seed,
        trials,
        mismatches,
        skipped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn smooth_combination(n: u32, r: u32, blocks: &[Vec<Rational>]) -> MelnikovCombination {
        let m = blocks.len() as u32;
        let params = FamilyParams::smooth(n, 2 * r, 2 * (r + m) - 1);
        let ladder = Ladder::odd(n, r, m);
        let terms = blocks
            .iter()
            .enumerate()
            .flat_map(|(b, row)| {
                row.iter().enumerate().map(move |(i, c)| Term {
                    element: ladder.element(i as u32, b as u32),
                    coeff: c.clone(),
                })
            })
            .collect();
        MelnikovCombination::new(params, terms)
    }

    #[test]
    fn single_block_is_unchanged() {
        let c = smooth_combination(2, 1, &[vec![int(1), rat(2, 3), int(-4)]]);
        let f = reduce_to_canonical(&c).unwrap();
        assert_eq!(f.ladders[0].head, vec![int(1), rat(2, 3), int(-4)]);
        assert!(f.ladders[0].tail.is_empty());
        assert_eq!(f.ladders[0].map, Matrix::identity(3));
    }

    #[test]
    fn two_blocks_degree_one() {
        // A0 = c01, A1 = c11 + 6 c03, A2 = -c03 + 2 c13, A3 = (c03 + c13)/3
        let map = reduce_ladder(Family::Smooth, Ladder::odd(1, 0, 2), vec![int(0); 4])
            .unwrap()
            .map;
        let expected = Matrix::from_rows(vec![
            vec![int(1), int(0), int(0), int(0)],
            vec![int(0), int(1), int(6), int(0)],
            vec![int(0), int(0), int(-1), int(2)],
            vec![int(0), int(0), rat(1, 3), rat(1, 3)],
        ]);
        assert_eq!(map, expected);
    }

    #[test]
    fn series_preserved() {
        for n in 1..4u32 {
            for m in 1..4u32 {
                for r in 0..3u32 {
                    let blocks: Vec<Vec<Rational>> = (0..m)
                        .map(|b| (0..=n).map(|i| rat((3 * i + 7 * b + 1) as i64, (i + b + 2) as i64)).collect())
                        .collect();
                    let c = smooth_combination(n, r, &blocks);
                    let f = reduce_to_canonical(&c).unwrap();
                    let base = c.params.base_half_exponent();
                    assert_eq!(c.series_window(base, base + 30), f.series_window(base, base + 30));
                    let l = &f.ladders[0];
                    assert_eq!(l.map.rank(), l.map.rows(), "({n},{m},{r})");
                }
            }
        }
    }

    #[test]
    fn degree_zero_with_several_blocks_is_rejected() {
        assert!(reduce_ladder(Family::Smooth, Ladder::odd(0, 0, 2), vec![int(1), int(1)]).is_err());
        assert!(reduce_ladder(Family::Smooth, Ladder::odd(0, 0, 1), vec![int(1)]).is_ok());
    }
}
