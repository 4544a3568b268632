use std::fmt;

use serde::{Deserialize, Serialize};

use super::coeff::format_multiplier;
use super::{ExactCoeff, Rational};

/// Truncated expansion `Σ_{k<order} coeffs[k] · h^{(base_half_exponent + k)/2}`.
///
/// Everything at or beyond half-exponent `base_half_exponent + order` is
/// unknown. Integer-power series simply have zeros in the odd slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfPowerSeries {
    pub base_half_exponent: i64,
    pub coeffs: Vec<ExactCoeff>,
}

/// One exported term of a series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub half_exponent: i64,
    #[serde(with = "super::rational_str")]
    pub pi_part: Rational,
    #[serde(with = "super::rational_str")]
    pub rt2_part: Rational,
    #[serde(with = "super::rational_str")]
    pub unit_part: Rational,
    pub decimal: String,
}

impl HalfPowerSeries {
    pub fn zero(base_half_exponent: i64, order: usize) -> Self {
        Self {
            base_half_exponent,
            coeffs: vec![ExactCoeff::zero(); order],
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// First unknown half-exponent.
    pub fn end_half_exponent(&self) -> i64 {
        self.base_half_exponent + self.coeffs.len() as i64
    }

    /// Coefficient of `h^{half/2}`; zero below the base, `None` past the
    /// truncation.
    pub fn coeff_at(&self, half_exponent: i64) -> Option<ExactCoeff> {
        if half_exponent >= self.end_half_exponent() {
            None
        } else if half_exponent < self.base_half_exponent {
            Some(ExactCoeff::zero())
        } else {
            Some(self.coeffs[(half_exponent - self.base_half_exponent) as usize].clone())
        }
    }

    /// Re-expresses the series over `[base, end)`; slots past the known
    /// range are dropped, so `end` is clamped to the current truncation.
    pub fn reframe(&self, base: i64, end: i64) -> Self {
        let end = end.min(self.end_half_exponent());
        let len = (end - base).max(0) as usize;
        let coeffs = (0..len)
            .map(|k| self.coeff_at(base + k as i64).unwrap_or_default())
            .collect();
        Self {
            base_half_exponent: base,
            coeffs,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(ExactCoeff::is_zero)
    }

    /// Lowest nonzero term as `(half_exponent, coefficient)`.
    pub fn leading_term(&self) -> Option<(i64, &ExactCoeff)> {
        self.coeffs
            .iter()
            .enumerate()
            .find(|(_, c)| !c.is_zero())
            .map(|(k, c)| (self.base_half_exponent + k as i64, c))
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self {
            base_half_exponent: self.base_half_exponent,
            coeffs: self.coeffs.iter().map(|c| c.scale(factor)).collect(),
        }
    }

    /// Sum truncated to the smaller known range.
    pub fn add(&self, other: &Self) -> Self {
        let base = self.base_half_exponent.min(other.base_half_exponent);
        let end = self.end_half_exponent().min(other.end_half_exponent());
        let mut out = self.reframe(base, end);
        for k in 0..out.coeffs.len() {
            let e = base + k as i64;
            if let Some(c) = other.coeff_at(e) {
                out.coeffs[k] += &c;
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::from_integer(1.into())))
    }

    /// `Σ c_k h^{(base+k)/2}` in double precision.
    pub fn eval_f64(&self, h: f64) -> f64 {
        let root = h.sqrt();
        let mut power = root.powi(self.base_half_exponent as i32);
        let mut sum = 0.0;
        for c in &self.coeffs {
            if !c.is_zero() {
                sum += c.to_f64() * power;
            }
            power *= root;
        }
        sum
    }

    /// Nonzero terms with their decimal values.
    pub fn terms(&self, digits: u32) -> Vec<SeriesTerm> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| SeriesTerm {
                half_exponent: self.base_half_exponent + k as i64,
                pi_part: c.pi_part.clone(),
                rt2_part: c.rt2_part.clone(),
                unit_part: c.unit_part.clone(),
                decimal: c.to_decimal_string(digits),
            })
            .collect()
    }

    /// Coefficients on one parity class of the half grid: `parity = 0`
    /// selects even half-exponents (integer powers), `1` the odd ones.
    pub fn ladder(&self, parity: i64) -> Vec<(i64, ExactCoeff)> {
        (self.base_half_exponent..self.end_half_exponent())
            .filter(|e| e.rem_euclid(2) == parity)
            .map(|e| (e, self.coeff_at(e).unwrap_or_default()))
            .collect()
    }
}

fn format_power(half_exponent: i64) -> String {
    match half_exponent {
        0 => String::new(),
        2 => "h".to_string(),
        e if e % 2 == 0 => format!("h^{}", e / 2),
        e => format!("h^({e}/2)"),
    }
}

impl fmt::Display for HalfPowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pieces: Vec<String> = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let power = format_power(self.base_half_exponent + k as i64);
            let coefficient = match c.pure_generator() {
                Some(super::Irrational::Pi) => format_multiplier(&c.pi_part, "pi"),
                Some(super::Irrational::Sqrt2) => format_multiplier(&c.rt2_part, "sqrt2"),
                Some(super::Irrational::One) if power.is_empty() => c.to_string(),
                Some(super::Irrational::One) => format_multiplier(&c.unit_part, "")
                    .trim_end_matches('*')
                    .to_string(),
                _ => format!("({c})"),
            };
            let piece = match (coefficient.as_str(), power.is_empty()) {
                (_, true) => coefficient.clone(),
                ("", false) => power,
                ("-", false) => format!("-{power}"),
                (_, false) => format!("{coefficient}*{power}"),
            };
            pieces.push(piece);
        }
        if pieces.is_empty() {
            return write!(f, "0 + O(h^{})", fmt_end(self.end_half_exponent()));
        }
        let mut out = pieces[0].clone();
        for piece in &pieces[1..] {
            match piece.strip_prefix('-') {
                Some(rest) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                None => {
                    out.push_str(" + ");
                    out.push_str(piece);
                }
            }
        }
        write!(f, "{out}")
    }
}

fn fmt_end(half: i64) -> String {
    if half % 2 == 0 {
        format!("{}", half / 2)
    } else {
        format!("({half}/2)")
    }
}

impl Default for HalfPowerSeries {
    fn default() -> Self {
        Self::zero(0, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use proptest::prelude::*;

    fn series(base: i64, values: &[(i64, i64)]) -> HalfPowerSeries {
        HalfPowerSeries {
            base_half_exponent: base,
            coeffs: values
                .iter()
                .map(|&(p, q)| ExactCoeff::pi(rat(p, q)))
                .collect(),
        }
    }

    #[test]
    fn addition_aligns_and_truncates() {
        let a = series(2, &[(1, 1), (0, 1), (1, 2)]); // h + 1/2 h^2, known to h^(5/2)
        let b = series(3, &[(1, 1), (1, 1), (1, 1), (1, 1)]); // known to h^(7/2)
        let s = a.add(&b);
        assert_eq!(s.base_half_exponent, 2);
        assert_eq!(s.end_half_exponent(), 5);
        assert_eq!(s.coeff_at(2), Some(ExactCoeff::pi(int(1))));
        assert_eq!(s.coeff_at(3), Some(ExactCoeff::pi(int(1))));
        assert_eq!(s.coeff_at(4), Some(ExactCoeff::pi(rat(3, 2))));
        assert_eq!(s.coeff_at(5), None);
        assert_eq!(s.coeff_at(1), Some(ExactCoeff::zero()));
    }

    #[test]
    fn display_forms() {
        let s = series(2, &[(2, 1), (0, 1), (1, 8), (0, 1), (3, 128)]);
        assert_eq!(s.to_string(), "2*pi*h + 1/8*pi*h^2 + 3/128*pi*h^3");
        let t = HalfPowerSeries {
            base_half_exponent: 3,
            coeffs: vec![ExactCoeff::sqrt2(rat(8, 3)), ExactCoeff::pi(rat(-1, 1))],
        };
        assert_eq!(t.to_string(), "8/3*sqrt2*h^(3/2) - pi*h^2");
    }

    fn arb_series() -> impl Strategy<Value = HalfPowerSeries> {
        (0i64..4, prop::collection::vec((-20i64..20, 1i64..9, -20i64..20), 1..8)).prop_map(
            |(base, parts)| HalfPowerSeries {
                base_half_exponent: base,
                coeffs: parts
                    .into_iter()
                    .map(|(a, d, c)| ExactCoeff::new(rat(a, d), rat(c, d + 1), rat(a - c, d)))
                    .collect(),
            },
        )
    }

    proptest! {
        #[test]
        fn addition_is_commutative_and_associative(a in arb_series(), b in arb_series(), c in arb_series()) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        }

        #[test]
        fn scaling_distributes(a in arb_series(), b in arb_series(), p in -9i64..9, q in 1i64..9) {
            let f = rat(p, q);
            prop_assert_eq!(a.add(&b).scale(&f), a.scale(&f).add(&b.scale(&f)));
            prop_assert!(a.sub(&a).is_zero());
        }
    }
}
