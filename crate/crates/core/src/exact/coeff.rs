use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::constants::{pi_scaled, sqrt2_scaled};
use super::{format_rational, parse_rational, Rational};
use crate::error::{Error, Result};

/// The irrational generators of the coefficient field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Irrational {
    Pi,
    Sqrt2,
    One,
}

/// An exact number `a·π + b·√2 + c` with rational `a`, `b`, `c`.
///
/// Since π, √2 and 1 are linearly independent over the rationals, equality
/// and zero tests are componentwise and exact.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ExactCoeff {
    pub pi_part: Rational,
    pub rt2_part: Rational,
    pub unit_part: Rational,
}

impl ExactCoeff {
    pub fn new(pi_part: Rational, rt2_part: Rational, unit_part: Rational) -> Self {
        Self {
            pi_part,
            rt2_part,
            unit_part,
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn pi(a: Rational) -> Self {
        Self::new(a, Rational::zero(), Rational::zero())
    }

    pub fn sqrt2(b: Rational) -> Self {
        Self::new(Rational::zero(), b, Rational::zero())
    }

    pub fn rational(c: Rational) -> Self {
        Self::new(Rational::zero(), Rational::zero(), c)
    }

    pub fn is_zero(&self) -> bool {
        self.pi_part.is_zero() && self.rt2_part.is_zero() && self.unit_part.is_zero()
    }

    pub fn part(&self, generator: Irrational) -> &Rational {
        match generator {
            Irrational::Pi => &self.pi_part,
            Irrational::Sqrt2 => &self.rt2_part,
            Irrational::One => &self.unit_part,
        }
    }

    /// The single generator this value is a rational multiple of, if any.
    /// Zero reports `None`.
    pub fn pure_generator(&self) -> Option<Irrational> {
        let parts = [
            (Irrational::Pi, &self.pi_part),
            (Irrational::Sqrt2, &self.rt2_part),
            (Irrational::One, &self.unit_part),
        ];
        let mut nonzero = parts.iter().filter(|(_, v)| !v.is_zero());
        let first = nonzero.next()?;
        if nonzero.next().is_some() {
            None
        } else {
            Some(first.0)
        }
    }

    /// The rational `q` with `self = q · generator`, when the value lies on
    /// that one-dimensional subspace (zero lies on all of them).
    pub fn as_multiple_of(&self, generator: Irrational) -> Option<Rational> {
        let others_zero = match generator {
            Irrational::Pi => self.rt2_part.is_zero() && self.unit_part.is_zero(),
            Irrational::Sqrt2 => self.pi_part.is_zero() && self.unit_part.is_zero(),
            Irrational::One => self.pi_part.is_zero() && self.rt2_part.is_zero(),
        };
        others_zero.then(|| self.part(generator).clone())
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self::new(
            &self.pi_part * factor,
            &self.rt2_part * factor,
            &self.unit_part * factor,
        )
    }

    pub fn to_f64(&self) -> f64 {
        use std::f64::consts::{PI, SQRT_2};
        super::to_f64(&self.pi_part) * PI
            + super::to_f64(&self.rt2_part) * SQRT_2
            + super::to_f64(&self.unit_part)
    }

    fn guard_digits(&self) -> u32 {
        let magnitude = |r: &Rational| -> u32 {
            if r.is_zero() {
                0
            } else {
                let bits = r.numer().bits() as i64 - r.denom().bits() as i64;
                (bits.max(0) as f64 * std::f64::consts::LOG10_2).ceil() as u32
            }
        };
        12 + magnitude(&self.pi_part).max(magnitude(&self.rt2_part))
    }

    /// Rational approximation within `10^-digits` of the exact value.
    pub fn approx_rational(&self, digits: u32) -> Rational {
        let p = digits + self.guard_digits();
        let scale = BigInt::from(10).pow(p);
        let pi = Rational::new(pi_scaled(p), scale.clone());
        let rt2 = Rational::new(sqrt2_scaled(p), scale);
        &self.pi_part * pi + &self.rt2_part * rt2 + &self.unit_part
    }

    /// Decimal rendering rounded to `digits` places after the point.
    pub fn to_decimal_string(&self, digits: u32) -> String {
        let scaled = self.approx_rational(digits + 2)
            * Rational::from_integer(BigInt::from(10).pow(digits));
        let rounded = scaled.round().to_integer();
        format_fixed(&rounded, digits)
    }
}

pub(crate) fn format_fixed(mantissa: &BigInt, digits: u32) -> String {
    let negative = mantissa.sign() == Sign::Minus;
    let mut text = mantissa.abs().to_string();
    let digits = digits as usize;
    if digits == 0 {
        return if negative { format!("-{text}") } else { text };
    }
    if text.len() <= digits {
        text = format!("{}{}", "0".repeat(digits + 1 - text.len()), text);
    }
    let (whole, frac) = text.split_at(text.len() - digits);
    format!("{}{whole}.{frac}", if negative { "-" } else { "" })
}

/// Renders a rational multiplier in front of a symbol: `1` and `-1` collapse.
pub(crate) fn format_multiplier(value: &Rational, symbol: &str) -> String {
    if value.is_one() {
        symbol.to_string()
    } else if (-value).is_one() {
        format!("-{symbol}")
    } else {
        format!("{}*{symbol}", format_rational(value))
    }
}

impl fmt::Display for ExactCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pieces: Vec<String> = Vec::new();
        if !self.pi_part.is_zero() {
            pieces.push(format_multiplier(&self.pi_part, "pi"));
        }
        if !self.rt2_part.is_zero() {
            pieces.push(format_multiplier(&self.rt2_part, "sqrt2"));
        }
        if !self.unit_part.is_zero() {
            pieces.push(format_rational(&self.unit_part));
        }
        if pieces.is_empty() {
            return write!(f, "0");
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

impl FromStr for ExactCoeff {
    type Err = Error;

    /// Accepts the `Display` form: `"p/q*pi + r/s*sqrt2 + t/u"` with any
    /// subset of the parts, in any order, joined by `+` or `-`.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty coefficient".into()));
        }
        let mut out = ExactCoeff::zero();
        let mut terms: Vec<String> = Vec::new();
        let mut current = String::new();
        for (idx, ch) in compact.chars().enumerate() {
            let prev = current.chars().last();
            let after_exponent = matches!(prev, Some('e') | Some('E'));
            if (ch == '+' || ch == '-') && idx > 0 && !current.is_empty() && !after_exponent {
                terms.push(std::mem::take(&mut current));
            }
            current.push(ch);
        }
        terms.push(current);
        for term in terms {
            let term = term.strip_prefix('+').unwrap_or(&term).to_string();
            let (negative, body) = match term.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, term.clone()),
            };
            let (value, generator) = if let Some(prefix) = body.strip_suffix("sqrt2") {
                (multiplier(prefix)?, Irrational::Sqrt2)
            } else if let Some(prefix) = body.strip_suffix("pi") {
                (multiplier(prefix)?, Irrational::Pi)
            } else {
                (parse_rational(&body)?, Irrational::One)
            };
            let value = if negative { -value } else { value };
            match generator {
                Irrational::Pi => out.pi_part += value,
                Irrational::Sqrt2 => out.rt2_part += value,
                Irrational::One => out.unit_part += value,
            }
        }
        Ok(out)
    }
}

fn multiplier(prefix: &str) -> Result<Rational> {
    if prefix.is_empty() {
        return Ok(Rational::one());
    }
    let body = prefix
        .strip_suffix('*')
        .ok_or_else(|| Error::Parse(format!("expected '*' before generator in {prefix:?}")))?;
    parse_rational(body)
}

impl Serialize for ExactCoeff {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactCoeff {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl Add for &ExactCoeff {
    type Output = ExactCoeff;
    fn add(self, rhs: &ExactCoeff) -> ExactCoeff {
        ExactCoeff::new(
            &self.pi_part + &rhs.pi_part,
            &self.rt2_part + &rhs.rt2_part,
            &self.unit_part + &rhs.unit_part,
        )
    }
}

impl Add for ExactCoeff {
    type Output = ExactCoeff;
    fn add(self, rhs: ExactCoeff) -> ExactCoeff {
        &self + &rhs
    }
}

impl AddAssign<&ExactCoeff> for ExactCoeff {
    fn add_assign(&mut self, rhs: &ExactCoeff) {
        self.pi_part += &rhs.pi_part;
        self.rt2_part += &rhs.rt2_part;
        self.unit_part += &rhs.unit_part;
    }
}

impl Sub for &ExactCoeff {
    type Output = ExactCoeff;
    fn sub(self, rhs: &ExactCoeff) -> ExactCoeff {
        ExactCoeff::new(
            &self.pi_part - &rhs.pi_part,
            &self.rt2_part - &rhs.rt2_part,
            &self.unit_part - &rhs.unit_part,
        )
    }
}

impl Sub for ExactCoeff {
    type Output = ExactCoeff;
    fn sub(self, rhs: ExactCoeff) -> ExactCoeff {
        &self - &rhs
    }
}

impl SubAssign<&ExactCoeff> for ExactCoeff {
    fn sub_assign(&mut self, rhs: &ExactCoeff) {
        self.pi_part -= &rhs.pi_part;
        self.rt2_part -= &rhs.rt2_part;
        self.unit_part -= &rhs.unit_part;
    }
}

impl Neg for ExactCoeff {
    type Output = ExactCoeff;
    fn neg(self) -> ExactCoeff {
        ExactCoeff::new(-self.pi_part, -self.rt2_part, -self.unit_part)
    }
}
