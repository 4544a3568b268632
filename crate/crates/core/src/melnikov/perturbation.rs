use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::trig::{cos_basis_to_cos_powers, TrigPoly};
use crate::error::{Error, Result};
use crate::exact::Rational;

/// How the coefficient tables of a perturbation document are to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrigBasis {
    /// `Σ a_i cos^i x + sin x Σ ã_i cos^i x`.
    #[default]
    CosPower,
    /// `Σ a_i (1-cos x)^i + sin x Σ ã_i (1-cos x)^i`.
    OneMinusCos,
}

/// Coefficient tables `a[i][s - s1]` and `ã[i][s - s1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientTable {
    #[serde(with = "crate::exact::rational_table")]
    pub a: Vec<Vec<Rational>>,
    #[serde(with = "crate::exact::rational_table", default)]
    pub a_tilde: Vec<Vec<Rational>>,
}

impl CoefficientTable {
    pub fn zeros(n: u32, powers: usize) -> Self {
        Self {
            a: vec![vec![Rational::zero(); powers]; n as usize + 1],
            a_tilde: vec![vec![Rational::zero(); powers]; n as usize],
        }
    }

    /// `Q_{n,s}` for the column `s - s1`.
    pub fn poly(&self, column: usize) -> TrigPoly {
        let pick = |rows: &[Vec<Rational>]| {
            rows.iter()
                .map(|row| row.get(column).cloned().unwrap_or_default())
                .collect()
        };
        TrigPoly {
            cos_coeffs: pick(&self.a),
            sin_coeffs: pick(&self.a_tilde),
        }
    }

    pub fn set_poly(&mut self, column: usize, poly: &TrigPoly) {
        for (row, v) in self.a.iter_mut().zip(&poly.cos_coeffs) {
            row[column] = v.clone();
        }
        for (row, v) in self.a_tilde.iter_mut().zip(&poly.sin_coeffs) {
            row[column] = v.clone();
        }
    }

    fn normalize(&mut self, field: &str, n: u32, powers: usize, basis: TrigBasis) -> Result<()> {
        let rows = n as usize + 1;
        if self.a.len() > rows {
            return Err(Error::schema(
                format!("{field}.a"),
                format!("has {} rows but degree n = {n} allows at most {rows}", self.a.len()),
            ));
        }
        if self.a_tilde.len() > n as usize {
            return Err(Error::schema(
                format!("{field}.a_tilde"),
                format!(
                    "has {} rows but degree n = {n} allows at most {n}",
                    self.a_tilde.len()
                ),
            ));
        }
        for (name, table) in [("a", &self.a), ("a_tilde", &self.a_tilde)] {
            for (i, row) in table.iter().enumerate() {
                if row.len() != powers {
                    return Err(Error::schema(
                        format!("{field}.{name}[{i}]"),
                        format!("expected {powers} entries (one per power of y), found {}", row.len()),
                    ));
                }
            }
        }
        self.a.resize(rows, vec![Rational::zero(); powers]);
        self.a_tilde.resize(n as usize, vec![Rational::zero(); powers]);
        if basis == TrigBasis::OneMinusCos {
            for column in 0..powers {
                let mut poly = self.poly(column);
                poly.cos_coeffs = cos_basis_to_cos_powers(&poly.cos_coeffs);
                poly.sin_coeffs = cos_basis_to_cos_powers(&poly.sin_coeffs);
                self.set_poly(column, &poly);
            }
        }
        Ok(())
    }

    fn numeric(&self) -> Vec<(Vec<f64>, Vec<f64>)> {
        let powers = self.a.first().map_or(0, Vec::len);
        (0..powers)
            .map(|col| {
                let p = self.poly(col);
                (
                    p.cos_coeffs.iter().map(crate::exact::to_f64).collect(),
                    p.sin_coeffs.iter().map(crate::exact::to_f64).collect(),
                )
            })
            .collect()
    }
}

/// `Q(x, y) = Σ_{s=s1}^{s2} Q_{n,s}(x) y^s`, one trigonometric polynomial of
/// degree `n` per power of `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothPerturbation {
    pub n: u32,
    pub s1: u32,
    pub s2: u32,
    pub table: CoefficientTable,
}

/// `Q^+` on `y > 0` with powers `s1..=s2`, `Q^-` on `y < 0` with powers
/// `s1..=s3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewisePerturbation {
    pub n: u32,
    pub s1: u32,
    pub s2: u32,
    pub s3: u32,
    pub plus: CoefficientTable,
    pub minus: CoefficientTable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Perturbation {
    Smooth(SmoothPerturbation),
    Piecewise(PiecewisePerturbation),
}

fn check_powers(s1: u32, s2: u32, field: &str) -> Result<usize> {
    if s1 < 1 {
        return Err(Error::schema("s1", "must be >= 1"));
    }
    if s2 < s1 {
        return Err(Error::schema(field, format!("must be >= s1 = {s1}")));
    }
    Ok((s2 - s1 + 1) as usize)
}

impl SmoothPerturbation {
    pub fn new(n: u32, s1: u32, s2: u32, mut table: CoefficientTable) -> Result<Self> {
        let powers = check_powers(s1, s2, "s2")?;
        table.normalize("", n, powers, TrigBasis::CosPower)?;
        Ok(Self { n, s1, s2, table })
    }

    pub fn zero(n: u32, s1: u32, s2: u32) -> Result<Self> {
        let powers = check_powers(s1, s2, "s2")?;
        Ok(Self {
            n,
            s1,
            s2,
            table: CoefficientTable::zeros(n, powers),
        })
    }

    /// `Q_{n,s}`; zero outside `s1..=s2`.
    pub fn poly(&self, s: u32) -> TrigPoly {
        if s < self.s1 || s > self.s2 {
            TrigPoly::zero()
        } else {
            self.table.poly((s - self.s1) as usize)
        }
    }
}

impl PiecewisePerturbation {
    pub fn new(
        n: u32,
        s1: u32,
        s2: u32,
        s3: u32,
        mut plus: CoefficientTable,
        mut minus: CoefficientTable,
    ) -> Result<Self> {
        let plus_powers = check_powers(s1, s2, "s2")?;
        let minus_powers = check_powers(s1, s3, "s3")?;
        plus.normalize("plus", n, plus_powers, TrigBasis::CosPower)?;
        minus.normalize("minus", n, minus_powers, TrigBasis::CosPower)?;
        Ok(Self {
            n,
            s1,
            s2,
            s3,
            plus,
            minus,
        })
    }

    pub fn s_hat(&self) -> u32 {
        self.s2.max(self.s3)
    }

    pub fn plus_poly(&self, s: u32) -> TrigPoly {
        if s < self.s1 || s > self.s2 {
            TrigPoly::zero()
        } else {
            self.plus.poly((s - self.s1) as usize)
        }
    }

    pub fn minus_poly(&self, s: u32) -> TrigPoly {
        if s < self.s1 || s > self.s3 {
            TrigPoly::zero()
        } else {
            self.minus.poly((s - self.s1) as usize)
        }
    }
}

/// Double-precision evaluator for `Q^±(x, y)`.
#[derive(Debug, Clone)]
pub struct NumericField {
    s1: u32,
    plus: Vec<(Vec<f64>, Vec<f64>)>,
    minus: Vec<(Vec<f64>, Vec<f64>)>,
}

fn eval_side(s1: u32, columns: &[(Vec<f64>, Vec<f64>)], x: f64, y: f64) -> f64 {
    let c = x.cos();
    let s = x.sin();
    let mut y_power = y.powi(s1 as i32);
    let mut total = 0.0;
    for (cos_coeffs, sin_coeffs) in columns {
        let even = cos_coeffs.iter().rev().fold(0.0, |acc, a| acc * c + a);
        let odd = sin_coeffs.iter().rev().fold(0.0, |acc, a| acc * c + a);
        total += (even + s * odd) * y_power;
        y_power *= y;
    }
    total
}

impl NumericField {
    /// `Q^+(x, y)`, the field used on the upper half plane.
    pub fn upper(&self, x: f64, y: f64) -> f64 {
        eval_side(self.s1, &self.plus, x, y)
    }

    /// `Q^-(x, y)`, the field used on the lower half plane.
    pub fn lower(&self, x: f64, y: f64) -> f64 {
        eval_side(self.s1, &self.minus, x, y)
    }
}

impl Perturbation {
    pub fn n(&self) -> u32 {
        match self {
            Perturbation::Smooth(p) => p.n,
            Perturbation::Piecewise(p) => p.n,
        }
    }

    pub fn numeric(&self) -> NumericField {
        match self {
            Perturbation::Smooth(p) => {
                let cols = p.table.numeric();
                NumericField {
                    s1: p.s1,
                    plus: cols.clone(),
                    minus: cols,
                }
            }
            Perturbation::Piecewise(p) => NumericField {
                s1: p.s1,
                plus: p.plus.numeric(),
                minus: p.minus.numeric(),
            },
        }
    }

    /// Parses and validates a perturbation document.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PerturbationDoc = serde_json::from_str(text).map_err(|e| Error::Schema {
            field: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        doc.into_perturbation()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PerturbationDoc::from(self)).expect("serializable")
    }
}

/// On-disk form of a perturbation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationDoc {
    pub kind: String,
    pub n: u32,
    pub s1: u32,
    pub s2: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s3: Option<u32>,
    #[serde(default)]
    pub basis: TrigBasis,
    #[serde(
        default,
        with = "crate::exact::rational_table",
        skip_serializing_if = "Vec::is_empty"
    )]
    pub a: Vec<Vec<Rational>>,
    #[serde(
        default,
        with = "crate::exact::rational_table",
        skip_serializing_if = "Vec::is_empty"
    )]
    pub a_tilde: Vec<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plus: Option<CoefficientTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minus: Option<CoefficientTable>,
}

impl PerturbationDoc {
    pub fn into_perturbation(self) -> Result<Perturbation> {
        match self.kind.as_str() {
            "smooth" => {
                if self.s3.is_some() || self.plus.is_some() || self.minus.is_some() {
                    return Err(Error::schema(
                        "kind",
                        "smooth perturbations take a/a_tilde only (no s3, plus, minus)",
                    ));
                }
                let powers = check_powers(self.s1, self.s2, "s2")?;
                let mut table = CoefficientTable {
                    a: self.a,
                    a_tilde: self.a_tilde,
                };
                table.normalize("", self.n, powers, self.basis)?;
                Ok(Perturbation::Smooth(SmoothPerturbation {
                    n: self.n,
                    s1: self.s1,
                    s2: self.s2,
                    table,
                }))
            }
            "piecewise" => {
                let s3 = self.s3.ok_or_else(|| Error::schema("s3", "s3 required"))?;
                if !self.a.is_empty() || !self.a_tilde.is_empty() {
                    return Err(Error::schema(
                        "a",
                        "piecewise perturbations take plus/minus tables instead of a",
                    ));
                }
                let mut plus = self.plus.ok_or_else(|| Error::schema("plus", "plus required"))?;
                let mut minus = self
                    .minus
                    .ok_or_else(|| Error::schema("minus", "minus required"))?;
                let plus_powers = check_powers(self.s1, self.s2, "s2")?;
                let minus_powers = check_powers(self.s1, s3, "s3")?;
                plus.normalize("plus", self.n, plus_powers, self.basis)?;
                minus.normalize("minus", self.n, minus_powers, self.basis)?;
                Ok(Perturbation::Piecewise(PiecewisePerturbation {
                    n: self.n,
                    s1: self.s1,
                    s2: self.s2,
                    s3,
                    plus,
                    minus,
                }))
            }
            other => Err(Error::schema(
                "kind",
                format!("expected \"smooth\" or \"piecewise\", found {other:?}"),
            )),
        }
    }
}

impl From<&Perturbation> for PerturbationDoc {
    fn from(p: &Perturbation) -> Self {
        match p {
            Perturbation::Smooth(p) => PerturbationDoc {
                kind: "smooth".into(),
                n: p.n,
                s1: p.s1,
                s2: p.s2,
                s3: None,
                basis: TrigBasis::CosPower,
                a: p.table.a.clone(),
                a_tilde: p.table.a_tilde.clone(),
                plus: None,
                minus: None,
            },
            Perturbation::Piecewise(p) => PerturbationDoc {
                kind: "piecewise".into(),
                n: p.n,
                s1: p.s1,
                s2: p.s2,
                s3: Some(p.s3),
                basis: TrigBasis::CosPower,
                a: Vec::new(),
                a_tilde: Vec::new(),
                plus: Some(p.plus.clone()),
                minus: Some(p.minus.clone()),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn loads_damping() {
        let p = Perturbation::from_json(r#"{"kind":"smooth","n":0,"s1":1,"s2":1,"a":[["-1"]]}"#)
            .unwrap();
        let Perturbation::Smooth(s) = &p else { panic!() };
        assert_eq!(s.table.a, vec![vec![int(-1)]]);
        assert!(s.table.a_tilde.is_empty());
        assert_eq!(p.numeric().upper(0.3, 2.0), -2.0);
    }

    #[test]
    fn rejects_rows_beyond_degree() {
        let err = Perturbation::from_json(
            r#"{"kind":"smooth","n":0,"s1":1,"s2":1,"a":[["1"],["2"]]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("a"), "{err}");
    }

    #[test]
    fn rejects_piecewise_without_s3() {
        let err = Perturbation::from_json(
            r#"{"kind":"piecewise","n":0,"s1":1,"s2":1,"plus":{"a":[["1"]]},"minus":{"a":[["1"]]}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("s3 required"), "{err}");
    }

    #[test]
    fn rejects_bad_rationals_and_unknown_kinds() {
        assert!(Perturbation::from_json(r#"{"kind":"smooth","n":0,"s1":1,"s2":1,"a":[["1/0"]]}"#).is_err());
        assert!(Perturbation::from_json(r#"{"kind":"wavy","n":0,"s1":1,"s2":1}"#).is_err());
        assert!(Perturbation::from_json(r#"{"kind":"smooth","n":0,"s1":2,"s2":1}"#).is_err());
        assert!(Perturbation::from_json(r#"{"kind":"smooth","n":0,"s1":1,"s2":2,"a":[["1"]]}"#).is_err());
    }

    #[test]
    fn one_minus_cos_basis_is_converted() {
        let p = Perturbation::from_json(
            r#"{"kind":"smooth","n":1,"s1":1,"s2":1,"basis":"one_minus_cos","a":[["0"],["1"]]}"#,
        )
        .unwrap();
        let Perturbation::Smooth(s) = &p else { panic!() };
        // 1 - cos x
        assert_eq!(s.poly(1).cos_coeffs, vec![int(1), int(-1)]);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"kind":"piecewise","n":1,"s1":1,"s2":2,"s3":1,
            "plus":{"a":[["1","2/3"],["0","-1"]],"a_tilde":[["5","0"]]},
            "minus":{"a":[["-1"],["1/2"]]}}"#;
        let p = Perturbation::from_json(text).unwrap();
        assert_eq!(Perturbation::from_json(&p.to_json()).unwrap(), p);
    }
}
