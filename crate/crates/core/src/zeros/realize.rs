//! Perturbations whose Melnikov function has a prescribed set of simple
//! zeros, one more than the bound would allow being impossible.
//!
//! The controlled coefficients `B_k` are chosen so that the truncated
//! expansion vanishes at the requested locations (a generalized Vandermonde
//! nullspace, solved exactly), then mapped back through the Jacobian and the
//! canonical-form map to trigonometric coefficients. If the truncation tail
//! is too large to trust the sign pattern, the free parameters are refined
//! by collocating the quadrature-evaluated `M(h)` at the same locations.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::bound::{max_zero_bound, BoundQuery};
use super::params::LadderParams;
use super::sign::{count_sign_changes, Bracket, SignChangeReport};
use crate::error::{Error, Result};
use crate::exact::{
    format_rational, int, rational_from_f64, rational_from_f64_sig, round_significant, to_f64,
    ExactCoeff, Irrational, Rational,
};
use crate::linalg::{solve_f64, Matrix};
use crate::melnikov::{
    cos_basis_to_cos_powers, CoefficientTable, Family, FamilyParams, Perturbation,
    PerturbationDoc, PiecewisePerturbation, SmoothPerturbation,
};
use crate::quadrature::quad_melnikov;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizeOptions {
    /// Relative quadrature tolerance.
    pub tol: f64,
    /// Validation grid size.
    pub grid: usize,
    /// Extra integer orders used to estimate the truncation tail.
    pub tail_order: usize,
}

impl Default for RealizeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            grid: 64,
            tail_order: 12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealizationMethod {
    /// Exact interpolation of the truncated expansion.
    Interpolation,
    /// Interpolation followed by collocation of the full `M(h)`.
    Collocation,
}

/// Truncated polynomial against tail estimate at one lattice point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginPoint {
    pub h: f64,
    pub truncated: f64,
    pub tail: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginCheck {
    pub points: Vec<MarginPoint>,
    /// Every `|tail| < |truncated| / 2` and the truncated signs alternate.
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedValue {
    pub element: String,
    #[serde(with = "crate::exact::rational_str")]
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub schema_version: u32,
    pub query: BoundQuery,
    pub target: usize,
    pub locations: Vec<f64>,
    pub method: RealizationMethod,
    /// Free parameters (canonical coefficients).
    pub parameters: Vec<NamedValue>,
    /// Coefficients of the symmetry-reduced combination.
    pub inputs: Vec<NamedValue>,
    pub perturbation: PerturbationDoc,
    pub margin: MarginCheck,
    pub epsilon0: f64,
    pub validation_interval: (f64, f64),
    pub zeros: Vec<Bracket>,
}

impl Realization {
    pub fn perturbation(&self) -> Result<Perturbation> {
        self.perturbation.clone().into_perturbation()
    }

    /// Largest relative distance between a requested location and the
    /// verified zero nearest to it.
    pub fn max_location_error(&self) -> f64 {
        self.locations
            .iter()
            .map(|&h| {
                self.zeros
                    .iter()
                    .map(|b| (b.mid() - h).abs() / h)
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
}

struct Layout {
    ladders: Vec<LadderParams>,
    /// `(ladder, column within ladder)` per global column.
    columns: Vec<(usize, usize)>,
    /// Sorted controlled exponents with their ladder.
    rows: Vec<(i64, usize)>,
}

impl Layout {
    fn new(params: FamilyParams) -> Result<Self> {
        let ladders = params
            .ladders()
            .into_iter()
            .map(|l| LadderParams::new(params.family, l))
            .collect::<Result<Vec<_>>>()?;
        let mut columns = Vec::new();
        let mut rows = Vec::new();
        for (k, lp) in ladders.iter().enumerate() {
            columns.extend((0..lp.elements.len()).map(|c| (k, c)));
            rows.extend(lp.exponents.iter().map(|&e| (e, k)));
        }
        rows.sort();
        Ok(Self { ladders, columns, rows })
    }

    /// Jacobian over all ladders, rows in exponent order.
    fn jacobian(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows.len(), self.columns.len());
        for (r, &(e, k)) in self.rows.iter().enumerate() {
            for (c, &(kc, col)) in self.columns.iter().enumerate() {
                if kc == k {
                    let lp = &self.ladders[k];
                    m.set(r, c, lp.entry(&lp.elements[col], e));
                }
            }
        }
        m
    }

    fn element_names(&self) -> Vec<String> {
        self.columns
            .iter()
            .map(|&(k, c)| self.ladders[k].elements[c].to_string())
            .collect()
    }
}

fn check_locations(locations: &[f64], target: usize) -> Result<()> {
    if locations.len() != target {
        return Err(Error::InvalidArgument(format!(
            "the bound is {target}, so exactly {target} locations are needed (got {})",
            locations.len()
        )));
    }
    if locations.iter().any(|&h| !(h > 0.0 && h <= 0.2)) {
        return Err(Error::InvalidArgument("locations must lie in (0, 0.2]".to_string()));
    }
    if locations.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "locations must be strictly increasing".to_string(),
        ));
    }
    Ok(())
}

/// Coefficients `β_k` of `Σ β_k t^{d_k}` vanishing at every node.
fn interpolate(layout: &Layout, locations: &[f64]) -> Result<Vec<Rational>> {
    let e0 = layout.rows[0].0;
    let integer_powers = layout.rows.iter().all(|(e, _)| (e - e0) % 2 == 0);
    let (nodes, powers): (Vec<Rational>, Vec<usize>) = if integer_powers {
        (
            locations.iter().map(|&h| rational_from_f64(h, 15)).collect(),
            layout.rows.iter().map(|(e, _)| ((e - e0) / 2) as usize).collect(),
        )
    } else {
        (
            locations.iter().map(|&h| rational_from_f64_sig(h.sqrt(), 16)).collect(),
            layout.rows.iter().map(|(e, _)| (e - e0) as usize).collect(),
        )
    };
    let size = layout.rows.len();
    if nodes.is_empty() {
        let mut beta = vec![Rational::zero(); size];
        beta[0] = int(1);
        return Ok(beta);
    }
    let v = Matrix::from_rows(
        nodes
            .iter()
            .map(|t| powers.iter().map(|&p| num_traits::pow(t.clone(), p)).collect())
            .collect(),
    );
    let kernel = v.nullspace();
    if kernel.len() != 1 {
        return Err(Error::Validation(format!(
            "interpolation nullspace has dimension {}, expected 1",
            kernel.len()
        )));
    }
    let mut beta = kernel.into_iter().next().expect("one vector");
    // Positive leading coefficient.
    if let Some(first) = beta.iter().find(|b| !b.is_zero()) {
        if first.is_negative() {
            beta.iter_mut().for_each(|b| *b = -b.clone());
        }
    }
    Ok(beta)
}

/// Rational stand-in for a generator when two generators mix.
fn generator_value(g: Irrational) -> Rational {
    match g {
        Irrational::Pi => ExactCoeff::pi(int(1)).approx_rational(40),
        Irrational::Sqrt2 => ExactCoeff::sqrt2(int(1)).approx_rational(40),
        Irrational::One => int(1),
    }
}

fn solve_parameters(layout: &Layout, beta: &[Rational]) -> Result<Vec<Rational>> {
    let mixed = layout.ladders.len() > 1;
    let b: Vec<Rational> = layout
        .rows
        .iter()
        .zip(beta)
        .map(|(&(_, k), v)| {
            if mixed {
                v / generator_value(layout.ladders[k].generator)
            } else {
                v.clone()
            }
        })
        .collect();
    layout
        .jacobian()
        .solve(&b)
        .ok_or_else(|| Error::Validation("Jacobian of the leading coefficients is singular".to_string()))
}

/// Inputs per ladder from the free parameters, scaled so the largest input
/// has magnitude one and rounded to 18 significant digits.
fn inputs_from_parameters(layout: &Layout, params: &[Rational]) -> Result<Vec<Vec<Rational>>> {
    let mut out = Vec::new();
    for (k, lp) in layout.ladders.iter().enumerate() {
        let local: Vec<Rational> = layout
            .columns
            .iter()
            .zip(params)
            .filter(|((kc, _), _)| *kc == k)
            .map(|(_, v)| v.clone())
            .collect();
        let x = lp
            .map
            .right_solve(&local)
            .ok_or_else(|| Error::Validation("canonical map is not surjective".to_string()))?;
        out.push(x);
    }
    let largest = out
        .iter()
        .flatten()
        .map(|v| v.abs())
        .fold(Rational::zero(), |a, b| if b > a { b } else { a });
    if largest.is_zero() {
        return Err(Error::Validation("realized perturbation is zero".to_string()));
    }
    Ok(out
        .into_iter()
        .map(|xs| xs.iter().map(|v| round_significant(&(v / &largest), 18)).collect())
        .collect())
}

fn build_perturbation(params: FamilyParams, layout: &Layout, inputs: &[Vec<Rational>]) -> Result<Perturbation> {
    let n = params.n;
    let powers = (params.s_top - params.s1 + 1) as usize;
    let mut table = CoefficientTable::zeros(n, powers);
    for (lp, xs) in layout.ladders.iter().zip(inputs) {
        let l = lp.ladder;
        for b in 0..l.blocks {
            let start = (b * (n + 1)) as usize;
            let ctilde = &xs[start..start + n as usize + 1];
            let column = (l.power(b) - params.s1) as usize;
            for (i, a) in cos_basis_to_cos_powers(ctilde).into_iter().enumerate() {
                table.a[i][column] = a;
            }
        }
    }
    Ok(match params.family {
        Family::Smooth => Perturbation::Smooth(SmoothPerturbation::new(n, params.s1, params.s_top, table)?),
        Family::Piecewise => Perturbation::Piecewise(PiecewisePerturbation::new(
            n,
            params.s1,
            params.s_top,
            params.s_top,
            table,
            CoefficientTable::zeros(n, powers),
        )?),
    })
}

fn sign_lattice(locations: &[f64], epsilon0: f64) -> Vec<f64> {
    if locations.is_empty() {
        return vec![0.5 * epsilon0, epsilon0];
    }
    let mut pts = vec![0.5 * locations[0]];
    pts.extend(locations.windows(2).map(|w| (w[0] * w[1]).sqrt()));
    pts.push(epsilon0);
    pts
}

fn margin_check(p: &Perturbation, layout: &Layout, lattice: &[f64], tail_order: usize) -> MarginCheck {
    let combination = p.assemble();
    let base = combination.params.base_half_exponent();
    let last = layout.rows.last().map_or(base, |r| r.0);
    let series = combination.series_window(base, last + 1 + 2 * tail_order as i64);
    let truncated = series.reframe(base, last + 1);
    let tail = series.reframe(last + 1, series.end_half_exponent());
    let points: Vec<MarginPoint> = lattice
        .iter()
        .map(|&h| MarginPoint {
            h,
            truncated: truncated.eval_f64(h),
            tail: tail.eval_f64(h),
        })
        .collect();
    let bounded = points.iter().all(|q| q.tail.abs() < 0.5 * q.truncated.abs());
    let alternating = points
        .windows(2)
        .all(|w| (w[0].truncated > 0.0) != (w[1].truncated > 0.0));
    MarginCheck {
        points,
        ok: bounded && alternating,
    }
}

fn collocate(layout: &Layout, locations: &[f64], start: &[Rational], tol: f64) -> Result<Vec<Rational>> {
    let size = layout.columns.len();
    let phi: Vec<Vec<f64>> = locations
        .iter()
        .map(|&h| {
            layout
                .columns
                .iter()
                .map(|&(k, c)| Ok(layout.ladders[k].elements[c].quad(h, tol)?.value))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let start: Vec<f64> = start.iter().map(to_f64).collect();
    let scale: Vec<f64> = (0..size)
        .map(|c| phi.iter().map(|row| row[c].abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE))
        .collect();
    let fixed = (0..size)
        .max_by(|&a, &b| (start[a].abs() * scale[a]).total_cmp(&(start[b].abs() * scale[b])))
        .expect("at least one parameter");
    let free: Vec<usize> = (0..size).filter(|&c| c != fixed).collect();
    let a: Vec<Vec<f64>> = phi
        .iter()
        .map(|row| free.iter().map(|&c| row[c] / scale[c]).collect())
        .collect();
    let b: Vec<f64> = phi.iter().map(|row| -row[fixed] * start[fixed]).collect();
    let y = solve_f64(a, b).ok_or_else(|| Error::Validation("collocation system is singular".to_string()))?;
    let mut out = vec![Rational::zero(); size];
    out[fixed] = rational_from_f64_sig(start[fixed], 16);
    for (&c, v) in free.iter().zip(y) {
        out[c] = rational_from_f64_sig(v / scale[c], 16);
    }
    Ok(out)
}

fn validate(p: &Perturbation, a: f64, b: f64, opts: &RealizeOptions) -> Result<SignChangeReport> {
    count_sign_changes(|h| quad_melnikov(p, h, opts.tol), a, b, opts.grid)
}

fn accept(report: &SignChangeReport, locations: &[f64]) -> bool {
    report.count == locations.len()
        && report.is_clean()
        && report
            .brackets
            .iter()
            .zip(locations)
            .all(|(br, &h)| (br.mid() - h).abs() <= 0.05 * h)
}

/// Builds and validates a perturbation whose `M(h)` has simple zeros at
/// `locations`, as many as the bound allows.
pub fn realize_zeros(q: &BoundQuery, locations: &[f64], opts: &RealizeOptions) -> Result<Realization> {
    let target = max_zero_bound(q)? as usize;
    check_locations(locations, target)?;
    let params = q.family_params();
    let layout = Layout::new(params)?;
    let epsilon0 = locations.last().map_or(0.2, |h| 2.0 * h);
    let lower = locations.first().map_or(epsilon0, |&h| h.min(epsilon0)) / 20.0;
    let lattice = sign_lattice(locations, epsilon0);

    let beta = interpolate(&layout, locations)?;
    let mut parameters = solve_parameters(&layout, &beta)?;
    let mut inputs = inputs_from_parameters(&layout, &parameters)?;
    let mut perturbation = build_perturbation(params, &layout, &inputs)?;
    let mut margin = margin_check(&perturbation, &layout, &lattice, opts.tail_order);
    let mut method = RealizationMethod::Interpolation;
    let mut report = None;
    if margin.ok {
        let r = validate(&perturbation, lower, epsilon0, opts)?;
        if accept(&r, locations) {
            report = Some(r);
        }
    }
    if report.is_none() && !locations.is_empty() {
        method = RealizationMethod::Collocation;
        parameters = collocate(&layout, locations, &parameters, opts.tol)?;
        inputs = inputs_from_parameters(&layout, &parameters)?;
        perturbation = build_perturbation(params, &layout, &inputs)?;
        margin = margin_check(&perturbation, &layout, &lattice, opts.tail_order);
        report = Some(validate(&perturbation, lower, epsilon0, opts)?);
    }
    let report = match report {
        Some(r) => r,
        None => validate(&perturbation, lower, epsilon0, opts)?,
    };
    if report.count != target || !report.is_clean() {
        return Err(Error::Validation(format!(
            "found {} sign changes of M on [{lower:.3e}, {epsilon0}] (expected {target}, {} indeterminate points); \
             spread the locations further apart",
            report.count,
            report.indeterminate.len()
        )));
    }

    // Parameters of the final perturbation, recomputed from its inputs.
    let mut final_params = Vec::new();
    for (lp, xs) in layout.ladders.iter().zip(&inputs) {
        final_params.extend(lp.map.mul_vec(xs));
    }
    let names = layout.element_names();
    let mut input_names = Vec::new();
    for lp in &layout.ladders {
        input_names.extend(lp.inputs.iter().map(|e| e.to_string()));
    }
    Ok(Realization {
        schema_version: crate::SCHEMA_VERSION,
        query: *q,
        target,
        locations: locations.to_vec(),
        method,
        parameters: names
            .into_iter()
            .zip(final_params)
            .map(|(element, value)| NamedValue { element, value })
            .collect(),
        inputs: input_names
            .into_iter()
            .zip(inputs.into_iter().flatten())
            .map(|(element, value)| NamedValue { element, value })
            .collect(),
        perturbation: PerturbationDoc::from(&perturbation),
        margin,
        epsilon0,
        validation_interval: (lower, epsilon0),
        zeros: report.brackets,
    })
}

/// `"p/q"` rendering of the parameters, for reports.
pub fn describe(values: &[NamedValue]) -> Vec<String> {
    values
        .iter()
        .map(|v| format!("{} = {}", v.element, format_rational(&v.value)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(q: BoundQuery, locations: &[f64]) -> Realization {
        let r = realize_zeros(&q, locations, &RealizeOptions::default()).unwrap();
        eprintln!("{q:?}: {:?} margin {} zeros {:?}", r.method, r.margin.ok, r.zeros);
        assert_eq!(r.zeros.len(), locations.len());
        r
    }

    #[test]
    fn one_zero_smooth() {
        let r = run(BoundQuery::Smooth { n: 0, m: 2 }, &[0.05]);
        assert!(r.max_location_error() < 0.05);
    }

    #[test]
    fn three_zeros_smooth() {
        run(BoundQuery::Smooth { n: 1, m: 2 }, &[0.02, 0.06, 0.12]);
    }

    #[test]
    fn two_zeros_degree_zero() {
        run(BoundQuery::Smooth { n: 0, m: 3 }, &[0.04, 0.12]);
    }

    #[test]
    fn three_zeros_piecewise() {
        run(BoundQuery::Piecewise { n: 1, s1: 1, s_hat: 2 }, &[0.02, 0.06, 0.12]);
    }

    #[test]
    fn wrong_count_is_rejected() {
        let q = BoundQuery::Smooth { n: 1, m: 2 };
        assert!(realize_zeros(&q, &[0.02, 0.06], &RealizeOptions::default()).is_err());
        assert!(realize_zeros(&q, &[0.06, 0.02, 0.1], &RealizeOptions::default()).is_err());
    }
}
