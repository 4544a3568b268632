use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::QuadResult;

/// A sign change of the evaluator located to a narrow bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    /// Bisection stopped early because the midpoint value fell below
    /// its own error estimate.
    pub noise_limited: bool,
}

impl Bracket {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn relative_width(&self) -> f64 {
        (self.hi - self.lo) / self.lo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignChangeReport {
    pub count: usize,
    pub brackets: Vec<Bracket>,
    /// Grid points where `|value| < 10 · error estimate`.
    pub indeterminate: Vec<f64>,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl SignChangeReport {
    /// No indeterminate sign anywhere on the grid.
    pub fn is_clean(&self) -> bool {
        self.indeterminate.is_empty() && self.brackets.iter().all(|b| !b.noise_limited)
    }
}

/// `grid` points from `a` to `b`, geometrically spaced so they crowd
/// towards zero.
pub fn geometric_grid(a: f64, b: f64, grid: usize) -> Vec<f64> {
    let ratio = (b / a).ln();
    (0..grid)
        .map(|k| {
            if k + 1 == grid {
                b
            } else {
                a * (ratio * k as f64 / (grid - 1) as f64).exp()
            }
        })
        .collect()
}

/// Relative bracket width targeted by the bisection.
pub const BRACKET_WIDTH: f64 = 1e-6;

fn sign(r: &QuadResult) -> Option<bool> {
    if r.value.abs() < 10.0 * r.abs_error_estimate || r.value == 0.0 {
        None
    } else {
        Some(r.value > 0.0)
    }
}

/// Counts sign changes of `f` on a geometric grid over `[a, b]` and refines
/// each one by bisection. Points whose sign is hidden in the quadrature
/// noise are reported, never guessed.
pub fn count_sign_changes<F>(f: F, a: f64, b: f64, grid: usize) -> Result<SignChangeReport>
where
    F: Fn(f64) -> Result<QuadResult> + Sync,
{
    if grid < 16 {
        return Err(Error::InvalidArgument(format!("grid needs at least 16 points, got {grid}")));
    }
    if !(a > 0.0 && b > a && b < 2.0) {
        return Err(Error::InvalidArgument(format!(
            "interval [{a}, {b}] must lie inside (0, 2)"
        )));
    }
    let points = geometric_grid(a, b, grid);
    let results: Vec<QuadResult> = points
        .par_iter()
        .map(|&h| f(h))
        .collect::<Result<_>>()?;
    let signs: Vec<Option<bool>> = results.iter().map(sign).collect();
    let indeterminate = points
        .iter()
        .zip(&signs)
        .filter(|(_, s)| s.is_none())
        .map(|(h, _)| *h)
        .collect();

    let mut pending = Vec::new();
    let mut last: Option<(f64, bool)> = None;
    for (&h, s) in points.iter().zip(&signs) {
        if let Some(s) = *s {
            if let Some((h0, s0)) = last {
                if s0 != s {
                    pending.push((h0, h, s0));
                }
            }
            last = Some((h, s));
        }
    }
    let brackets = pending
        .par_iter()
        .map(|&(lo, hi, s_lo)| bisect(&f, lo, hi, s_lo))
        .collect::<Result<Vec<_>>>()?;
    Ok(SignChangeReport {
        count: brackets.len(),
        brackets,
        indeterminate,
        grid: points,
        values: results.iter().map(|r| r.value).collect(),
    })
}

fn bisect<F: Fn(f64) -> Result<QuadResult>>(f: &F, mut lo: f64, mut hi: f64, s_lo: bool) -> Result<Bracket> {
    while (hi - lo) > BRACKET_WIDTH * lo {
        let mid = 0.5 * (lo + hi);
        match sign(&f(mid)?) {
            Some(s) if s == s_lo => lo = mid,
            Some(_) => hi = mid,
            None => {
                return Ok(Bracket {
                    lo,
                    hi,
                    noise_limited: true,
                })
            }
        }
    }
    Ok(Bracket {
        lo,
        hi,
        noise_limited: false,
    })
}
