//! Globally adaptive Gauss–Legendre integration.
//!
//! Each panel is integrated with the 10- and 20-point rules; the difference
//! is the panel's error estimate and the panel with the largest estimate is
//! bisected until the total estimate meets the tolerance.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

/// Value of an integral together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadResult {
    pub fn exact_zero() -> Self {
        Self {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        }
    }

    pub fn scale(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            abs_error_estimate: self.abs_error_estimate * factor.abs(),
            ..self
        }
    }

    /// Sum of two independent estimates.
    pub fn combine(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            abs_error_estimate: self.abs_error_estimate + other.abs_error_estimate,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }

    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            self.abs_error_estimate
        } else {
            self.abs_error_estimate / self.value.abs()
        }
    }
}

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn legendre_rule(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=n {
                let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[k] = -x;
        nodes[n - 1 - k] = x;
        weights[k] = w;
        weights[n - 1 - k] = w;
    }
    Rule { nodes, weights }
}

fn rules() -> &'static (Rule, Rule) {
    static RULES: OnceLock<(Rule, Rule)> = OnceLock::new();
    RULES.get_or_init(|| (legendre_rule(10), legendre_rule(20)))
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    abs_value: f64,
    error: f64,
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let (low, high) = rules();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let apply = |rule: &Rule| {
        let mut sum = 0.0;
        let mut abs_sum = 0.0;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let v = f(mid + half * x);
            sum += w * v;
            abs_sum += w * v.abs();
        }
        (sum * half, abs_sum * half.abs())
    };
    let (coarse, _) = apply(low);
    let (fine, abs_fine) = apply(high);
    // Round-off floor: no estimate is trusted below a few ulps of |f|.
    let error = (fine - coarse).abs().max(50.0 * f64::EPSILON * abs_fine);
    Panel {
        a,
        b,
        value: fine,
        abs_value: abs_fine,
        error,
    }
}

/// Evaluations per panel (both rules).
const PANEL_COST: usize = 30;

/// Integrates `f` over `[a, b]`.
///
/// Converges once the summed error estimate is at most
/// `max(abs_tol, rel_tol · ∫|f|)`. Measuring relative error against `∫|f|`
/// rather than `|∫f|` keeps integrals that cancel to zero well posed.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> QuadResult {
    integrate_split(f, a, b, 1, rel_tol, abs_tol)
}

/// As [`integrate`], starting from `pieces` equal panels.
pub fn integrate_split<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    pieces: usize,
    rel_tol: f64,
    abs_tol: f64,
) -> QuadResult {
    const MAX_PANELS: usize = 4000;
    let pieces = pieces.max(1);
    let width = (b - a) / pieces as f64;
    let mut panels: Vec<Panel> = (0..pieces)
        .map(|p| {
            let lo = a + width * p as f64;
            let hi = if p + 1 == pieces { b } else { lo + width };
            panel(&f, lo, hi)
        })
        .collect();
    let mut evaluations = PANEL_COST * pieces;
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let abs_value: f64 = panels.iter().map(|p| p.abs_value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let target = abs_tol.max(rel_tol * abs_value);
        let floor = panels.iter().all(|p| p.error <= 50.0 * f64::EPSILON * p.abs_value * 1.000001);
        if error <= target || floor || panels.len() >= MAX_PANELS {
            return QuadResult {
                value,
                abs_error_estimate: error,
                evaluations,
                converged: error <= target || floor,
            };
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(k, _)| k)
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            return QuadResult {
                value,
                abs_error_estimate: error,
                evaluations,
                converged: false,
            };
        }
        panels.push(panel(&f, p.a, mid));
        panels.push(panel(&f, mid, p.b));
        evaluations += 2 * PANEL_COST;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_weights_sum_to_two() {
        let (low, high) = rules();
        for rule in [low, high] {
            let s: f64 = rule.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn polynomials_are_exact() {
        let r = integrate(|x| x.powi(19) + 3.0 * x * x, 0.0, 1.0, 1e-14, 0.0);
        assert!((r.value - 1.05).abs() < 1e-14);
        assert!(r.converged);
    }

    #[test]
    fn endpoint_square_root_behaviour() {
        let r = integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-12, 0.0);
        assert!((r.value - 2.0 / 3.0).abs() < 1e-11, "{r:?}");
        assert!(r.converged);
    }

    #[test]
    fn cancelling_integral_converges() {
        let r = integrate(|x: f64| x.sin(), -2.0, 2.0, 1e-12, 0.0);
        assert!(r.value.abs() <= r.abs_error_estimate);
        assert!(r.converged);
    }
}
