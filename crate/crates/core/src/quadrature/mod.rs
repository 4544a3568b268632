//! Double-precision oracle for `I_{i,j}(h)`, `J_{i,j}(h)` and full
//! Melnikov integrals along the orbit `H(x, y) = h`.
//!
//! Tolerances are relative: a result converges once its error estimate is
//! below `tol · ∫|integrand|`.

mod gauss;

pub use gauss::{integrate, integrate_split, QuadResult};

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::melnikov::{NumericField, Perturbation};

/// A level `0 < h < 2` of the pendulum Hamiltonian `y²/2 + 1 - cos x`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct EnergyLevel(f64);

impl EnergyLevel {
    pub fn new(h: f64) -> Result<Self> {
        if h > 0.0 && h < 2.0 {
            Ok(Self(h))
        } else {
            Err(Error::EnergyOutOfRange(h))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Orbits this close to the separatrix integrate, but the near-singular
    /// integrands make error estimates less reliable.
    pub fn near_separatrix(self) -> bool {
        self.0 > 1.99
    }
}

/// Right turning point `arccos(1 - h)` of the orbit.
pub fn x_plus(h: f64) -> Result<f64> {
    let h = EnergyLevel::new(h)?.value();
    Ok((1.0 - h).acos())
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")))
    }
}

/// `J_{i,j}(h) = ∫_{Γ_h^+} (1 - cos x)^i y^j dx` over the upper half orbit.
///
/// With `sin(x/2) = √(h/2)·sin θ` the integrand becomes
/// `2^{(j+3)/2} h^{i+(j+1)/2} sin^{2i}θ cos^{j+1}θ (1 - (h/2) sin²θ)^{-1/2}`
/// on `[0, π/2]`, which is analytic for every `h < 2`.
#[allow(non_snake_case)]
pub fn quad_J(i: u32, j: u32, h: f64, tol: f64) -> Result<QuadResult> {
    let h = EnergyLevel::new(h)?.value();
    check_tol(tol)?;
    let prefactor = 2f64.powf((j as f64 + 3.0) / 2.0) * h.powf(i as f64 + (j as f64 + 1.0) / 2.0);
    let integrand = |theta: f64| {
        let (s, c) = theta.sin_cos();
        s.powi(2 * i as i32) * c.powi(j as i32 + 1) / (1.0 - 0.5 * h * s * s).sqrt()
    };
    Ok(integrate(integrand, 0.0, FRAC_PI_2, tol, 0.0).scale(prefactor))
}

/// `I_{i,j}(h) = ∮_{Γ_h} (1 - cos x)^i y^j dx`, clockwise.
///
/// The lower half orbit retraces the upper one with `y → -y` and reversed
/// direction, so `I = (1 - (-1)^j)·J`: twice `J` for odd `j` and
/// identically zero for even `j`.
#[allow(non_snake_case)]
pub fn quad_I(i: u32, j: u32, h: f64, tol: f64) -> Result<QuadResult> {
    if j % 2 == 0 {
        EnergyLevel::new(h)?;
        check_tol(tol)?;
        return Ok(QuadResult::exact_zero());
    }
    Ok(quad_J(i, j, h, tol)?.scale(2.0))
}

/// Upper and lower half-orbit integrals of a field, kept separate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfOrbitIntegrals {
    pub upper: QuadResult,
    pub lower: QuadResult,
}

/// Evaluates `∫_{Γ^+} Q^+ dx + ∫_{Γ^-} Q^- dx` directly, with no symmetry
/// reduction. Both halves are parametrized by `sin(x/2) = √(h/2)·sin φ`,
/// `φ ∈ [-π/2, π/2]`, on which `|y| = √(2h)·cos φ`.
pub fn half_orbit_integrals(field: &NumericField, h: f64, tol: f64) -> Result<HalfOrbitIntegrals> {
    let h = EnergyLevel::new(h)?.value();
    check_tol(tol)?;
    let k = (0.5 * h).sqrt();
    let amplitude = (2.0 * h).sqrt();
    let chart = move |phi: f64| {
        let (s, c) = phi.sin_cos();
        let ks = k * s;
        let x = 2.0 * ks.asin();
        let dx = 2.0 * k * c / (1.0 - ks * ks).sqrt();
        (x, amplitude * c, dx)
    };
    let upper = integrate(
        |phi| {
            let (x, y, dx) = chart(phi);
            field.upper(x, y) * dx
        },
        -FRAC_PI_2,
        FRAC_PI_2,
        tol,
        0.0,
    );
    // Traversed from x_+ back to -x_+ with y < 0.
    let lower = integrate(
        |phi| {
            let (x, y, dx) = chart(phi);
            field.lower(x, -y) * dx
        },
        -FRAC_PI_2,
        FRAC_PI_2,
        tol,
        0.0,
    )
    .scale(-1.0);
    Ok(HalfOrbitIntegrals { upper, lower })
}

/// `M(h)` for a smooth or piecewise perturbation by direct quadrature.
pub fn quad_melnikov(p: &Perturbation, h: f64, tol: f64) -> Result<QuadResult> {
    quad_field(&p.numeric(), h, tol)
}

pub fn quad_field(field: &NumericField, h: f64, tol: f64) -> Result<QuadResult> {
    let halves = half_orbit_integrals(field, h, tol)?;
    let mut total = halves.upper.combine(halves.lower);
    // The sum of two nearly equal halves loses a few ulps of their size.
    total.abs_error_estimate +=
        4.0 * f64::EPSILON * (halves.upper.value.abs() + halves.lower.value.abs());
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const TOL: f64 = 1e-12;

    #[test]
    fn turning_point() {
        assert!((x_plus(1.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((x_plus(0.5).unwrap() - PI / 3.0).abs() < 1e-15);
        assert!(x_plus(1e-12).unwrap() < 2e-6);
        assert!(x_plus(0.0).is_err());
        assert!(x_plus(2.0).is_err());
    }

    #[test]
    fn small_orbit_area() {
        for h in [0.001, 0.01] {
            let v = quad_I(0, 1, h, TOL).unwrap().value;
            assert!((v / (2.0 * PI * h) - 1.0).abs() <= 2.0 * h);
        }
        let v = quad_I(0, 3, 0.01, TOL).unwrap().value;
        assert!((v / (3.0 * PI * 1e-4) - 1.0).abs() < 0.01);
    }

    #[test]
    fn separatrix_limit() {
        let r = quad_I(0, 1, 1.999, TOL).unwrap();
        assert!((r.value / 16.0 - 1.0).abs() < 0.005, "{r:?}");
    }

    #[test]
    fn half_orbit_integrals_of_even_powers() {
        let v = quad_J(0, 2, 0.01, TOL).unwrap().value;
        let expected = 8.0 * 2f64.sqrt() / 3.0 * 1e-3;
        assert!((v / expected - 1.0).abs() < 0.01);
        let i = quad_I(1, 1, 0.5, TOL).unwrap();
        let j = quad_J(1, 1, 0.5, TOL).unwrap();
        assert!((j.value - i.value / 2.0).abs() <= 10.0 * TOL * i.value);
    }

    #[test]
    fn leading_exponent_of_j32() {
        let a = quad_J(3, 2, 0.01, TOL).unwrap().value;
        let b = quad_J(3, 2, 0.02, TOL).unwrap().value;
        let slope = (b / a).ln() / 2f64.ln();
        assert!((slope - 4.5).abs() < 0.05, "{slope}");
    }

    #[test]
    fn even_power_closed_orbit_integral_vanishes() {
        assert_eq!(quad_I(2, 4, 0.3, TOL).unwrap().value, 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(quad_J(0, 1, 2.5, TOL).is_err());
        assert!(quad_J(0, 1, 0.5, 0.0).is_err());
    }
}
