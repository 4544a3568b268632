//! Direct simulation of `x' = y`, `y' = -sin x + ε Q^±(x, y)`.
//!
//! Alongside `(x, y)` the integrator carries `v' = Q·y` and `u' = |Q·y|`.
//! Since `dH/dt = ε Q y`, the energy gained over one return is exactly
//! `ε v`, which is far less sensitive to round-off than differencing two
//! nearly equal energies; `u` gives the scale of the cancellation in `v`.

mod dopri;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::melnikov::{NumericField, Perturbation};
use crate::quadrature::quad_melnikov;
use crate::zeros::{geometric_grid, BRACKET_WIDTH};
use dopri::{attempt, next_step, State, Tolerance};

/// A perturbed pendulum.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub epsilon: f64,
    pub perturbation: Perturbation,
}

impl SystemSpec {
    pub fn new(epsilon: f64, perturbation: Perturbation) -> Result<Self> {
        if !(epsilon.abs() <= 0.1) {
            return Err(Error::InvalidArgument(format!("|epsilon| must be <= 0.1, got {epsilon}")));
        }
        Ok(Self { epsilon, perturbation })
    }

    /// First-order theory is unreliable well above this.
    pub fn large_epsilon(&self) -> bool {
        self.epsilon.abs() > 1e-2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    /// Absolute and relative tolerance of the integrator.
    pub tol: f64,
    /// Give up on a return after this much time.
    pub max_time: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_time: 200.0,
        }
    }
}

pub fn hamiltonian(x: f64, y: f64) -> f64 {
    0.5 * y * y + 1.0 - x.cos()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    /// Crossings of `y = 0`.
    pub crossings: usize,
}

impl Trajectory {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,y,H\n");
        for p in &self.points {
            out.push_str(&format!("{:.12e},{:.15e},{:.15e},{:.15e}\n", p.t, p.x, p.y, p.h));
        }
        out
    }

    pub fn last(&self) -> &TrajectoryPoint {
        self.points.last().expect("a trajectory holds its initial point")
    }
}

enum Stop {
    Time(f64),
    Section,
}

struct Outcome {
    t: f64,
    state: State,
    crossings: usize,
}

struct Engine {
    field: NumericField,
    epsilon: f64,
    tol: Tolerance,
    max_time: f64,
}

impl Engine {
    fn new(spec: &SystemSpec, opts: &SimOptions) -> Result<Self> {
        if !(opts.tol > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".to_string()));
        }
        Ok(Self {
            field: spec.perturbation.numeric(),
            epsilon: spec.epsilon,
            tol: Tolerance {
                atol: [opts.tol, opts.tol, opts.tol * 1e-3, 0.0],
                rtol: opts.tol,
                weight: [1.0, 1.0, 1.0, 0.0],
            },
            max_time: opts.max_time,
        })
    }

    fn rhs(&self, side: Side, s: &State) -> State {
        let q = match side {
            Side::Upper => self.field.upper(s[0], s[1]),
            Side::Lower => self.field.lower(s[0], s[1]),
        };
        let flux = q * s[1];
        [s[1], -s[0].sin() + self.epsilon * q, flux, flux.abs()]
    }

    /// Fraction of the step where `g` leaves the side it starts on.
    fn locate<G: Fn(&State) -> bool>(step: &dopri::Step, inside: G) -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if inside(&step.dense(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    fn run(&self, start: State, stop: Stop, mut record: Option<&mut Vec<TrajectoryPoint>>) -> Result<Outcome> {
        let mut side = if start[1] >= 0.0 { Side::Upper } else { Side::Lower };
        let mut t = 0.0;
        let mut y = start;
        let mut k1 = self.rhs(side, &y);
        let mut h: f64 = 0.05;
        let mut crossings = 0;
        let end_time = match stop {
            Stop::Time(end) => end,
            Stop::Section => self.max_time,
        };
        let push = |rec: &mut Option<&mut Vec<TrajectoryPoint>>, t: f64, s: &State| {
            if let Some(r) = rec.as_deref_mut() {
                r.push(TrajectoryPoint { t, x: s[0], y: s[1], h: hamiltonian(s[0], s[1]) });
            }
        };
        push(&mut record, t, &y);
        loop {
            if t >= end_time {
                return match stop {
                    Stop::Time(_) => Ok(Outcome { t, state: y, crossings }),
                    Stop::Section => Err(Error::Integration(format!(
                        "no return to the section within t = {}",
                        self.max_time
                    ))),
                };
            }
            let hh = h.min(end_time - t);
            let f = |s: &State| self.rhs(side, s);
            let step = attempt(&f, &y, &k1, hh, &self.tol);
            if step.error > 1.0 {
                h = next_step(hh, step.error);
                if h < 1e-14 {
                    return Err(Error::Integration(format!("step size underflow at t = {t}")));
                }
                continue;
            }
            let switch = match side {
                Side::Upper => step.y1[1] < 0.0,
                Side::Lower => step.y1[1] > 0.0,
            };
            let section = matches!(stop, Stop::Section) && side == Side::Upper && y[0] < 0.0 && step.y1[0] >= 0.0;
            if !switch && !section {
                t += hh;
                y = step.y1;
                k1 = step.k7;
                if y[0].abs() > std::f64::consts::PI {
                    return Err(Error::Integration("orbit left the oscillatory region".to_string()));
                }
                push(&mut record, t, &y);
                h = next_step(hh, step.error);
                continue;
            }
            let sign = if side == Side::Upper { 1.0 } else { -1.0 };
            let theta_switch = if switch { Self::locate(&step, |s| sign * s[1] >= 0.0) } else { 2.0 };
            let theta_section = if section { Self::locate(&step, |s| s[0] < 0.0) } else { 2.0 };
            let is_section = theta_section <= theta_switch;
            let component = if is_section { 0 } else { 1 };
            // Land on the event by re-taking the step, then polish with
            // Newton steps on the event coordinate.
            let mut he = theta_switch.min(theta_section) * hh;
            let mut landed = attempt(&f, &y, &k1, he, &self.tol).y1;
            for _ in 0..8 {
                let g = landed[component];
                if g.abs() < 1e-13 {
                    break;
                }
                let rate = self.rhs(side, &landed)[component];
                he -= g / rate;
                landed = attempt(&f, &y, &k1, he, &self.tol).y1;
            }
            if landed[component].abs() > 1e-12 {
                return Err(Error::Integration(format!(
                    "event location did not converge at t = {t} (residual {:e})",
                    landed[component]
                )));
            }
            t += he;
            y = landed;
            if is_section {
                y[0] = 0.0;
                push(&mut record, t, &y);
                return Ok(Outcome { t, state: y, crossings });
            }
            y[1] = 0.0;
            crossings += 1;
            side = if side == Side::Upper { Side::Lower } else { Side::Upper };
            k1 = self.rhs(side, &y);
            push(&mut record, t, &y);
        }
    }
}

/// Integrates from `(x0, y0)` up to `t_max`, recording every step.
pub fn integrate(spec: &SystemSpec, x0: f64, y0: f64, t_max: f64, opts: &SimOptions) -> Result<Trajectory> {
    if hamiltonian(x0, y0) >= 1.999 {
        return Err(Error::InvalidArgument(
            "initial state must lie inside the oscillatory region (H < 1.999)".to_string(),
        ));
    }
    let engine = Engine::new(spec, opts)?;
    let mut points = Vec::new();
    let out = engine.run([x0, y0, 0.0, 0.0], Stop::Time(t_max), Some(&mut points))?;
    Ok(Trajectory {
        points,
        crossings: out.crossings,
    })
}

/// One turn of the Poincaré map on `{x = 0, y > 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReturnSample {
    pub h_in: f64,
    /// `H` at the return point.
    pub h_out: f64,
    pub flight_time: f64,
    pub crossings: usize,
    /// `d(h) / ε = ∫ Q y dt` over the turn; `d(h) = ε ·` this.
    pub displacement_per_epsilon: f64,
    /// `∫ |Q y| dt`, the size of the terms cancelling in the displacement.
    pub flux_scale: f64,
}

impl ReturnSample {
    pub fn displacement(&self, epsilon: f64) -> f64 {
        epsilon * self.displacement_per_epsilon
    }

    /// Integrator noise floor of `displacement_per_epsilon`.
    pub fn noise(&self, tol: f64) -> f64 {
        100.0 * tol * self.flux_scale
    }
}

pub fn return_map(spec: &SystemSpec, h: f64, opts: &SimOptions) -> Result<ReturnSample> {
    if !(h > 0.0 && h < 1.999) {
        return Err(Error::InvalidArgument(format!("h must lie in (0, 1.999), got {h}")));
    }
    let engine = Engine::new(spec, opts)?;
    let out = engine.run([0.0, (2.0 * h).sqrt(), 0.0, 0.0], Stop::Section, None)?;
    Ok(ReturnSample {
        h_in: h,
        h_out: hamiltonian(out.state[0], out.state[1]),
        flight_time: out.t,
        crossings: out.crossings,
        displacement_per_epsilon: out.state[2],
        flux_scale: out.state[3],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleEstimate {
    pub h_star: f64,
    pub bracket: (f64, f64),
    /// `+1` when the cycle attracts (d goes from positive to negative),
    /// `-1` when it repels.
    pub stability: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub schema_version: u32,
    pub epsilon: f64,
    pub cycles: Vec<CycleEstimate>,
    /// Grid energies where `|d|` sat below the integrator noise floor.
    pub indeterminate: Vec<f64>,
    pub diagnostic: Option<String>,
    pub grid: Vec<f64>,
    pub displacement_per_epsilon: Vec<f64>,
}

fn sign_of(sample: &ReturnSample, tol: f64) -> Option<bool> {
    let v = sample.displacement_per_epsilon;
    if v.abs() <= sample.noise(tol) {
        None
    } else {
        Some(v > 0.0)
    }
}

/// Limit cycles as sign changes of the return-map displacement on a
/// geometric grid over `[h_min, h_max]`, refined by bisection.
pub fn find_cycles(spec: &SystemSpec, h_min: f64, h_max: f64, grid: usize, opts: &SimOptions) -> Result<CycleReport> {
    if grid < 16 {
        return Err(Error::InvalidArgument(format!("grid needs at least 16 points, got {grid}")));
    }
    if !(h_min > 0.0 && h_max > h_min && h_max < 1.999) {
        return Err(Error::InvalidArgument(format!("bad energy range [{h_min}, {h_max}]")));
    }
    let points = geometric_grid(h_min, h_max, grid);
    if spec.epsilon == 0.0 {
        return Ok(CycleReport {
            schema_version: crate::SCHEMA_VERSION,
            epsilon: 0.0,
            cycles: Vec::new(),
            indeterminate: Vec::new(),
            diagnostic: Some("degenerate: all fixed (epsilon = 0, every orbit is periodic)".to_string()),
            grid: points,
            displacement_per_epsilon: vec![0.0; grid],
        });
    }
    let samples: Vec<ReturnSample> = points
        .par_iter()
        .map(|&h| return_map(spec, h, opts))
        .collect::<Result<_>>()?;
    let signs: Vec<Option<bool>> = samples.iter().map(|s| sign_of(s, opts.tol)).collect();
    let mut pending = Vec::new();
    let mut last: Option<(f64, bool)> = None;
    for (&h, s) in points.iter().zip(&signs) {
        if let Some(s) = *s {
            if let Some((h0, s0)) = last {
                if s != s0 {
                    pending.push((h0, h, s0));
                }
            }
            last = Some((h, s));
        }
    }
    let cycles = pending
        .par_iter()
        .map(|&(mut lo, mut hi, s_lo)| {
            while hi - lo > BRACKET_WIDTH * lo {
                let mid = 0.5 * (lo + hi);
                match sign_of(&return_map(spec, mid, opts)?, opts.tol) {
                    Some(s) if s == s_lo => lo = mid,
                    Some(_) => hi = mid,
                    None => break,
                }
            }
            Ok(CycleEstimate {
                h_star: 0.5 * (lo + hi),
                bracket: (lo, hi),
                stability: if s_lo { 1 } else { -1 },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let indeterminate: Vec<f64> = points
        .iter()
        .zip(&signs)
        .filter(|(_, s)| s.is_none())
        .map(|(h, _)| *h)
        .collect();
    let diagnostic = (!indeterminate.is_empty())
        .then(|| format!("{} grid points below the integrator noise floor", indeterminate.len()));
    Ok(CycleReport {
        schema_version: crate::SCHEMA_VERSION,
        epsilon: spec.epsilon,
        cycles,
        indeterminate,
        diagnostic,
        grid: points,
        displacement_per_epsilon: samples.iter().map(|s| s.displacement_per_epsilon).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgreementRow {
    pub h: f64,
    pub displacement_per_epsilon: f64,
    pub melnikov: f64,
    pub deviation: f64,
    pub signs_agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub schema_version: u32,
    pub epsilon: f64,
    pub rows: Vec<AgreementRow>,
    /// `max |d/ε - M|`.
    pub max_deviation: f64,
    /// `max |d/ε - M| / |M|`.
    pub max_relative_deviation: f64,
    pub sign_pattern_agrees: bool,
}

/// Tabulates `d(h)/ε` against the quadrature value of `M(h)`.
pub fn melnikov_agreement(spec: &SystemSpec, hs: &[f64], opts: &SimOptions) -> Result<AgreementReport> {
    if spec.epsilon.abs() > 1e-3 {
        return Err(Error::InvalidArgument(format!(
            "agreement needs |epsilon| <= 1e-3, got {}",
            spec.epsilon
        )));
    }
    let rows = hs
        .par_iter()
        .map(|&h| {
            let sample = return_map(spec, h, opts)?;
            let m = quad_melnikov(&spec.perturbation, h, 1e-13)?.value;
            let d = sample.displacement_per_epsilon;
            Ok(AgreementRow {
                h,
                displacement_per_epsilon: d,
                melnikov: m,
                deviation: (d - m).abs(),
                signs_agree: (d > 0.0) == (m > 0.0) || (d == 0.0 && m == 0.0),
            })
        })
        .collect::<Result<Vec<AgreementRow>>>()?;
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let max_relative_deviation = rows
        .iter()
        .map(|r| if r.melnikov == 0.0 { r.deviation } else { r.deviation / r.melnikov.abs() })
        .fold(0.0, f64::max);
    Ok(AgreementReport {
        schema_version: crate::SCHEMA_VERSION,
        epsilon: spec.epsilon,
        sign_pattern_agrees: rows.iter().all(|r| r.signs_agree),
        rows,
        max_deviation,
        max_relative_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn damping() -> Perturbation {
        Perturbation::from_json(r#"{"kind":"smooth","n":0,"s1":1,"s2":1,"a":[["-1"]]}"#).unwrap()
    }

    #[test]
    fn unperturbed_returns_to_itself() {
        let spec = SystemSpec::new(0.0, damping()).unwrap();
        for h in [0.1, 0.5, 1.0] {
            let r = return_map(&spec, h, &SimOptions::default()).unwrap();
            assert!((r.h_out - h).abs() <= 10.0 * 1e-10, "{r:?}");
            assert_eq!(r.crossings, 2);
        }
    }

    #[test]
    fn unperturbed_flow_is_reversible() {
        let spec = SystemSpec::new(0.0, damping()).unwrap();
        let opts = SimOptions::default();
        let (x0, y0) = (0.3, 0.7);
        let fwd = integrate(&spec, x0, y0, 9.0, &opts).unwrap();
        let end = fwd.last();
        let back = integrate(&spec, end.x, -end.y, 9.0, &opts).unwrap();
        let p = back.last();
        assert!((p.x - x0).abs() < 100.0 * opts.tol && (p.y + y0).abs() < 100.0 * opts.tol, "{p:?}");
    }

    #[test]
    fn piecewise_damping_acts_only_above() {
        let p = Perturbation::from_json(
            r#"{"kind":"piecewise","n":0,"s1":1,"s2":1,"s3":1,"plus":{"a":[["-1"]]},"minus":{"a":[["0"]]}}"#,
        )
        .unwrap();
        let spec = SystemSpec::new(1e-3, p).unwrap();
        let t = integrate(&spec, 0.0, 1.0, 15.0, &SimOptions::default()).unwrap();
        for w in t.points.windows(2) {
            let dh = w[1].h - w[0].h;
            if w[0].y < 0.0 || w[1].y < 0.0 {
                assert!(dh.abs() < 1e-9, "{w:?}");
            } else {
                assert!(dh < 1e-12);
            }
        }
        assert!(t.last().h < t.points[0].h - 1e-4);
    }

    #[test]
    fn damping_drains_energy() {
        let spec = SystemSpec::new(1e-3, damping()).unwrap();
        let t = integrate(&spec, 0.0, 1.0, 20.0, &SimOptions::default()).unwrap();
        assert!(t.points.windows(2).all(|w| w[1].h < w[0].h + 1e-12));
        assert!(t.crossings >= 4);
        assert!(t.to_csv().starts_with("t,x,y,H\n"));
    }

    #[test]
    fn damping_displacement_matches_area() {
        let spec = SystemSpec::new(1e-4, damping()).unwrap();
        let r = return_map(&spec, 0.5, &SimOptions::default()).unwrap();
        let area = crate::quadrature::quad_I(0, 1, 0.5, 1e-13).unwrap().value;
        let d = r.displacement_per_epsilon;
        assert!((d + area).abs() < 5e-4 * area, "{d} vs {area}");
        assert!((r.h_out - r.h_in - r.displacement(1e-4)).abs() < 1e-9);
    }

    #[test]
    fn no_cycles_without_perturbation_or_with_damping() {
        let spec = SystemSpec::new(0.0, damping()).unwrap();
        let r = find_cycles(&spec, 0.05, 1.0, 16, &SimOptions::default()).unwrap();
        assert!(r.cycles.is_empty() && r.diagnostic.unwrap().starts_with("degenerate"));
        let spec = SystemSpec::new(1e-4, damping()).unwrap();
        let r = find_cycles(&spec, 0.05, 1.0, 16, &SimOptions::default()).unwrap();
        assert!(r.cycles.is_empty() && r.indeterminate.is_empty());
    }
}
