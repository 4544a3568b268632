//! Dormand–Prince 5(4) with Hairer's continuous extension.

pub const DIM: usize = 4;
pub type State = [f64; DIM];

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Result of one attempted step.
pub struct Step {
    pub y1: State,
    /// Derivative at the end point (first stage of the next step).
    pub k7: State,
    /// Weighted RMS error; the step is acceptable when `<= 1`.
    pub error: f64,
    dense: [State; 5],
}

impl Step {
    /// Interpolated state at fraction `theta ∈ [0, 1]` of the step.
    pub fn dense(&self, theta: f64) -> State {
        let t1 = 1.0 - theta;
        let r = &self.dense;
        let mut out = [0.0; DIM];
        for i in 0..DIM {
            out[i] = r[0][i] + theta * (r[1][i] + t1 * (r[2][i] + theta * (r[3][i] + t1 * r[4][i])));
        }
        out
    }
}

fn comb(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for i in 0..DIM {
        let mut s = 0.0;
        for (a, k) in terms {
            s += a * k[i];
        }
        out[i] += h * s;
    }
    out
}

/// Tolerances per component; a zero weight excludes a component from the
/// error norm.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub atol: State,
    pub rtol: f64,
    pub weight: State,
}

pub fn attempt<F: Fn(&State) -> State>(f: &F, y0: &State, k1: &State, h: f64, tol: &Tolerance) -> Step {
    let k2 = f(&comb(y0, h, &[(A21, k1)]));
    let k3 = f(&comb(y0, h, &[(A31, k1), (A32, &k2)]));
    let k4 = f(&comb(y0, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(&comb(y0, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
    let k6 = f(&comb(y0, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
    let y1 = comb(y0, h, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    let k7 = f(&y1);
    let mut sum = 0.0;
    let mut count = 0.0;
    for i in 0..DIM {
        if tol.weight[i] == 0.0 {
            continue;
        }
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = tol.atol[i] + tol.rtol * y0[i].abs().max(y1[i].abs());
        sum += tol.weight[i] * (e / sc).powi(2);
        count += tol.weight[i];
    }
    let error = (sum / count).sqrt();
    let mut dense = [[0.0; DIM]; 5];
    for i in 0..DIM {
        let diff = y1[i] - y0[i];
        let bspl = h * k1[i] - diff;
        dense[0][i] = y0[i];
        dense[1][i] = diff;
        dense[2][i] = bspl;
        dense[3][i] = diff - h * k7[i] - bspl;
        dense[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    Step { y1, k7, error, dense }
}

/// Step size proposal after a step with the given error.
pub fn next_step(h: f64, error: f64) -> f64 {
    let factor = if error == 0.0 {
        5.0
    } else {
        (0.9 * error.powf(-0.2)).clamp(0.2, 5.0)
    };
    h * factor
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let f = |y: &State| [y[1], -y[0], 0.0, 0.0];
        let tol = Tolerance { atol: [1e-12; DIM], rtol: 1e-12, weight: [1.0, 1.0, 0.0, 0.0] };
        let mut y = [1.0, 0.0, 0.0, 0.0];
        let mut t = 0.0;
        let mut h: f64 = 0.01;
        let end = 2.0 * std::f64::consts::PI;
        let mut k1 = f(&y);
        while t < end {
            let hh = h.min(end - t);
            let s = attempt(&f, &y, &k1, hh, &tol);
            if s.error <= 1.0 {
                // Dense output agrees with the step end and start.
                assert!((s.dense(1.0)[0] - s.y1[0]).abs() < 1e-14);
                assert!((s.dense(0.0)[0] - y[0]).abs() < 1e-14);
                t += hh;
                y = s.y1;
                k1 = s.k7;
            }
            h = next_step(hh, s.error);
        }
        assert!((y[0] - 1.0).abs() < 1e-9 && y[1].abs() < 1e-9, "{y:?}");
    }
}
