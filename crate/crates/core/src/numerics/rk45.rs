//! Dormand-Prince 5(4) adaptive step for two-component systems.

/// One accepted sample of the integration: position, state and derivative.
#[derive(Clone, Copy, Debug)]
pub struct Sample {
    pub x: f64,
    pub y: [f64; 2],
    pub dy: [f64; 2],
}

pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_step: f64,
    pub min_step: f64,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions { abs_tol: 1e-14, rel_tol: 1e-14, max_step: 1e-3, min_step: 1e-13 }
    }
}

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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// 4th-order weights for the embedded error estimate
const E1: f64 = 5179.0 / 57600.0;
const E3: f64 = 7571.0 / 16695.0;
const E4: f64 = 393.0 / 640.0;
const E5: f64 = -92097.0 / 339200.0;
const E6: f64 = 187.0 / 2100.0;
const E7: f64 = 1.0 / 40.0;

/// Integration trace: accepted samples plus whether `x_end` was reached.
/// `completed == false` means the state stopped being finite or the step
/// controller underflowed; the samples up to that point are still returned.
pub struct Trace {
    pub samples: Vec<Sample>,
    pub completed: bool,
}

/// Integrates `y' = f(x, y)` from `(x0, y0)` to `x_end`, recording every
/// accepted step.
pub fn integrate(
    f: &dyn Fn(f64, [f64; 2]) -> [f64; 2],
    x0: f64,
    y0: [f64; 2],
    x_end: f64,
    opt: &AdaptiveOptions,
) -> Trace {
    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, y);
    let mut out = vec![Sample { x, y, dy: k1 }];
    let mut h = opt.max_step.min(x_end - x0);
    if h <= 0.0 {
        return Trace { samples: out, completed: true };
    }
    let mut steps = 0usize;
    while x < x_end {
        steps += 1;
        if steps > 50_000_000 {
            return Trace { samples: out, completed: false };
        }
        if x + h > x_end {
            h = x_end - x;
        }
        let add = |y: [f64; 2], c: &[(f64, [f64; 2])]| {
            let mut out = y;
            for &(a, k) in c {
                out[0] += h * a * k[0];
                out[1] += h * a * k[1];
            }
            out
        };
        let k2 = f(x + h / 5.0, add(y, &[(A21, k1)]));
        let k3 = f(x + 3.0 * h / 10.0, add(y, &[(A31, k1), (A32, k2)]));
        let k4 = f(x + 4.0 * h / 5.0, add(y, &[(A41, k1), (A42, k2), (A43, k3)]));
        let k5 = f(x + 8.0 * h / 9.0, add(y, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]));
        let k6 = f(x + h, add(y, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]));
        let y5 = add(y, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)]);
        let k7 = f(x + h, y5);
        let y4 = add(y, &[(E1, k1), (E3, k3), (E4, k4), (E5, k5), (E6, k6), (E7, k7)]);

        let mut err: f64 = 0.0;
        for i in 0..2 {
            let scale = opt.abs_tol + opt.rel_tol * y[i].abs().max(y5[i].abs());
            err = err.max((y5[i] - y4[i]).abs() / scale);
        }
        if !err.is_finite() || !y5[0].is_finite() || !y5[1].is_finite() {
            return Trace { samples: out, completed: false };
        }
        if err <= 1.0 {
            x += h;
            y = y5;
            k1 = k7; // FSAL
            out.push(Sample { x, y, dy: k1 });
        }
        let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
        h = h.min(opt.max_step);
        if h < opt.min_step {
            return Trace { samples: out, completed: false };
        }
    }
    Trace { samples: out, completed: true }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        // y'' = -y as a system; exact solution (cos, -sin)
        let f = |_x: f64, y: [f64; 2]| [y[1], -y[0]];
        let opt = AdaptiveOptions { max_step: 0.05, ..Default::default() };
        let trace = integrate(&f, 0.0, [1.0, 0.0], 10.0, &opt);
        assert!(trace.completed);
        let last = trace.samples.last().unwrap();
        assert!((last.y[0] - 10.0f64.cos()).abs() < 1e-11);
        assert!((last.y[1] + 10.0f64.sin()).abs() < 1e-11);
    }

    #[test]
    fn nonfinite_detected() {
        // y' = y^2 blows up at x = 1
        let f = |_x: f64, y: [f64; 2]| [y[0] * y[0], 0.0];
        let opt = AdaptiveOptions::default();
        let trace = integrate(&f, 0.0, [1.0, 0.0], 2.0, &opt);
        assert!(!trace.completed);
        assert!(trace.samples.last().unwrap().x < 2.0);
    }
}
