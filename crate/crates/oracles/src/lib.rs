//! Reference values for the eigensolver tests, computed from scratch.
//!
//! Everything here is independent of the solver crate: Bessel functions of
//! the first and second kind evaluated by their power series, zeros located
//! by bisection, and the Neumann eigenvalue of a linear weight on an
//! interval as a Bessel cross-product root. Test suites freeze the printed
//! values and also re-derive them at run time through this crate.

/// J0 by its power series; converges for the moderate arguments used here.
pub fn bessel_j0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..200 {
        term *= -q / ((m * m) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1.0) {
            break;
        }
    }
    sum
}

/// J1 by its power series.
pub fn bessel_j1(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    for m in 1..200 {
        term *= -q / ((m * (m + 1)) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1.0) {
            break;
        }
    }
    sum
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Y0 by the series with harmonic-number coefficients.
pub fn bessel_y0(x: f64) -> f64 {
    assert!(x > 0.0);
    let q = 0.25 * x * x;
    let mut term = 1.0; // q^m / (m!)^2
    let mut h = 0.0; // H_m
    let mut sum = 0.0;
    for m in 1..200 {
        term *= q / ((m * m) as f64);
        h += 1.0 / m as f64;
        let contrib = if m % 2 == 1 { h * term } else { -h * term };
        sum += contrib;
        if term * h < 1e-18 {
            break;
        }
    }
    (2.0 / std::f64::consts::PI) * (((0.5 * x).ln() + EULER_GAMMA) * bessel_j0(x) + sum)
}

/// Y1 by the series with digamma coefficients.
pub fn bessel_y1(x: f64) -> f64 {
    assert!(x > 0.0);
    let pi = std::f64::consts::PI;
    let q = 0.25 * x * x;
    // sum_k (psi(k+1) + psi(k+2)) (-q)^k / (k! (k+1)!)
    let mut fact = 1.0; // k! (k+1)!
    let mut hk = 0.0; // H_k
    let mut sum = 0.0;
    let mut sign = 1.0;
    let mut qpow = 1.0;
    for k in 0..200u32 {
        if k > 0 {
            fact *= (k * (k + 1)) as f64;
            hk += 1.0 / k as f64;
            qpow *= q;
            sign = -sign;
        }
        let hk1 = hk + 1.0 / (k + 1) as f64;
        let psi_sum = (hk - EULER_GAMMA) + (hk1 - EULER_GAMMA);
        let term = psi_sum * sign * qpow / fact;
        sum += term;
        if k > 4 && term.abs() < 1e-18 {
            break;
        }
    }
    -2.0 / (pi * x) + (2.0 / pi) * (0.5 * x).ln() * bessel_j1(x) - x / (2.0 * pi) * sum
}

/// Root of `f` in `[a, b]` by bisection to near machine precision.
pub fn bisect_root(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    assert!(fa * f(b) < 0.0, "no sign change on [{a}, {b}]");
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fa > 0.0) == (fm > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// First zero of J0 (between 2 and 3).
pub fn j0_first_zero() -> f64 {
    bisect_root(bessel_j0, 2.0, 3.0)
}

/// First positive zero of J1 (between 3 and 4).
pub fn j1_first_zero() -> f64 {
    bisect_root(bessel_j1, 3.0, 4.0)
}

/// First Neumann eigenvalue of `-(w phi')' = mu w phi` for the weight
/// `w(x) = x` on `[0, 1]`: `mu = j_{1,1}^2`, with the interior zero of the
/// eigenfunction at `j_{0,1} / j_{1,1}`.
pub fn linear_weight_eigenvalue() -> f64 {
    let j = j1_first_zero();
    j * j
}

pub fn linear_weight_zero() -> f64 {
    j0_first_zero() / j1_first_zero()
}

/// Smallest positive root of `J1(k) Y1(2k) - J1(2k) Y1(k)`, which encodes
/// the Neumann condition at both ends for the weight `1 + x` on `[0, 1]`
/// (the substitution `t = 1 + x` turns the problem into a Bessel system on
/// `[k, 2k]`). The first eigenvalue is the square of this root.
pub fn cross_product_root() -> f64 {
    let f = |k: f64| bessel_j1(k) * bessel_y1(2.0 * k) - bessel_j1(2.0 * k) * bessel_y1(k);
    // scan for the first sign change
    let mut a = 0.05;
    let mut fa = f(a);
    let mut b = a;
    loop {
        b += 0.05;
        assert!(b < 20.0, "no cross-product root found");
        let fb = f(b);
        if fa * fb < 0.0 {
            break;
        }
        a = b;
        fa = fb;
    }
    bisect_root(f, a, b)
}

/// Eigenvalue for the weight `1 + x`.
pub fn affine_weight_eigenvalue() -> f64 {
    let k = cross_product_root();
    k * k
}

/// Interior zero of the eigenfunction for the weight `1 + x`:
/// `phi(t) = Y1(k) J0(k t) - J1(k) Y0(k t)` vanishes once in `(1, 2)`.
pub fn affine_weight_zero() -> f64 {
    let k = cross_product_root();
    let phi = |t: f64| bessel_y1(k) * bessel_j0(k * t) - bessel_j1(k) * bessel_y0(k * t);
    bisect_root(phi, 1.0 + 1e-9, 2.0 - 1e-9) - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;

    // Frozen digits; the functions recompute them from the series.
    const J0_ZERO: f64 = 2.404_825_557_695_773;
    const J1_ZERO: f64 = 3.831_705_970_207_512;
    const CROSS_ROOT: f64 = 3.196_578_380_810_635;

    #[test]
    fn j0_values() {
        assert!((bessel_j0(0.0) - 1.0).abs() < 1e-16);
        assert!((bessel_j0(0.1) - 0.997_501_562_066_040_03).abs() < 1e-15);
        assert!(bessel_j0(J0_ZERO).abs() < 1e-14);
    }

    #[test]
    fn j1_values() {
        assert!(bessel_j1(0.0).abs() < 1e-18);
        assert!(bessel_j1(J1_ZERO).abs() < 1e-14);
    }

    #[test]
    fn zeros_match_frozen() {
        assert!((j0_first_zero() - J0_ZERO).abs() < 1e-13);
        assert!((j1_first_zero() - J1_ZERO).abs() < 1e-13);
        assert!((linear_weight_eigenvalue() - 14.681_970_642_123_893).abs() < 1e-11);
        assert!((linear_weight_zero() - 0.627_612_237_576_135_2).abs() < 1e-13);
    }

    #[test]
    fn y_series_wronskian() {
        // J_{n+1} Y_n - J_n Y_{n+1} = 2/(pi x), with Y1 = -Y0' checked via
        // the Wronskian identity J1 Y0 - J0 Y1 = 2/(pi x)
        for &x in &[0.5, 1.0, 2.0, 3.5, 6.5] {
            let w = bessel_j1(x) * bessel_y0(x) - bessel_j0(x) * bessel_y1(x);
            let exact = 2.0 / (std::f64::consts::PI * x);
            assert!((w - exact).abs() < 1e-13 * exact.abs(), "x={x}: {w} vs {exact}");
        }
    }

    #[test]
    fn cross_product_values() {
        assert!((cross_product_root() - CROSS_ROOT).abs() < 1e-12);
        assert!((affine_weight_eigenvalue() - 10.218_113_344_665_941).abs() < 1e-10);
        assert!((affine_weight_zero() - 0.534_580_812_525_729_2).abs() < 1e-11);
    }
}
