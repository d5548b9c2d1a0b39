//! Shared numerical kernels: quadrature, banded Cholesky, an adaptive
//! Runge-Kutta step, Hermite interpolation and least-squares line fits.

pub mod band;
pub(crate) mod fit;
pub mod interp;
pub mod quad;
pub(crate) mod rk45;

/// Distance of `x` to the nearer endpoint of `[0, 1]`.
#[inline]
pub fn end_distance(x: f64) -> f64 {
    x.min(1.0 - x)
}

/// Bisection for a root of `f` in `[a, b]`, assuming `f(a)` and `f(b)`
/// straddle zero. Refines until the bracket is shorter than `xtol`.
pub(crate) fn bisect(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> f64 {
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    for _ in 0..200 {
        if (b - a).abs() <= xtol {
            break;
        }
        let m = 0.5 * (a + b);
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
