//! Cubic Hermite interpolation on sample pairs with derivatives.

/// Value and derivative of the cubic matching `(f0, d0)` at `x0` and
/// `(f1, d1)` at `x1`, evaluated at `x`.
#[inline]
pub fn hermite(x0: f64, f0: f64, d0: f64, x1: f64, f1: f64, d1: f64, x: f64) -> (f64, f64) {
    let h = x1 - x0;
    if h == 0.0 {
        return (f0, d0);
    }
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let v = h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1;
    let dh00 = (6.0 * t2 - 6.0 * t) / h;
    let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
    let dh01 = (-6.0 * t2 + 6.0 * t) / h;
    let dh11 = 3.0 * t2 - 2.0 * t;
    let d = dh00 * f0 + dh10 * d0 + dh01 * f1 + dh11 * d1;
    (v, d)
}

/// Piecewise-cubic evaluation over sorted samples `(xs, fs, ds)`.
/// Clamps outside the sampled range.
pub fn eval_sorted(xs: &[f64], fs: &[f64], ds: &[f64], x: f64) -> (f64, f64) {
    let n = xs.len();
    debug_assert!(n >= 2 && fs.len() == n && ds.len() == n);
    if x <= xs[0] {
        return (fs[0], ds[0]);
    }
    if x >= xs[n - 1] {
        return (fs[n - 1], ds[n - 1]);
    }
    let mut i = match xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
        Ok(i) => return (fs[i], ds[i]),
        Err(i) => i - 1,
    };
    if i >= n - 1 {
        i = n - 2;
    }
    hermite(xs[i], fs[i], ds[i], xs[i + 1], fs[i + 1], ds[i + 1], x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics_exactly() {
        let f = |x: f64| 2.0 * x * x * x - x * x + 0.5 * x - 3.0;
        let d = |x: f64| 6.0 * x * x - 2.0 * x + 0.5;
        for &x in &[0.1, 0.37, 0.9] {
            let (v, dv) = hermite(0.0, f(0.0), d(0.0), 1.0, f(1.0), d(1.0), x);
            assert!((v - f(x)).abs() < 1e-14);
            assert!((dv - d(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn piecewise_sine() {
        let n = 101;
        let xs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64 * 3.0).collect();
        let fs: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        let ds: Vec<f64> = xs.iter().map(|x| x.cos()).collect();
        for k in 0..300 {
            let x = k as f64 * 0.01;
            let (v, _) = eval_sorted(&xs, &fs, &ds, x);
            assert!((v - x.sin()).abs() < 1e-7);
        }
    }
}
