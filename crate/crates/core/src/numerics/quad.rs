//! Quadrature on uniformly spaced samples.

/// Composite Simpson rule over a uniform grid with spacing `h`.
///
/// Requires an odd number of samples (an even panel count); falls back to a
/// trapezoid correction on the last panel when the count is even.
pub fn simpson(h: f64, f: &[f64]) -> f64 {
    let n = f.len();
    assert!(n >= 2, "need at least two samples");
    let pairs = (n - 1) / 2;
    let mut s = 0.0;
    for k in 0..pairs {
        let i = 2 * k;
        s += f[i] + 4.0 * f[i + 1] + f[i + 2];
    }
    s *= h / 3.0;
    if (n - 1) % 2 == 1 {
        // odd panel count: trapezoid on the final panel
        s += 0.5 * h * (f[n - 2] + f[n - 1]);
    }
    s
}

/// Cumulative integral on a uniform grid by the parabolic segment rule:
/// each panel `[x_i, x_{i+1}]` is integrated with the quadratic through the
/// three nearest samples. Exact for quadratics, O(h^3) accumulated error.
///
/// Returns one value per node; the last entry agrees with the full integral.
pub fn cumulative(h: f64, f: &[f64]) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 3, "need at least three samples");
    let mut out = vec![0.0; n];
    for i in 0..n - 1 {
        // quadratic through samples (c-1, c, c+1) with c the panel's interior anchor
        let seg = if i == 0 {
            // leading panel uses the forward triple
            h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2])
        } else {
            h / 12.0 * (-f[i - 1] + 8.0 * f[i] + 5.0 * f[i + 1])
        };
        out[i + 1] = out[i] + seg;
    }
    out
}

/// Trapezoid rule over a uniform grid with spacing `h`.
pub fn trapezoid(h: f64, f: &[f64]) -> f64 {
    let n = f.len();
    assert!(n >= 2);
    let inner: f64 = f[1..n - 1].iter().sum();
    h * (0.5 * f[0] + inner + 0.5 * f[n - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> (f64, Vec<f64>) {
        let h = 1.0 / (n - 1) as f64;
        (h, (0..n).map(|i| i as f64 * h).collect())
    }

    #[test]
    fn simpson_exact_for_cubics() {
        let (h, xs) = grid(9);
        let f: Vec<f64> = xs.iter().map(|&x| x * x * x - 2.0 * x + 1.0).collect();
        // integral of x^3 - 2x + 1 over [0,1] = 1/4 - 1 + 1 = 1/4
        assert!((simpson(h, &f) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn simpson_sine() {
        let (h, xs) = grid(1025);
        let f: Vec<f64> = xs.iter().map(|&x| (std::f64::consts::PI * x).sin()).collect();
        let exact = 2.0 / std::f64::consts::PI;
        assert!((simpson(h, &f) - exact).abs() < 1e-12);
    }

    #[test]
    fn cumulative_matches_antiderivative() {
        let (h, xs) = grid(2049);
        let f: Vec<f64> = xs.iter().map(|&x| (3.0 * x).exp()).collect();
        let cum = cumulative(h, &f);
        for (i, &x) in xs.iter().enumerate() {
            let exact = ((3.0 * x).exp() - 1.0) / 3.0;
            assert!((cum[i] - exact).abs() < 2e-9, "at x={x}: {} vs {exact}", cum[i]);
        }
    }

    #[test]
    fn cumulative_exact_for_quadratics() {
        let (h, xs) = grid(17);
        let f: Vec<f64> = xs.iter().map(|&x| 3.0 * x * x - x + 2.0).collect();
        let cum = cumulative(h, &f);
        for (i, &x) in xs.iter().enumerate() {
            let exact = x * x * x - 0.5 * x * x + 2.0 * x;
            assert!((cum[i] - exact).abs() < 1e-14);
        }
    }
}
