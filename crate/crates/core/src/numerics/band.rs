//! Symmetric banded storage with an in-place Cholesky factorization.
//!
//! The meshes in this crate are logically rectangular grids numbered column
//! by column, so the stiffness and mass matrices have a small, fixed
//! half-bandwidth. A dense band factorization is then both simpler and much
//! faster than general sparse machinery. The factorization is the
//! right-looking outer-product form on a column-major panel, which keeps
//! every inner loop contiguous.

/// Symmetric band matrix, lower triangle stored by diagonals:
/// `data[d][i] = A[i + d][i]` for `d = 0..=bw`, `i + d < n`.
#[derive(Clone)]
pub struct BandMatrix {
    pub n: usize,
    pub bw: usize,
    data: Vec<Vec<f64>>,
}

impl BandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        let data = (0..=bw).map(|d| vec![0.0; n - d.min(n)]).collect();
        BandMatrix { n, bw, data }
    }

    /// Adds `v` to entry `(i, j)`. Only the lower triangle is stored; callers
    /// must pass each symmetric pair once with `i >= j`.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i >= j && i - j <= self.bw);
        self.data[i - j][j] += v;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        if d > self.bw {
            0.0
        } else {
            self.data[d][lo]
        }
    }

    /// Diagonals that hold at least one nonzero (FEM stencils touch only a
    /// handful of the stored band).
    pub fn nonzero_diagonals(&self) -> Vec<usize> {
        (0..=self.bw).filter(|&d| self.data[d].iter().any(|&v| v != 0.0)).collect()
    }

    /// y = A x for the full symmetric matrix.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        let diags = self.nonzero_diagonals();
        self.mul_vec_on(&diags, x, y);
    }

    /// y = A x touching only the given diagonals.
    pub fn mul_vec_on(&self, diags: &[usize], x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        for &d in diags {
            if d == 0 {
                for (j, yj) in y.iter_mut().enumerate() {
                    *yj += self.data[0][j] * x[j];
                }
            } else {
                let diag = &self.data[d];
                for (j, &a) in diag.iter().enumerate() {
                    y[j + d] += a * x[j];
                    y[j] += a * x[j + d];
                }
            }
        }
    }

    /// Returns `self + sigma * other` (same bandwidth).
    pub fn shifted(&self, sigma: f64, other: &BandMatrix) -> BandMatrix {
        assert_eq!(self.n, other.n);
        let bw = self.bw.max(other.bw);
        let mut out = BandMatrix::zeros(self.n, bw);
        for d in 0..=bw {
            for i in 0..self.n - d {
                let a = if d <= self.bw { self.data[d][i] } else { 0.0 };
                let b = if d <= other.bw { other.data[d][i] } else { 0.0 };
                out.data[d][i] = a + sigma * b;
            }
        }
        out
    }

    /// Cholesky factorization A = L L^T on a column-major band panel.
    /// Fails on a non-positive pivot.
    pub fn cholesky(self) -> Option<BandCholesky> {
        let n = self.n;
        let bw = self.bw;
        let w = bw + 1;
        // panel[j*w + d] = A[j+d][j]
        let mut panel = vec![0.0f64; n * w];
        for d in 0..=bw {
            for (i, &v) in self.data[d].iter().enumerate() {
                panel[i * w + d] = v;
            }
        }
        drop(self.data);
        for j in 0..n {
            let (col_j, trailing) = panel[j * w..].split_at_mut(w);
            let pivot = col_j[0];
            if pivot <= 0.0 || !pivot.is_finite() {
                return None;
            }
            let d = pivot.sqrt();
            let inv = 1.0 / d;
            let reach = bw.min(n - 1 - j);
            col_j[0] = d;
            for r in 1..=reach {
                col_j[r] *= inv;
            }
            // trailing update: column j + c picks up -L[.,j] L[j+c,j]
            for c in 1..=reach {
                let ljc = col_j[c];
                if ljc == 0.0 {
                    continue;
                }
                let src = &col_j[c..=reach];
                let dst = &mut trailing[(c - 1) * w..(c - 1) * w + src.len()];
                for (t, &s) in dst.iter_mut().zip(src) {
                    *t -= ljc * s;
                }
            }
        }
        Some(BandCholesky { n, bw, panel })
    }
}

/// Cholesky factor in a column-major band panel; solves A x = b in two
/// sweeps.
pub struct BandCholesky {
    n: usize,
    bw: usize,
    panel: Vec<f64>,
}

impl BandCholesky {
    pub fn solve(&self, b: &[f64], x: &mut [f64]) {
        let n = self.n;
        let w = self.bw + 1;
        x.copy_from_slice(b);
        // forward: L y = b
        for j in 0..n {
            let xj = x[j] / self.panel[j * w];
            x[j] = xj;
            let reach = self.bw.min(n - 1 - j);
            let col = &self.panel[j * w + 1..j * w + reach + 1];
            let xs = &mut x[j + 1..j + reach + 1];
            for (xi, &l) in xs.iter_mut().zip(col) {
                *xi -= l * xj;
            }
        }
        // backward: L^T x = y
        for j in (0..n).rev() {
            let reach = self.bw.min(n - 1 - j);
            let col = &self.panel[j * w + 1..j * w + reach + 1];
            let mut s = x[j];
            for (d, &l) in col.iter().enumerate() {
                s -= l * x[j + 1 + d];
            }
            x[j] = s / self.panel[j * w];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_and_solve_tridiagonal() {
        // 1D Laplacian plus identity: SPD
        let n = 64;
        let mut a = BandMatrix::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, 3.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
            }
        }
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut b = vec![0.0; n];
        a.mul_vec(&x_true, &mut b);
        let ch = a.clone().cholesky().expect("SPD");
        let mut x = vec![0.0; n];
        ch.solve(&b, &mut x);
        for i in 0..n {
            assert!((x[i] - x_true[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn wider_band_round_trip() {
        let n = 40;
        let bw = 5;
        let mut a = BandMatrix::zeros(n, bw);
        for i in 0..n {
            a.add(i, i, 10.0 + (i % 3) as f64);
            for d in 1..=bw.min(i) {
                a.add(i, i - d, 1.0 / (d as f64 + 1.0));
            }
        }
        let x_true: Vec<f64> = (0..n).map(|i| 1.0 - 0.03 * i as f64).collect();
        let mut b = vec![0.0; n];
        a.mul_vec(&x_true, &mut b);
        let ch = a.clone().cholesky().expect("SPD");
        let mut x = vec![0.0; n];
        ch.solve(&b, &mut x);
        let err: f64 = x.iter().zip(&x_true).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        assert!(err < 1e-11, "max err {err}");
    }

    #[test]
    fn rejects_indefinite() {
        let mut a = BandMatrix::zeros(4, 1);
        for i in 0..4 {
            a.add(i, i, -1.0);
        }
        assert!(a.cholesky().is_none());
    }
}
