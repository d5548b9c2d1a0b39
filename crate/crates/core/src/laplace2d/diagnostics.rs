//! Column-wise diagnostics of a 2D solution: the cross-sectional average
//! and its flux defect, nodal-set geometry, gradient ratios and the
//! transverse oscillation.

use super::PDESolution;
use crate::error::{Error, Result};
use crate::numerics::{end_distance, quad};

/// Cross-sectional average profile on the mesh columns.
#[derive(Clone, Debug)]
pub struct CrossSectionProfile {
    pub xs: Vec<f64>,
    /// Slice width at each column (exact for graph domains: the mesh
    /// carries the boundary values at the column nodes).
    pub omega: Vec<f64>,
    pub ubar: Vec<f64>,
    /// Centered differences, second-order one-sided at the ends.
    pub dubar: Vec<f64>,
    /// Flux defect `omega ubar' + lambda int_0^x omega ubar`.
    pub eta: Vec<f64>,
}

impl CrossSectionProfile {
    pub fn sup_abs_ubar(&self) -> f64 {
        self.ubar.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }
}

/// Averages the solution over each column with the trapezoid rule; merged
/// degenerate columns take the single nodal value.
pub fn cross_section_average(sol: &PDESolution) -> CrossSectionProfile {
    let mesh = &sol.mesh;
    let nx = mesh.nx;
    let ny = mesh.ny;
    let mut ubar = Vec::with_capacity(nx + 1);
    let mut omega = Vec::with_capacity(nx + 1);
    for i in 0..=nx {
        if mesh.merged[i] {
            ubar.push(sol.u[mesh.logical[i][0]]);
            omega.push(0.0);
        } else {
            let col = &mesh.logical[i];
            let mut s = 0.5 * (sol.u[col[0]] + sol.u[col[ny]]);
            for &id in &col[1..ny] {
                s += sol.u[id];
            }
            ubar.push(s / ny as f64);
            omega.push(mesh.nodes[col[ny]][1] - mesh.nodes[col[0]][1]);
        }
    }
    let h = 1.0 / nx as f64;
    let mut dubar = vec![0.0; nx + 1];
    for i in 1..nx {
        dubar[i] = (ubar[i + 1] - ubar[i - 1]) / (2.0 * h);
    }
    dubar[0] = (-3.0 * ubar[0] + 4.0 * ubar[1] - ubar[2]) / (2.0 * h);
    dubar[nx] = (3.0 * ubar[nx] - 4.0 * ubar[nx - 1] + ubar[nx - 2]) / (2.0 * h);

    let eta = flux_defect(&omega, &ubar, &dubar, h, sol.lambda).left;
    CrossSectionProfile { xs: mesh.col_x.clone(), omega, ubar, dubar, eta }
}

/// The flux defect evaluated from both ends.
#[derive(Clone, Debug)]
pub struct EtaProfile {
    /// `omega ubar' + lambda int_0^x omega ubar`
    pub left: Vec<f64>,
    /// `omega ubar' - lambda int_x^1 omega ubar`
    pub right: Vec<f64>,
    /// Largest discrepancy between the two expressions; they agree exactly
    /// when the weighted average has mean zero.
    pub residual: f64,
}

/// Both one-sided forms of the flux defect for a computed profile.
pub fn eta_profile(prof: &CrossSectionProfile, lambda: f64) -> EtaProfile {
    let h = prof.xs[1] - prof.xs[0];
    flux_defect(&prof.omega, &prof.ubar, &prof.dubar, h, lambda)
}

fn flux_defect(omega: &[f64], ubar: &[f64], dubar: &[f64], h: f64, lambda: f64) -> EtaProfile {
    let n = omega.len();
    let wf: Vec<f64> = omega.iter().zip(ubar).map(|(&o, &v)| o * v).collect();
    let cum = quad::cumulative(h, &wf);
    let total = cum[n - 1];
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    let mut residual = 0.0f64;
    for i in 0..n {
        let base = omega[i] * dubar[i];
        let l = base + lambda * cum[i];
        let r = base - lambda * (total - cum[i]);
        residual = residual.max((l - r).abs());
        left.push(l);
        right.push(r);
    }
    EtaProfile { left, right, residual }
}

/// Nodal-set geometry: per-row roots of the solution along `x`, their
/// projection interval, and the zeros of the interpolated average.
#[derive(Clone, Debug, serde::Serialize)]
pub struct NodalReport {
    pub eps: f64,
    /// Smallest zero of the interpolated cross-sectional average.
    pub s0: f64,
    /// Largest zero of the interpolated cross-sectional average.
    pub s0_prime: f64,
    /// `(x_i, y_min, y_max)` for each column interval containing row
    /// sign changes.
    pub per_column_roots: Vec<(f64, f64, f64)>,
    pub proj_min: f64,
    pub proj_max: f64,
    pub width: f64,
}

/// Locates the nodal set by sign changes along mesh rows (linear
/// interpolation between adjacent columns).
pub fn nodal_set(sol: &PDESolution) -> Result<NodalReport> {
    let mesh = &sol.mesh;
    let nx = mesh.nx;
    let h = 1.0 / nx as f64;
    let mut proj_min = f64::INFINITY;
    let mut proj_max = f64::NEG_INFINITY;
    let mut by_interval: std::collections::BTreeMap<usize, (f64, f64)> =
        std::collections::BTreeMap::new();
    for j in 0..=mesh.ny {
        let mut prev_id = usize::MAX;
        let mut row: Vec<(usize, f64, f64)> = Vec::with_capacity(nx + 1); // (i, x, u)
        for i in 0..=nx {
            let id = mesh.logical[i][j];
            if id == prev_id {
                continue;
            }
            prev_id = id;
            row.push((i, mesh.col_x[i], sol.u[id]));
        }
        for w in row.windows(2) {
            let (i0, x0, u0) = w[0];
            let (_, x1, u1) = w[1];
            if u0 == 0.0 || (u0 > 0.0) != (u1 > 0.0) {
                let t = u0 / (u0 - u1);
                let xr = x0 + t * (x1 - x0);
                proj_min = proj_min.min(xr);
                proj_max = proj_max.max(xr);
                let ids = (mesh.logical[i0][j], mesh.logical[(i0 + 1).min(nx)][j]);
                let y0 = mesh.nodes[ids.0][1];
                let y1 = mesh.nodes[ids.1][1];
                let yr = y0 + t * (y1 - y0);
                by_interval
                    .entry(i0)
                    .and_modify(|e| {
                        e.0 = e.0.min(yr);
                        e.1 = e.1.max(yr);
                    })
                    .or_insert((yr, yr));
            }
        }
    }
    if !proj_min.is_finite() {
        return Err(Error::NoSignChange);
    }

    // zeros of the interpolated average
    let prof = cross_section_average(sol);
    let mut s0 = None;
    let mut s0p = None;
    for i in 0..nx {
        let (u0, u1) = (prof.ubar[i], prof.ubar[i + 1]);
        if u0 == 0.0 || (u0 > 0.0) != (u1 > 0.0) {
            let t = u0 / (u0 - u1);
            let xr = prof.xs[i] + t * h;
            if s0.is_none() {
                s0 = Some(xr);
            }
            s0p = Some(xr);
        }
    }
    let s0 = s0.ok_or(Error::NoSignChange)?;
    let s0_prime = s0p.unwrap();
    Ok(NodalReport {
        eps: mesh.eps,
        s0,
        s0_prime,
        per_column_roots: by_interval
            .into_iter()
            .map(|(i, (ymin, ymax))| (mesh.col_x[i], ymin, ymax))
            .collect(),
        proj_min,
        proj_max,
        width: proj_max - proj_min,
    })
}

/// Normalized gradient maxima with their locations.
#[derive(Clone, Debug, serde::Serialize)]
pub struct GradientDiagnostics {
    /// `max |grad u| / (max(min(x, 1-x), eps) sup|u|)` over elements.
    pub r_grad: f64,
    pub r_grad_at: (f64, f64),
    /// `max |du/dy| / (eps sup|ubar|)` over elements.
    pub r_dy: f64,
    pub r_dy_at: (f64, f64),
}

pub fn gradient_diagnostics(sol: &PDESolution) -> GradientDiagnostics {
    let eps = sol.mesh.eps;
    let sup_u = sol.sup_abs();
    let sup_ubar = cross_section_average(sol).sup_abs_ubar();
    let mut r_grad = 0.0f64;
    let mut r_grad_at = (0.0, 0.0);
    let mut r_dy = 0.0f64;
    let mut r_dy_at = (0.0, 0.0);
    for (tri, g) in sol.mesh.elements.iter().zip(&sol.grad_u) {
        let cx = tri.iter().map(|&v| sol.mesh.nodes[v][0]).sum::<f64>() / 3.0;
        let cy = tri.iter().map(|&v| sol.mesh.nodes[v][1]).sum::<f64>() / 3.0;
        let mag = (g[0] * g[0] + g[1] * g[1]).sqrt();
        let rg = mag / (end_distance(cx).max(eps) * sup_u);
        if rg > r_grad {
            r_grad = rg;
            r_grad_at = (cx, cy);
        }
        let rd = g[1].abs() / (eps * sup_ubar);
        if rd > r_dy {
            r_dy = rd;
            r_dy_at = (cx, cy);
        }
    }
    GradientDiagnostics { r_grad, r_grad_at, r_dy, r_dy_at }
}

/// Column-wise transverse variation relative to `sup|ubar|`.
#[derive(Clone, Debug)]
pub struct Oscillation {
    pub max: f64,
    pub per_column: Vec<f64>,
}

pub fn transverse_oscillation(sol: &PDESolution) -> Oscillation {
    let mesh = &sol.mesh;
    let sup_ubar = cross_section_average(sol).sup_abs_ubar();
    let mut per_column = Vec::with_capacity(mesh.nx + 1);
    let mut max = 0.0f64;
    for i in 0..=mesh.nx {
        let col = &mesh.logical[i];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut seen = usize::MAX;
        for &id in col {
            if id != seen {
                lo = lo.min(sol.u[id]);
                hi = hi.max(sol.u[id]);
                seen = id;
            }
        }
        let osc = (hi - lo) / sup_ubar;
        per_column.push(osc);
        max = max.max(osc);
    }
    Oscillation { max, per_column }
}

/// Interior energy quotient
/// `int_eps^{1-eps} omega ubar'^2 / int_eps^{1-eps} omega ubar^2`.
pub fn energy_check(prof: &CrossSectionProfile, _lambda: f64, eps: f64) -> Result<f64> {
    let h = prof.xs[1] - prof.xs[0];
    let lo = prof.xs.iter().position(|&x| x >= eps).unwrap_or(0);
    let hi = prof.xs.iter().rposition(|&x| x <= 1.0 - eps).unwrap_or(prof.xs.len() - 1);
    if hi <= lo + 2 {
        return Err(Error::ZeroDenominator("interior window"));
    }
    let num: Vec<f64> = (lo..=hi).map(|i| prof.omega[i] * prof.dubar[i] * prof.dubar[i]).collect();
    let den: Vec<f64> = (lo..=hi).map(|i| prof.omega[i] * prof.ubar[i] * prof.ubar[i]).collect();
    let d = quad::simpson(h, &den);
    if d <= 0.0 {
        return Err(Error::ZeroDenominator("weighted mass of ubar"));
    }
    Ok(quad::simpson(h, &num) / d)
}
