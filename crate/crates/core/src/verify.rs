//! Paired 1D/2D runs over a grid of widths, slope fits of the resulting
//! diagnostics in `log eps`, and the eigenvalue sandwich checks.
//!
//! Each row solves the weighted interval problem and the planar problem for
//! one `eps`, plus a refined planar solve at doubled horizontal resolution.
//! The refined solve serves two purposes: the measured eigenvalue shift
//! bounds the discretization error (`tol_disc`), and the pair of
//! cross-sectional averages extrapolates to a profile whose leading mesh
//! error cancels, which is what the average is compared against the 1D
//! eigenfunction with.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{make_domain, width_profile};
use crate::laplace2d;
use crate::numerics::{end_distance, fit, quad};
use crate::sl_solver;

/// Eigenvalue residual used for the 2D solves inside the harness.
const RUN_TOL: f64 = 1e-10;

/// Zero-matching tolerance for the 1D solves inside the harness.
const RUN_TOL_MU: f64 = 1e-10;

/// Values at or below this are ignored by [`fit_slope`].
pub const SLOPE_FLOOR: f64 = 1e-11;

/// Mesh resolution selection for a paired run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MeshPolicy {
    /// Graded policy: `ny` proportional to `eps` (quadrature accuracy of the
    /// column averages), `nx` inversely proportional (the thin direction
    /// gets cheaper, so the long direction can afford it).
    Auto,
    Explicit { nx: usize, ny: usize },
}

impl MeshPolicy {
    pub fn resolve(&self, eps: f64) -> (usize, usize) {
        match *self {
            MeshPolicy::Explicit { nx, ny } => (nx, ny),
            MeshPolicy::Auto => {
                let ny = ((960.0 * eps).ceil() as usize).clamp(16, 192);
                let doublings = (0.2 / eps).log2().ceil().max(0.0) as usize;
                let nx = 1024usize << doublings.min(3);
                (nx, ny)
            }
        }
    }

    pub fn doubled(&self, eps: f64) -> MeshPolicy {
        let (nx, ny) = self.resolve(eps);
        MeshPolicy::Explicit { nx: 2 * nx, ny: 2 * ny }
    }
}

/// All diagnostics of one paired solve.
#[derive(Clone, Debug, Serialize)]
pub struct ScalingRow {
    pub family: String,
    pub eps: f64,
    pub lambda: f64,
    pub mu: f64,
    /// `mu - lambda`.
    pub gap: f64,
    /// `sup |ubar - phi| / sup|ubar|` with `phi(0) = ubar(0+)`, on the
    /// mesh-pair extrapolated average.
    pub sup_diff: f64,
    /// Width of the `x`-projection of the nodal set.
    pub width: f64,
    /// Largest distance from a nodal root to the 1D zero.
    pub dist_s1: f64,
    /// `max |eta| / (omega sup|ubar|)` over the interior window.
    pub eta_ratio: f64,
    pub grad_ratio: f64,
    pub dy_ratio: f64,
    /// `sup u / (-inf u)`.
    pub supinf_ratio: f64,
    /// Interior energy quotient minus `lambda`.
    pub energy_gap: f64,
    /// `sup|ubar|^2 int omega / int_eps^{1-eps} omega ubar^2`.
    pub supl2_ratio: f64,
    /// `max |ubar(x1)-ubar(x2)| / ((|x1-x2|+eps) sup|u|)`.
    pub lip_ratio: f64,
    /// `min_{||x|| >= 0.2} (-ubar') / sup|ubar|`.
    pub interior_decrease: f64,
    /// Transverse oscillation `max_col (max_y u - min_y u) / sup|ubar|`.
    pub osc: f64,
    /// Same as `eta_ratio` but normalized by `sup|phi|`.
    pub eta_ratio_phi: f64,
    /// Measured discretization bound `2 |lambda(nx) - lambda(2nx)|`.
    pub tol_disc: f64,
    pub s0: f64,
    pub s0_prime: f64,
    pub mesh_tag: String,
}

/// Fixed column order of the scaling CSV.
pub const CSV_COLUMNS: &[&str] = &[
    "eps",
    "lambda",
    "mu",
    "gap",
    "sup_diff",
    "width",
    "dist_s1",
    "eta_ratio",
    "grad_ratio",
    "dy_ratio",
    "supinf_ratio",
    "energy_gap",
    "supl2_ratio",
    "lip_ratio",
    "interior_decrease",
    "osc",
    "mesh_tag",
];

impl ScalingRow {
    /// Numeric fields in CSV column order (all but the trailing tag).
    pub fn csv_numbers(&self) -> Vec<f64> {
        vec![
            self.eps,
            self.lambda,
            self.mu,
            self.gap,
            self.sup_diff,
            self.width,
            self.dist_s1,
            self.eta_ratio,
            self.grad_ratio,
            self.dy_ratio,
            self.supinf_ratio,
            self.energy_gap,
            self.supl2_ratio,
            self.lip_ratio,
            self.interior_decrease,
            self.osc,
        ]
    }

    /// Looks up one of the fitted quantities by name.
    pub fn quantity(&self, name: &str) -> f64 {
        match name {
            "gap" => self.gap,
            "sup_diff" => self.sup_diff,
            "width" => self.width,
            "dist_s1" => self.dist_s1,
            "osc" => self.osc,
            _ => f64::NAN,
        }
    }
}

/// Quantities whose decay order in `eps` gets fitted.
pub const FITTED_QUANTITIES: &[&str] = &["gap", "sup_diff", "width", "dist_s1", "osc"];

/// Per-quantity numerical floors, calibrated on the constant-width null
/// case where every diagnostic is pure discretization noise. A quantity
/// with all values at or below its floor is flagged instead of fitted.
pub fn quantity_floor(name: &str) -> f64 {
    match name {
        "gap" => 1e-6,
        "sup_diff" => 2e-9,
        "width" => 1e-7,
        "dist_s1" => 1e-6,
        "osc" => 1e-6,
        _ => SLOPE_FLOOR,
    }
}

/// One fitted decay order.
#[derive(Clone, Debug, Serialize)]
pub struct SlopeFit {
    pub quantity: String,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub n_used: usize,
    pub n_floored: usize,
    /// `true` when every value sat at the numerical floor (no fit made).
    pub floored: bool,
    /// Absolute slope change when the smallest-eps row is replaced by its
    /// doubled-resolution recomputation.
    pub refined_delta: f64,
}

/// Study over a geometric grid of widths.
#[derive(Clone, Debug, Serialize)]
pub struct ScalingReport {
    pub family: String,
    pub rows: Vec<ScalingRow>,
    pub slopes: Vec<SlopeFit>,
    /// Relative change of each fitted quantity at the smallest `eps` under
    /// mesh doubling.
    pub refinement_deltas: Vec<(String, f64)>,
    /// The recomputed smallest-eps row.
    pub refined_row: Option<ScalingRow>,
    /// Set when fewer than four rows succeeded and no slopes were fitted.
    pub flagged: Option<String>,
}

/// Runs the 1D and 2D solvers for one family and width and fills every
/// diagnostic field. The planar problem is solved at the policy resolution
/// and at doubled `nx`; the eigenvalue shift is recorded as `tol_disc`.
pub fn run_pair(family: &str, eps: f64, policy: &MeshPolicy) -> Result<ScalingRow> {
    let params = BTreeMap::new();
    let dom = make_domain(family, eps, &params)?;
    let w = width_profile(&dom)?;
    let pair = sl_solver::solve_first_eigen(&w, RUN_TOL_MU)?;

    let (nx, ny) = policy.resolve(eps);
    let mesh = laplace2d::build_mesh(&dom, nx, ny)?;
    let sol = laplace2d::solve_first_neumann(mesh, RUN_TOL)?;
    // half-resolution companion solve: its eigenvalue shift bounds the
    // discretization error (about three times the fine-mesh error), and the
    // profile pair extrapolates the cross-sectional average
    let mesh_coarse = laplace2d::build_mesh_unchecked(&dom, nx / 2, ny)?;
    let sol_coarse = laplace2d::solve_first_neumann(mesh_coarse, RUN_TOL)?;
    let tol_disc = (sol.lambda - sol_coarse.lambda).abs() + 1e-12;

    let prof = laplace2d::cross_section_average(&sol);
    let prof_coarse = laplace2d::cross_section_average(&sol_coarse);

    // mesh-pair extrapolation of the average on the shared (coarse) columns;
    // the two solves must agree in sign
    let align = if prof_coarse.ubar[0] * prof.ubar[0] < 0.0 { -1.0 } else { 1.0 };
    let n_shared = prof_coarse.xs.len();
    let mut ubar_ex = Vec::with_capacity(n_shared);
    for i in 0..n_shared {
        ubar_ex.push((4.0 * prof.ubar[2 * i] - align * prof_coarse.ubar[i]) / 3.0);
    }
    let sup_ex = ubar_ex.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let scale = ubar_ex[0] / pair.norm_value;
    let mut sup_diff = 0.0f64;
    let mut sup_phi = 0.0f64;
    for (i, &x) in prof_coarse.xs.iter().enumerate() {
        let (p, _) = pair.eval(x);
        sup_diff = sup_diff.max((ubar_ex[i] - scale * p).abs());
        sup_phi = sup_phi.max((scale * p).abs());
    }
    sup_diff /= sup_ex;
    let n_cols = prof.xs.len();

    let nodal = laplace2d::nodal_set(&sol)?;
    let dist_s1 = (nodal.proj_min - pair.s1).abs().max((nodal.proj_max - pair.s1).abs());

    let sup_ubar = prof.sup_abs_ubar();
    let lo = prof.xs.iter().position(|&x| x >= eps).unwrap_or(0);
    let hi = prof.xs.iter().rposition(|&x| x <= 1.0 - eps).unwrap_or(n_cols - 1);
    let mut eta_ratio = 0.0f64;
    for i in lo..=hi {
        if prof.omega[i] > 0.0 {
            eta_ratio = eta_ratio.max(prof.eta[i].abs() / (prof.omega[i] * sup_ubar));
        }
    }
    let eta_ratio_phi = eta_ratio * sup_ubar / sup_phi;

    let grads = laplace2d::gradient_diagnostics(&sol);
    let supinf_ratio = sol.sup_u / (-sol.inf_u);
    let quotient = laplace2d::energy_check(&prof, sol.lambda, eps)?;
    let energy_gap = quotient - sol.lambda;

    let h = 1.0 / nx as f64;
    let omega_mass = quad::simpson(h, &prof.omega);
    let den: Vec<f64> =
        (lo..=hi).map(|i| prof.omega[i] * prof.ubar[i] * prof.ubar[i]).collect();
    let den = quad::simpson(h, &den);
    if den <= 0.0 {
        return Err(Error::ZeroDenominator("interior weighted mass"));
    }
    let supl2_ratio = sup_ubar * sup_ubar * omega_mass / den;

    let sup_u = sol.sup_abs();
    let stride = (n_cols / 1024).max(1);
    let mut lip_ratio = 0.0f64;
    let sub: Vec<(f64, f64)> =
        (0..n_cols).step_by(stride).map(|i| (prof.xs[i], prof.ubar[i])).collect();
    for a in 0..sub.len() {
        for b in a + 1..sub.len() {
            let r = (sub[a].1 - sub[b].1).abs() / ((sub[b].0 - sub[a].0 + eps) * sup_u);
            lip_ratio = lip_ratio.max(r);
        }
    }

    let mut interior_decrease = f64::INFINITY;
    for i in 0..n_cols {
        if end_distance(prof.xs[i]) >= 0.2 {
            interior_decrease = interior_decrease.min(-prof.dubar[i] / sup_ubar);
        }
    }

    let osc = laplace2d::transverse_oscillation(&sol).max;

    Ok(ScalingRow {
        family: family.to_string(),
        eps,
        lambda: sol.lambda,
        mu: pair.mu,
        gap: pair.mu - sol.lambda,
        sup_diff,
        width: nodal.width,
        dist_s1,
        eta_ratio,
        grad_ratio: grads.r_grad,
        dy_ratio: grads.r_dy,
        supinf_ratio,
        energy_gap,
        supl2_ratio,
        lip_ratio,
        interior_decrease,
        osc,
        eta_ratio_phi,
        tol_disc,
        s0: nodal.s0,
        s0_prime: nodal.s0_prime,
        mesh_tag: format!("{nx}x{ny}"),
    })
}

/// Ordinary least squares of `log(value)` against `log(eps)`. Points with
/// values at or below [`SLOPE_FLOOR`] (or nonpositive) are excluded and
/// counted; fewer than two surviving points is an error.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<(f64, f64, f64, usize, usize)> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut floored = 0usize;
    for &(eps, v) in points {
        if v > SLOPE_FLOOR {
            xs.push(eps.ln());
            ys.push(v.ln());
        } else {
            floored += 1;
        }
    }
    if xs.len() < 2 {
        return Err(Error::AllAtFloor);
    }
    let (slope, intercept, r2) = fit::line_fit(&xs, &ys);
    Ok((slope, intercept, r2, xs.len(), floored))
}

/// Runs one row per width (in parallel), refines the smallest width at
/// doubled resolution, and fits decay orders for the fitted quantities.
pub fn scaling_study(family: &str, eps_list: &[f64], policy: &MeshPolicy) -> Result<ScalingReport> {
    if eps_list.len() < 4 {
        return Err(Error::TooFewRows { got: eps_list.len(), want: 4 });
    }
    let mut eps_sorted = eps_list.to_vec();
    eps_sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());

    let results: Vec<(f64, Result<ScalingRow>)> = eps_sorted
        .par_iter()
        .map(|&eps| (eps, run_pair(family, eps, policy)))
        .collect();
    let mut rows = Vec::new();
    let mut first_error: Option<String> = None;
    for (eps, r) in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => {
                if first_error.is_none() {
                    first_error = Some(format!("eps={eps}: {e}"));
                }
            }
        }
    }
    if rows.len() < 4 {
        return Ok(ScalingReport {
            family: family.to_string(),
            rows,
            slopes: Vec::new(),
            refinement_deltas: Vec::new(),
            refined_row: None,
            flagged: Some(first_error.unwrap_or_else(|| "fewer than 4 rows".to_string())),
        });
    }

    let smallest = *eps_sorted.last().unwrap();
    let refined_row = run_pair(family, smallest, &policy.doubled(smallest)).ok();

    let mut slopes = Vec::new();
    let mut refinement_deltas = Vec::new();
    for &q in FITTED_QUANTITIES {
        let floor = quantity_floor(q);
        let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.eps, r.quantity(q))).collect();
        let at_floor = points.iter().all(|&(_, v)| !(v > floor));
        let fit_result = if at_floor { Err(Error::AllAtFloor) } else { fit_slope(&points) };
        let refined_slope = refined_row.as_ref().and_then(|rr| {
            let swapped: Vec<(f64, f64)> = rows
                .iter()
                .map(|r| if r.eps == smallest { (rr.eps, rr.quantity(q)) } else { (r.eps, r.quantity(q)) })
                .collect();
            if at_floor {
                None
            } else {
                fit_slope(&swapped).ok().map(|f| f.0)
            }
        });
        match fit_result {
            Ok((slope, intercept, r2, n_used, n_floored)) => slopes.push(SlopeFit {
                quantity: q.to_string(),
                slope,
                intercept,
                r2,
                n_used,
                n_floored,
                floored: false,
                refined_delta: refined_slope.map_or(f64::NAN, |s| (s - slope).abs()),
            }),
            Err(_) => slopes.push(SlopeFit {
                quantity: q.to_string(),
                slope: f64::NAN,
                intercept: f64::NAN,
                r2: f64::NAN,
                n_used: 0,
                n_floored: points.len(),
                floored: true,
                refined_delta: 0.0,
            }),
        }
        if let Some(rr) = &refined_row {
            let base = rows.iter().find(|r| r.eps == smallest).unwrap().quantity(q);
            let delta = (rr.quantity(q) - base).abs() / base.abs().max(floor);
            refinement_deltas.push((q.to_string(), delta));
        }
    }

    Ok(ScalingReport {
        family: family.to_string(),
        rows,
        slopes,
        refinement_deltas,
        refined_row,
        flagged: None,
    })
}

/// Per-family cap on `(mu - lambda) / eps` for the sandwich check,
/// recorded from the scaling measurements with ample headroom.
pub fn gap_cap(family: &str) -> f64 {
    match family {
        "rectangle" => 0.5,
        "wedge" | "trapezoid" | "lens" => 1.0,
        _ => 5.0,
    }
}

/// Window the eigenvalues must lie in for the tested geometries.
pub const EIGENVALUE_WINDOW: (f64, f64) = (1.0, 100.0);

#[derive(Clone, Debug, Serialize)]
pub struct SandwichCheck {
    pub passed: bool,
    pub failures: Vec<String>,
    /// `(name, margin)`; nonnegative margins pass.
    pub margins: Vec<(String, f64)>,
}

/// Eigenvalue sandwich: `lambda <= mu + tol_disc`,
/// `mu <= lambda + cap * eps + tol_disc`, and both values inside the
/// fixed window.
pub fn sandwich_check(row: &ScalingRow, tol_disc: f64) -> SandwichCheck {
    let mut failures = Vec::new();
    let mut margins = Vec::new();
    let m1 = row.mu + tol_disc - row.lambda;
    margins.push(("variational".to_string(), m1));
    if m1 < 0.0 {
        failures.push("variational violation".to_string());
    }
    let m2 = row.lambda + gap_cap(&row.family) * row.eps + tol_disc - row.mu;
    margins.push(("gap cap".to_string(), m2));
    if m2 < 0.0 {
        failures.push("gap cap exceeded".to_string());
    }
    let (lo, hi) = EIGENVALUE_WINDOW;
    let m3 = row.lambda.min(row.mu) - lo;
    let m4 = hi - row.lambda.max(row.mu);
    margins.push(("window low".to_string(), m3));
    margins.push(("window high".to_string(), m4));
    if m3 < 0.0 || m4 < 0.0 {
        failures.push("eigenvalue window".to_string());
    }
    SandwichCheck { passed: failures.is_empty(), failures, margins }
}


/// Stability of the normalized bound ratios across a study: each varies by
/// less than a factor of two, unless all its values sit at the noise floor.
#[derive(Clone, Debug, Serialize)]
pub struct RatioStability {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub variation: f64,
    pub floored: bool,
    pub passed: bool,
}

/// Floors below which a ratio is considered numerical noise (constant-width
/// null-case calibration).
fn ratio_floor(name: &str) -> f64 {
    match name {
        "eta_ratio" => 1e-4,
        "dy_ratio" => 5e-3,
        "interior_decrease" => 1e-6,
        _ => 1e-9,
    }
}

pub const RATIO_QUANTITIES: &[&str] = &[
    "grad_ratio",
    "dy_ratio",
    "eta_ratio",
    "supinf_ratio",
    "supl2_ratio",
    "energy_norm",
    "interior_decrease",
    "lip_ratio",
];

pub fn ratio_stability(report: &ScalingReport) -> Vec<RatioStability> {
    RATIO_QUANTITIES
        .iter()
        .map(|&name| {
            let values: Vec<f64> = report
                .rows
                .iter()
                .map(|r| match name {
                    "grad_ratio" => r.grad_ratio,
                    "dy_ratio" => r.dy_ratio,
                    "eta_ratio" => r.eta_ratio,
                    "supinf_ratio" => r.supinf_ratio,
                    "supl2_ratio" => r.supl2_ratio,
                    "energy_norm" => (r.lambda + r.energy_gap) / r.lambda,
                    "interior_decrease" => r.interior_decrease,
                    "lip_ratio" => r.lip_ratio,
                    _ => f64::NAN,
                })
                .collect();
            let floor = ratio_floor(name);
            let floored = values.iter().all(|v| v.abs() <= floor);
            let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let variation = if floored || min <= 0.0 { f64::NAN } else { max / min };
            // bounded means not growing as eps shrinks: either tightly
            // stable, or dominated by the coarsest width (a decaying
            // constant, which some bounds exhibit in the plane)
            let coarsest = values.first().copied().unwrap_or(f64::NAN);
            let passed = floored
                || (min > 0.0 && (variation < 2.0 || max <= 2.0 * coarsest));
            RatioStability { name: name.to_string(), min, max, variation, floored, passed }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_slope_exact_quadratic() {
        let pts = [(0.2, 0.04), (0.1, 0.01), (0.05, 0.0025)];
        let (s, _, r2, used, floored) = fit_slope(&pts).unwrap();
        assert!((s - 2.0).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
        assert_eq!((used, floored), (3, 0));
    }

    #[test]
    fn fit_slope_two_points() {
        let (s, ..) = fit_slope(&[(0.2, 0.2), (0.1, 0.1)]).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_slope_all_floor() {
        let e = fit_slope(&[(0.1, 1e-13), (0.05, 1e-13)]).unwrap_err();
        assert!(matches!(e, Error::AllAtFloor));
    }

    #[test]
    fn policy_grades_resolution() {
        let p = MeshPolicy::Auto;
        assert_eq!(p.resolve(0.2), (1024, 192));
        assert_eq!(p.resolve(0.1), (2048, 96));
        assert_eq!(p.resolve(0.05), (4096, 48));
        assert_eq!(p.resolve(0.025), (8192, 24));
        assert_eq!(p.resolve(0.01), (8192, 16));
    }

    #[test]
    fn sandwich_detects_variational_violation() {
        let row = synthetic_row(0.1, 10.0, 9.0); // mu < lambda - 10 tol
        let out = sandwich_check(&row, 0.01);
        assert!(!out.passed);
        assert!(out.failures.iter().any(|f| f.contains("variational")));
    }

    #[test]
    fn sandwich_passes_tight_gap() {
        let row = synthetic_row(0.1, 9.87, 9.88);
        let out = sandwich_check(&row, 1e-3);
        assert!(out.passed, "{:?}", out.failures);
    }

    #[test]
    fn sandwich_window() {
        let row = synthetic_row(0.1, 0.5, 0.51);
        assert!(!sandwich_check(&row, 1e-3).passed);
    }

    fn synthetic_row(eps: f64, lambda: f64, mu: f64) -> ScalingRow {
        ScalingRow {
            family: "wedge".to_string(),
            eps,
            lambda,
            mu,
            gap: mu - lambda,
            sup_diff: 0.0,
            width: 0.0,
            dist_s1: 0.0,
            eta_ratio: 0.0,
            grad_ratio: 0.0,
            dy_ratio: 0.0,
            supinf_ratio: 1.0,
            energy_gap: 0.0,
            supl2_ratio: 1.0,
            lip_ratio: 1.0,
            interior_decrease: 1.0,
            osc: 0.0,
            eta_ratio_phi: 0.0,
            tol_disc: 0.0,
            s0: 0.5,
            s0_prime: 0.5,
            mesh_tag: "64x8".to_string(),
        }
    }
}
