//! First nonzero Neumann eigenpair of the weighted interval problem
//! `-(omega phi')' = mu omega phi` on `[0, 1]`.
//!
//! The weight may vanish at either endpoint. Near each end the solution is
//! built as the fixed point of the integral system
//!
//! ```text
//! phi(x)  = phi(0) + int_0^x phi1
//! phi1(x) = -(1/omega(x)) int_0^x mu omega phi
//! ```
//!
//! which contracts on a patch `[0, delta']` with `mu delta'^2 <= 1/4`. From
//! the patch boundary the first-order system in `(phi, omega phi')` is
//! integrated adaptively; working with `omega phi'` avoids dividing by a
//! vanishing weight at the far end. The eigenvalue is located by matching
//! the smallest zero of the left shot against the largest zero of the right
//! shot, which move monotonically in opposite directions as `mu` grows, so
//! plain bisection on the mismatch is globally safe.

use crate::error::{Error, Result};
use crate::geometry::WeightProfile;
use crate::numerics::{bisect, interp, quad, rk45};

/// Shooting direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Number of panels in the endpoint patch grid.
const PATCH_PANELS: usize = 2048;

/// Default resampling grid for a solved eigenpair.
const GRID_NODES: usize = 4097;

/// Guard distance from a singular far endpoint.
const FAR_GUARD: f64 = 1e-7;

/// Local fixed-point solution on `[0, delta]` (in the shot's own
/// coordinates; the right side sees the reflected weight).
#[derive(Clone, Debug)]
pub struct LocalSolution {
    pub xs: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub delta: f64,
    pub iterations: usize,
}

/// One-sided shot: samples of `(phi, phi')` in global coordinates, sorted
/// by `x`, plus the relevant zero if the solution changes sign.
#[derive(Clone, Debug)]
pub struct ShootResult {
    pub mu: f64,
    pub side: Side,
    /// Value of `phi` at the far end of the integration range.
    pub phi_end: f64,
    /// Smallest zero for a left shot, largest zero for a right shot.
    pub s_zero: Option<f64>,
    /// `(x, phi, phi')` at every accepted sample, ascending in `x`.
    pub samples: Vec<(f64, f64, f64)>,
}

/// First nonzero Neumann eigenpair on the unit interval.
#[derive(Clone, Debug)]
pub struct SLEigenpair {
    pub mu: f64,
    pub xs: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    /// The unique interior zero of `phi`.
    pub s1: f64,
    /// Value at 0 after normalization.
    pub norm_value: f64,
}

impl SLEigenpair {
    /// Hermite interpolation of `(phi, phi')` on the stored grid.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        interp::eval_sorted(&self.xs, &self.phi, &self.dphi, x)
    }
}

/// Fixed point of the endpoint integral system with `phi(0) = 1`.
/// `from_left = false` works on the reflected weight, so its output is in
/// distance-from-1 coordinates.
pub fn picard_local(w: &WeightProfile, mu: f64, from_left: bool) -> Result<LocalSolution> {
    picard_local_with_value(w, mu, from_left, 1.0)
}

/// Same iteration started from `phi(0) = value`; `value = 0` reproduces the
/// zero solution (uniqueness of the degenerate initial-value problem).
pub fn picard_local_with_value(
    w: &WeightProfile,
    mu: f64,
    from_left: bool,
    value: f64,
) -> Result<LocalSolution> {
    if mu < 0.0 {
        return Err(Error::InvalidTolerance(mu));
    }
    let w_eff = if from_left { w.clone() } else { w.reflected() };
    let delta = patch_radius(&w_eff, mu)?;
    let n = PATCH_PANELS;
    let h = delta / n as f64;
    let xs: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let om: Vec<f64> = xs.iter().map(|&x| w_eff.eval(x)).collect();
    for i in 1..=n {
        if om[i] <= 0.0 {
            return Err(Error::NonPositiveWeight(xs[i]));
        }
    }
    let singular = om[0] <= 0.0;

    let mut phi = vec![value; n + 1];
    let mut dphi = vec![0.0; n + 1];
    let mut scratch = vec![0.0; n + 1];
    let tol = 1e-14 * value.abs().max(1.0);
    for it in 0..200 {
        for i in 0..=n {
            scratch[i] = mu * om[i] * phi[i];
        }
        let cum = quad::cumulative(h, &scratch);
        let mut new_dphi = vec![0.0; n + 1];
        for i in 1..=n {
            new_dphi[i] = -cum[i] / om[i];
        }
        if !singular {
            new_dphi[0] = 0.0; // cum[0] = 0
        }
        let cum_phi = quad::cumulative(h, &new_dphi);
        let mut diff: f64 = 0.0;
        for i in 0..=n {
            let np = value + cum_phi[i];
            diff = diff.max((np - phi[i]).abs()).max((new_dphi[i] - dphi[i]).abs());
            phi[i] = np;
        }
        dphi = new_dphi;
        if diff < tol {
            return Ok(LocalSolution { xs, phi, dphi, delta, iterations: it + 1 });
        }
    }
    Err(Error::PicardNoContraction(200))
}

/// Patch radius: never beyond the monotone initial interval of a singular
/// weight, and small enough that the iteration contracts with factor 1/4.
fn patch_radius(w_eff: &WeightProfile, mu: f64) -> Result<f64> {
    let mu_bar = mu.max(1.0);
    let mut delta = 0.5f64.min(0.5 / mu_bar.sqrt());
    if w_eff.singular_left() {
        let mono = w_eff.monotone_from_left(2048);
        if mono < 1e-3 {
            return Err(Error::SingularNotMonotone);
        }
        delta = delta.min(mono);
    } else {
        // regular endpoint: the contraction constant picks up the ratio
        // sup/inf of the weight over the patch
        for _ in 0..60 {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for i in 0..=64 {
                let v = w_eff.eval(delta * i as f64 / 64.0);
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if lo <= 0.0 {
                return Err(Error::NonPositiveWeight(0.0));
            }
            if mu_bar * delta * delta * (hi / lo) <= 0.25 {
                break;
            }
            delta *= 0.5;
        }
    }
    if delta < 1e-8 {
        return Err(Error::SingularNotMonotone);
    }
    Ok(delta)
}

/// One-sided shot at trial eigenvalue `mu`: endpoint patch plus adaptive
/// integration of `(phi, omega phi')` toward the far end. `step` caps the
/// integrator step size and must not exceed 1e-3.
pub fn shoot(w: &WeightProfile, mu: f64, side: Side, step: f64) -> Result<ShootResult> {
    if !(step > 0.0 && step <= 1e-3) {
        return Err(Error::InvalidStep(step));
    }
    if mu <= 0.0 {
        return Err(Error::InvalidTolerance(mu));
    }
    let local = shoot_local(w, mu, side, step)?;
    Ok(globalize(local, w, mu, side))
}

/// Shot in local coordinates (distance from the shot's own origin).
struct LocalShot {
    xs: Vec<f64>,
    phi: Vec<f64>,
    dphi: Vec<f64>,
    zero: Option<f64>,
}

fn shoot_local(w: &WeightProfile, mu: f64, side: Side, step: f64) -> Result<LocalShot> {
    let w_eff = match side {
        Side::Left => w.clone(),
        Side::Right => w.reflected(),
    };
    let patch = picard_local(w, mu, side == Side::Left)?;
    let far_singular = w_eff.singular_right();
    let x_stop = if far_singular { 1.0 - FAR_GUARD } else { 1.0 };

    let mut xs = patch.xs.clone();
    let mut phi = patch.phi.clone();
    let mut dphi = patch.dphi.clone();

    if patch.delta < x_stop {
        let n = patch.xs.len() - 1;
        let q0 = w_eff.eval(patch.delta) * patch.dphi[n];
        let w_rhs = w_eff.clone();
        let rhs = move |x: f64, y: [f64; 2]| {
            let om = w_rhs.eval(x);
            [y[1] / om, -mu * om * y[0]]
        };
        let opt = rk45::AdaptiveOptions {
            abs_tol: 1e-14,
            rel_tol: 1e-14,
            max_step: step,
            min_step: 1e-13,
        };
        let trace = rk45::integrate(&rhs, patch.delta, [patch.phi[n], q0], x_stop, &opt);
        for s in trace.samples.iter().skip(1) {
            xs.push(s.x);
            phi.push(s.y[0]);
            dphi.push(s.dy[0]); // phi' = (omega phi') / omega, from the RHS
        }
        if !trace.completed {
            // Acceptable only if the sign change happened before the failure
            // point (the solution dives near a singular far end).
            let crossed = phi.windows(2).any(|p| p[0].signum() != p[1].signum());
            if !crossed {
                return Err(Error::NonFiniteState(*xs.last().unwrap()));
            }
        }
    }

    // first sign change, refined on the cubic interpolant
    let mut zero = None;
    for i in 1..xs.len() {
        if phi[i - 1] == 0.0 {
            zero = Some(xs[i - 1]);
            break;
        }
        if (phi[i - 1] > 0.0) != (phi[i] > 0.0) {
            let (x0, f0, d0) = (xs[i - 1], phi[i - 1], dphi[i - 1]);
            let (x1, f1, d1) = (xs[i], phi[i], dphi[i]);
            let g = move |x: f64| interp::hermite(x0, f0, d0, x1, f1, d1, x).0;
            zero = Some(bisect(g, x0, x1, 1e-13));
            break;
        }
    }
    Ok(LocalShot { xs, phi, dphi, zero })
}

fn globalize(local: LocalShot, _w: &WeightProfile, mu: f64, side: Side) -> ShootResult {
    let phi_end = *local.phi.last().unwrap();
    match side {
        Side::Left => ShootResult {
            mu,
            side,
            phi_end,
            s_zero: local.zero,
            samples: local
                .xs
                .iter()
                .zip(&local.phi)
                .zip(&local.dphi)
                .map(|((&x, &p), &d)| (x, p, d))
                .collect(),
        },
        Side::Right => {
            let mut samples: Vec<(f64, f64, f64)> = local
                .xs
                .iter()
                .zip(&local.phi)
                .zip(&local.dphi)
                .map(|((&x, &p), &d)| (1.0 - x, p, -d))
                .collect();
            samples.reverse();
            ShootResult { mu, side, phi_end, s_zero: local.zero.map(|z| 1.0 - z), samples }
        }
    }
}

/// Smallest zero of the left-shot solution at eigenvalue candidate `mu`,
/// or `None` while the solution is positive on `[0, 1)`.
pub fn s1_of_mu(w: &WeightProfile, mu: f64) -> Result<Option<f64>> {
    Ok(shoot(w, mu, Side::Left, 1e-3)?.s_zero)
}

/// Upper cap for the eigenvalue bracket search.
const MU_CAP: f64 = 1e6;

/// Solves for the first nonzero Neumann eigenpair. `tol_mu` bounds the
/// residual zero mismatch between the two shots (at least 1e-12).
pub fn solve_first_eigen(w: &WeightProfile, tol_mu: f64) -> Result<SLEigenpair> {
    solve_first_eigen_on_grid(w, tol_mu, GRID_NODES)
}

/// Same as [`solve_first_eigen`] with an explicit resampling grid size.
pub fn solve_first_eigen_on_grid(
    w: &WeightProfile,
    tol_mu: f64,
    grid_nodes: usize,
) -> Result<SLEigenpair> {
    if tol_mu < 1e-12 {
        return Err(Error::InvalidTolerance(tol_mu));
    }
    assert!(grid_nodes >= 17);
    let step = 1e-3;
    // mismatch between the left smallest zero and the right largest zero;
    // +inf encodes "no zero yet", which only happens below the eigenvalue
    let eval = |mu: f64| -> Result<(f64, ShootResult, ShootResult)> {
        let left = shoot(w, mu, Side::Left, step)?;
        let right = shoot(w, mu, Side::Right, step)?;
        let m = match (left.s_zero, right.s_zero) {
            (Some(a), Some(b)) => a - b,
            _ => f64::INFINITY,
        };
        Ok((m, left, right))
    };

    let mut lo = 4.0;
    let (mut m_lo, ..) = eval(lo)?;
    while m_lo <= 0.0 {
        lo *= 0.5;
        if lo < 1e-6 {
            return Err(Error::NoBracket(lo));
        }
        m_lo = eval(lo)?.0;
    }
    let mut hi = lo;
    loop {
        hi *= 2.0;
        if hi > MU_CAP {
            return Err(Error::NoBracket(MU_CAP));
        }
        if eval(hi)?.0 < 0.0 {
            break;
        }
    }

    let mut best: Option<(f64, f64, ShootResult, ShootResult)> = None;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (m, l, r) = eval(mid)?;
        let better = best.as_ref().map_or(true, |b| m.abs() < b.1.abs());
        if better && m.is_finite() {
            best = Some((mid, m, l, r));
        }
        if m.is_finite() && m.abs() < tol_mu {
            break;
        }
        if m > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * hi {
            break;
        }
    }
    let (mu, _m, left, right) = best.ok_or(Error::NoBracket(hi))?;

    glue(w, mu, left, right, grid_nodes)
}

/// Joins the two shots at their common zero, scaling the right branch so
/// values and derivatives agree, then resamples on a uniform grid.
fn glue(
    _w: &WeightProfile,
    mu: f64,
    left: ShootResult,
    right: ShootResult,
    grid_nodes: usize,
) -> Result<SLEigenpair> {
    let s_left = left.s_zero.ok_or(Error::NoSignChange)?;
    let s_right = right.s_zero.ok_or(Error::NoSignChange)?;
    let s1 = 0.5 * (s_left + s_right);

    let (lx, lp, ld) = split_columns(&left.samples);
    let (rx, rp, rd) = split_columns(&right.samples);
    let (_, dl) = interp::eval_sorted(&lx, &lp, &ld, s1);
    let (vl, _) = interp::eval_sorted(&lx, &lp, &ld, s1);
    let (vr, dr) = interp::eval_sorted(&rx, &rp, &rd, s1);
    if dr.abs() == 0.0 {
        return Err(Error::ZeroDenominator("glue derivative"));
    }
    let kappa = dl / dr;
    // both branches vanish at s1 up to the zero-matching tolerance
    let mismatch = (vl.abs() + (kappa * vr).abs()) / dl.abs().max(1e-300);
    if mismatch > 1e-8 {
        return Err(Error::GlueMismatch(mismatch));
    }

    let n = grid_nodes;
    let mut xs = Vec::with_capacity(n);
    let mut phi = Vec::with_capacity(n);
    let mut dphi = Vec::with_capacity(n);
    for i in 0..n {
        let x = i as f64 / (n - 1) as f64;
        let (v, d) = if x <= s1 {
            interp::eval_sorted(&lx, &lp, &ld, x)
        } else {
            let (v, d) = interp::eval_sorted(&rx, &rp, &rd, x);
            (kappa * v, kappa * d)
        };
        xs.push(x);
        phi.push(v);
        dphi.push(d);
    }
    let norm_value = phi[0];
    Ok(SLEigenpair { mu, xs, phi, dphi, s1, norm_value })
}

fn split_columns(samples: &[(f64, f64, f64)]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut xs = Vec::with_capacity(samples.len());
    let mut ps = Vec::with_capacity(samples.len());
    let mut ds = Vec::with_capacity(samples.len());
    for &(x, p, d) in samples {
        xs.push(x);
        ps.push(p);
        ds.push(d);
    }
    (xs, ps, ds)
}

/// Rayleigh quotient of a sampled function against the weight:
/// `int omega f'^2 / int omega (f - c)^2` with `c` the weighted mean of `f`.
/// The samples must lie on a uniform grid and include both endpoints.
pub fn rayleigh_quotient_1d(w: &WeightProfile, xs: &[f64], f: &[f64], df: &[f64]) -> Result<f64> {
    let n = xs.len();
    assert!(n >= 3 && f.len() == n && df.len() == n);
    let h = xs[1] - xs[0];
    let om: Vec<f64> = xs.iter().map(|&x| w.eval(x)).collect();
    let mass = quad::simpson(h, &om);
    if mass <= 0.0 {
        return Err(Error::ZeroDenominator("weight mass"));
    }
    let wf: Vec<f64> = om.iter().zip(f).map(|(&o, &v)| o * v).collect();
    let mean = quad::simpson(h, &wf) / mass;
    let num_ig: Vec<f64> = om.iter().zip(df).map(|(&o, &d)| o * d * d).collect();
    let den_ig: Vec<f64> =
        om.iter().zip(f).map(|(&o, &v)| o * (v - mean) * (v - mean)).collect();
    let den = quad::simpson(h, &den_ig);
    if den <= 0.0 {
        return Err(Error::ZeroDenominator("weighted variance"));
    }
    Ok(quad::simpson(h, &num_ig) / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_weight() -> WeightProfile {
        WeightProfile::new(|_| 1.0, 2).unwrap()
    }

    #[test]
    fn picard_constant_weight_zero_mu() {
        let w = unit_weight();
        let loc = picard_local(&w, 0.0, true).unwrap();
        for (&p, &d) in loc.phi.iter().zip(&loc.dphi) {
            assert!((p - 1.0).abs() < 1e-15 && d.abs() < 1e-15);
        }
    }

    #[test]
    fn picard_zero_initial_data_stays_zero() {
        let w = WeightProfile::new(|x| x, 2).unwrap();
        let loc = picard_local_with_value(&w, 5.0, true, 0.0).unwrap();
        for (&p, &d) in loc.phi.iter().zip(&loc.dphi) {
            assert!(p.abs() < 1e-14 && d.abs() < 1e-14);
        }
    }

    #[test]
    fn picard_linear_weight_matches_bessel_series() {
        // -(x phi')' = x phi  has phi = J0(x); series 1 - x^2/4 + x^4/64 - ...
        let w = WeightProfile::new(|x| x, 2).unwrap();
        let loc = picard_local(&w, 1.0, true).unwrap();
        let series = |x: f64| {
            let mut term = 1.0;
            let mut sum = 1.0;
            for m in 1..30 {
                term *= -(x * x) / (4.0 * (m * m) as f64);
                sum += term;
            }
            sum
        };
        let (v, _) = interp::eval_sorted(&loc.xs, &loc.phi, &loc.dphi, 0.1);
        assert!((v - series(0.1)).abs() < 1e-10, "phi(0.1) = {v}");
        assert!((v - 0.997_501_562_066_040_03).abs() < 1e-9);
    }

    #[test]
    fn shoot_constant_weight_zeros() {
        let w = unit_weight();
        let r = shoot(&w, PI * PI, Side::Left, 1e-3).unwrap();
        assert!((r.s_zero.unwrap() - 0.5).abs() < 1e-10);
        let r2 = shoot(&w, 4.0 * PI * PI, Side::Left, 1e-3).unwrap();
        assert!((r2.s_zero.unwrap() - 0.25).abs() < 1e-10);
    }

    #[test]
    fn shoot_rejects_bad_step() {
        let w = unit_weight();
        assert!(matches!(shoot(&w, 1.0, Side::Left, 0.1), Err(Error::InvalidStep(_))));
    }

    #[test]
    fn s1_none_below_first_zero() {
        // cos(x) has no zero on [0, 1] at mu = 1
        let w = unit_weight();
        assert!(s1_of_mu(&w, 1.0).unwrap().is_none());
    }

    #[test]
    fn s1_monotone_constant_weight() {
        let w = unit_weight();
        let a = s1_of_mu(&w, PI * PI).unwrap().unwrap();
        let b = s1_of_mu(&w, 4.0 * PI * PI).unwrap().unwrap();
        assert!((a - 0.5).abs() < 1e-10);
        assert!((b - 0.25).abs() < 1e-10);
        assert!(b < a);
    }

    #[test]
    fn solve_constant_weight() {
        let w = unit_weight();
        let pair = solve_first_eigen(&w, 1e-10).unwrap();
        assert!((pair.mu - PI * PI).abs() / (PI * PI) < 1e-9, "mu = {}", pair.mu);
        assert!((pair.s1 - 0.5).abs() < 1e-9);
        for (&x, &p) in pair.xs.iter().zip(&pair.phi) {
            assert!((p - (PI * x).cos()).abs() < 1e-8, "phi({x}) = {p}");
        }
        assert!((pair.norm_value - 1.0).abs() < 1e-12);
        assert!(pair.dphi[0].abs() < 1e-10);
        assert!(pair.dphi[pair.dphi.len() - 1].abs() < 1e-8);
    }

    #[test]
    fn rayleigh_examples() {
        let w = unit_weight();
        let n = 4097;
        let xs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let f: Vec<f64> = xs.iter().map(|&x| (PI * x).cos()).collect();
        let df: Vec<f64> = xs.iter().map(|&x| -PI * (PI * x).sin()).collect();
        let q = rayleigh_quotient_1d(&w, &xs, &f, &df).unwrap();
        assert!((q - PI * PI).abs() < 1e-9);

        let f2: Vec<f64> = xs.iter().map(|&x| x - 0.5).collect();
        let df2 = vec![1.0; n];
        let q2 = rayleigh_quotient_1d(&w, &xs, &f2, &df2).unwrap();
        assert!((q2 - 12.0).abs() < 1e-9);
        assert!(q2 >= PI * PI);
    }
}
