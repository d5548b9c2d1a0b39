//! Thin convex planar domains given by two boundary graphs, their
//! cross-sectional width profiles, and the convexity-derived inequality
//! checks those profiles must satisfy.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::quad;

/// Absolute threshold below which an endpoint width counts as zero.
pub const SINGULAR_TOL: f64 = 1e-14;

/// Slack for the midpoint concavity/convexity tests.
pub const CONVEXITY_TOL: f64 = 1e-12;

type Graph = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Convex domain `{(x, y) : 0 <= x <= 1, g_bot(x) <= y <= g_top(x)}` with
/// `g_top` concave, `g_bot` convex and both graphs inside `(-eps, eps)`.
#[derive(Clone)]
pub struct Domain2D {
    g_top: Graph,
    g_bot: Graph,
    eps: f64,
    family_name: String,
    params: BTreeMap<String, f64>,
}

impl fmt::Debug for Domain2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Domain2D")
            .field("family", &self.family_name)
            .field("eps", &self.eps)
            .field("params", &self.params)
            .finish()
    }
}

impl Domain2D {
    #[inline]
    pub fn top(&self, x: f64) -> f64 {
        (self.g_top)(x)
    }

    #[inline]
    pub fn bot(&self, x: f64) -> f64 {
        (self.g_bot)(x)
    }

    #[inline]
    pub fn width(&self, x: f64) -> f64 {
        self.top(x) - self.bot(x)
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn family_name(&self) -> &str {
        &self.family_name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    /// Checks all construction invariants on a `grid_size + 1` point grid:
    /// concavity of the top graph, convexity of the bottom one, ordering,
    /// containment in the slab of half-width `eps`, and `width <= 2 eps`.
    pub fn validate(&self, grid_size: usize) -> Result<()> {
        let n = grid_size.max(16);
        let h = 1.0 / n as f64;
        let xs: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        let top: Vec<f64> = xs.iter().map(|&x| self.top(x)).collect();
        let bot: Vec<f64> = xs.iter().map(|&x| self.bot(x)).collect();
        for i in 0..=n {
            let x = xs[i];
            if !(top[i].is_finite() && bot[i].is_finite()) {
                return Err(Error::InvalidDomain { invariant: "finite_graphs", at: x });
            }
            if top[i].abs() >= self.eps + CONVEXITY_TOL || bot[i].abs() >= self.eps + CONVEXITY_TOL
            {
                return Err(Error::InvalidDomain { invariant: "slab_containment", at: x });
            }
            if top[i] - bot[i] > 2.0 * self.eps + CONVEXITY_TOL {
                return Err(Error::InvalidDomain { invariant: "width_bound", at: x });
            }
            if i > 0 && i < n && top[i] - bot[i] <= 0.0 {
                return Err(Error::InvalidDomain { invariant: "positive_interior_width", at: x });
            }
        }
        for i in 1..n {
            if top[i] + CONVEXITY_TOL < 0.5 * (top[i - 1] + top[i + 1]) {
                return Err(Error::InvalidDomain { invariant: "top_concavity", at: xs[i] });
            }
            if bot[i] - CONVEXITY_TOL > 0.5 * (bot[i - 1] + bot[i + 1]) {
                return Err(Error::InvalidDomain { invariant: "bottom_convexity", at: xs[i] });
            }
        }
        Ok(())
    }
}

/// Cross-sectional volume profile `omega` on `[0, 1]` for ambient dimension
/// `n`; `omega^{1/(n-1)}` is concave for slices of a convex body.
#[derive(Clone)]
pub struct WeightProfile {
    omega: Graph,
    n: u32,
    singular_left: bool,
    singular_right: bool,
}

impl fmt::Debug for WeightProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightProfile")
            .field("n", &self.n)
            .field("singular_left", &self.singular_left)
            .field("singular_right", &self.singular_right)
            .finish()
    }
}

impl WeightProfile {
    /// Wraps a weight function, detecting endpoint singularity and checking
    /// positivity on the open interval plus monotonicity near singular ends.
    pub fn new(omega: impl Fn(f64) -> f64 + Send + Sync + 'static, n: u32) -> Result<Self> {
        assert!(n >= 2, "ambient dimension must be at least 2");
        let omega: Graph = Arc::new(omega);
        let singular_left = omega(0.0).abs() <= SINGULAR_TOL;
        let singular_right = omega(1.0).abs() <= SINGULAR_TOL;
        let w = WeightProfile { omega, n, singular_left, singular_right };
        w.check_positive(1024)?;
        if singular_left && w.monotone_from_left(1024) < 1.0 / 1024.0 {
            return Err(Error::SingularNotMonotone);
        }
        if singular_right && w.reflected().monotone_from_left(1024) < 1.0 / 1024.0 {
            return Err(Error::SingularNotMonotone);
        }
        Ok(w)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.omega)(x)
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn singular_left(&self) -> bool {
        self.singular_left
    }

    pub fn singular_right(&self) -> bool {
        self.singular_right
    }

    /// The profile of the reversed interval, `x -> omega(1 - x)`.
    pub fn reflected(&self) -> WeightProfile {
        let om = self.omega.clone();
        WeightProfile {
            omega: Arc::new(move |x| om(1.0 - x)),
            n: self.n,
            singular_left: self.singular_right,
            singular_right: self.singular_left,
        }
    }

    fn check_positive(&self, grid: usize) -> Result<()> {
        for i in 1..grid {
            let x = i as f64 / grid as f64;
            if self.eval(x) <= 0.0 {
                return Err(Error::NonPositiveWeight(x));
            }
        }
        Ok(())
    }

    /// Length of the largest initial interval `[0, m]` (capped at 1/2) on
    /// which the weight is nondecreasing, detected on a scan grid.
    pub(crate) fn monotone_from_left(&self, grid: usize) -> f64 {
        let h = 0.5 / grid as f64;
        let mut prev = self.eval(0.0);
        for i in 1..=grid {
            let x = i as f64 * h;
            let v = self.eval(x);
            if v < prev * (1.0 - 1e-12) - 1e-300 {
                return (i - 1) as f64 * h;
            }
            prev = v;
        }
        0.5
    }
}

/// Instantiates one of the built-in families.
///
/// Families: `rectangle` (constant width `eps`), `wedge` (triangle with
/// apex at the origin, width `eps x`), `trapezoid` (flat bottom, width
/// `(eps/2)(1+x)`), `lens` (parabolic, symmetric about `x = 1/2`, width
/// `4 eps x (1-x)`), and `polygon` (piecewise-linear graphs through
/// `top0..topK` / `bot0..botK` values at uniform abscissae).
pub fn make_domain(family: &str, eps: f64, params: &BTreeMap<String, f64>) -> Result<Domain2D> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::InvalidParam {
            family: family.to_string(),
            name: "eps".to_string(),
            reason: format!("must lie in (0, 0.5], got {eps}"),
        });
    }
    let reject_params = |family: &str| -> Result<()> {
        if let Some(name) = params.keys().next() {
            return Err(Error::InvalidParam {
                family: family.to_string(),
                name: name.clone(),
                reason: "family takes no parameters".to_string(),
            });
        }
        Ok(())
    };
    let dom = match family {
        "rectangle" => {
            reject_params(family)?;
            let h = eps / 2.0;
            Domain2D {
                g_top: Arc::new(move |_| h),
                g_bot: Arc::new(move |_| -h),
                eps,
                family_name: family.to_string(),
                params: params.clone(),
            }
        }
        "wedge" => {
            reject_params(family)?;
            let s = eps / 2.0;
            Domain2D {
                g_top: Arc::new(move |x| s * x),
                g_bot: Arc::new(move |x| -s * x),
                eps,
                family_name: family.to_string(),
                params: params.clone(),
            }
        }
        "trapezoid" => {
            // flat bottom, sloped top; width (eps/2)(1+x)
            reject_params(family)?;
            let q = eps / 4.0;
            Domain2D {
                g_top: Arc::new(move |x| q * (1.0 + 2.0 * x)),
                g_bot: Arc::new(move |_| -q),
                eps,
                family_name: family.to_string(),
                params: params.clone(),
            }
        }
        "lens" => {
            reject_params(family)?;
            let a = 2.0 * eps;
            Domain2D {
                g_top: Arc::new(move |x| a * x * (1.0 - x)),
                g_bot: Arc::new(move |x| -a * x * (1.0 - x)),
                eps,
                family_name: family.to_string(),
                params: params.clone(),
            }
        }
        "polygon" => {
            let top = collect_polyline(family, params, "top")?;
            let bot = collect_polyline(family, params, "bot")?;
            for key in params.keys() {
                if !key.starts_with("top") && !key.starts_with("bot") {
                    return Err(Error::InvalidParam {
                        family: family.to_string(),
                        name: key.clone(),
                        reason: "expected top<i> or bot<i>".to_string(),
                    });
                }
            }
            Domain2D {
                g_top: Arc::new(move |x| eval_polyline(&top, x)),
                g_bot: Arc::new(move |x| eval_polyline(&bot, x)),
                eps,
                family_name: family.to_string(),
                params: params.clone(),
            }
        }
        other => return Err(Error::UnknownFamily(other.to_string())),
    };
    dom.validate(1024)?;
    Ok(dom)
}

fn collect_polyline(family: &str, params: &BTreeMap<String, f64>, prefix: &str) -> Result<Vec<f64>> {
    let mut vals = Vec::new();
    loop {
        let key = format!("{prefix}{}", vals.len());
        match params.get(&key) {
            Some(&v) => vals.push(v),
            None => break,
        }
    }
    if vals.len() < 2 {
        return Err(Error::InvalidParam {
            family: family.to_string(),
            name: format!("{prefix}0"),
            reason: format!("polygon needs {prefix}0..{prefix}K with K >= 1"),
        });
    }
    Ok(vals)
}

fn eval_polyline(vals: &[f64], x: f64) -> f64 {
    let k = vals.len() - 1;
    let t = (x.clamp(0.0, 1.0)) * k as f64;
    let i = (t.floor() as usize).min(k - 1);
    let frac = t - i as f64;
    vals[i] * (1.0 - frac) + vals[i + 1] * frac
}

/// The width profile of a graph domain: `omega(x) = g_top(x) - g_bot(x)`
/// with ambient dimension 2.
pub fn width_profile(dom: &Domain2D) -> Result<WeightProfile> {
    let d = dom.clone();
    WeightProfile::new(move |x| d.width(x), 2)
}

/// One named inequality check with its worst observed slack
/// (`slack = rhs - lhs`, so negative means violated).
#[derive(Clone, Debug, serde::Serialize)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub passed: bool,
    pub min_slack: f64,
    pub at: (f64, f64),
    /// The explicit constant used on the right-hand side, when one exists.
    pub constant: Option<f64>,
}

/// Report of all weight inequalities over a pair grid.
#[derive(Clone, Debug, serde::Serialize)]
pub struct WeightReport {
    pub grid_size: usize,
    pub eps: f64,
    pub checks: Vec<InequalityCheck>,
}

impl WeightReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&InequalityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Verifies the slice-volume inequalities of a convex body on all grid
/// pairs `0 < a < b < 1`:
///
/// * cone ratios `omega(b) <= omega(a) (b/a)^{n-1}` and the mirrored form,
/// * the tail-vs-middle integral comparisons with explicit constants,
/// * `int_0^1 omega <= C(a,b) int_a^b omega`,
/// * the end-mass bound
///   `int_0^eps omega + int_{1-eps}^1 omega <= C_end eps int_eps^{1-eps} omega`.
///
/// `eps` enters only the end-mass check; it must lie in `(0, 1/2)`.
pub fn check_weight_inequalities(
    w: &WeightProfile,
    grid_size: usize,
    eps: f64,
) -> Result<WeightReport> {
    assert!(grid_size >= 16, "grid too coarse");
    assert!(eps > 0.0 && eps < 0.5);
    let g = grid_size;
    let h = 1.0 / g as f64;
    let xs: Vec<f64> = (0..=g).map(|i| i as f64 * h).collect();
    let om: Vec<f64> = xs.iter().map(|&x| w.eval(x)).collect();
    for i in 1..g {
        if om[i] <= 0.0 {
            return Err(Error::NonPositiveWeight(xs[i]));
        }
    }
    let nm1 = (w.dim() - 1) as f64;
    let cum = quad::cumulative(h, &om);
    let total = cum[g];

    let mut cone_fwd = worst_init();
    let mut cone_rev = worst_init();
    let mut tail_right = worst_init();
    let mut tail_left = worst_init();
    let mut full_mid = worst_init();
    let mut full_mid_c = 0.0;
    for ia in 1..g {
        for ib in ia + 1..g {
            let (a, b) = (xs[ia], xs[ib]);
            let (wa, wb) = (om[ia], om[ib]);
            // cone bounds from convexity
            update(&mut cone_fwd, wa * (b / a).powf(nm1) - wb, (a, b));
            update(&mut cone_rev, wb * ((1.0 - a) / (1.0 - b)).powf(nm1) - wa, (a, b));
            // tail integrals against the middle
            let mid = cum[ib] - cum[ia];
            let right = total - cum[ib];
            let left = cum[ia];
            let c_r = (1.0 - b) / (b - a) * (1.0 / a).powf(nm1);
            let c_l = a / (b - a) * (1.0 / (1.0 - b)).powf(nm1);
            update(&mut tail_right, c_r * mid - right, (a, b));
            update(&mut tail_left, c_l * mid - left, (a, b));
            // full interval against the middle
            let c_ab = (((1.0 / a).powf(nm1) * (1.0 - b)) + (1.0 / (1.0 - b)).powf(nm1) * a)
                / (b - a)
                + 1.0;
            let slack = c_ab * mid - total;
            if slack < full_mid.0 {
                full_mid_c = c_ab;
            }
            update(&mut full_mid, slack, (a, b));
        }
    }

    // end mass: Simpson on the three subintervals
    let int_sub = |lo: f64, hi: f64, panels: usize| {
        let hh = (hi - lo) / panels as f64;
        let f: Vec<f64> = (0..=panels).map(|i| w.eval(lo + i as f64 * hh)).collect();
        quad::simpson(hh, &f)
    };
    let ends = int_sub(0.0, eps, 64) + int_sub(1.0 - eps, 1.0, 64);
    let middle = int_sub(eps, 1.0 - eps, 2048);
    let c_end = 2.0f64.powf(nm1 + 1.0) / (0.5 - eps);
    let end_slack = c_end * eps * middle - ends;
    let measured_c = if middle > 0.0 { ends / (eps * middle) } else { f64::INFINITY };

    let tol = 1e-9;
    let mk = |name: &'static str, (slack, at): (f64, (f64, f64)), constant: Option<f64>| {
        InequalityCheck { name, passed: slack >= -tol, min_slack: slack, at, constant }
    };
    Ok(WeightReport {
        grid_size,
        eps,
        checks: vec![
            mk("cone_ratio_forward", cone_fwd, None),
            mk("cone_ratio_reverse", cone_rev, None),
            mk("tail_integral_right", tail_right, None),
            mk("tail_integral_left", tail_left, None),
            mk("full_vs_middle_integral", full_mid, Some(full_mid_c)),
            InequalityCheck {
                name: "end_mass",
                passed: end_slack >= -tol,
                min_slack: end_slack,
                at: (eps, 1.0 - eps),
                constant: Some(measured_c),
            },
        ],
    })
}

fn worst_init() -> (f64, (f64, f64)) {
    (f64::INFINITY, (0.0, 0.0))
}

#[inline]
fn update(worst: &mut (f64, (f64, f64)), slack: f64, at: (f64, f64)) {
    if slack < worst.0 {
        *worst = (slack, at);
    }
}

/// Midpoint concavity test for `omega^{1/(n-1)}`. Returns whether it holds
/// on all same-parity grid pairs and the worst midpoint deficit
/// (`positive` means a violation of that size was seen).
pub fn brunn_minkowski_check(w: &WeightProfile, grid_size: usize) -> (bool, f64) {
    assert!(grid_size >= 16);
    let g = grid_size;
    let h = 1.0 / g as f64;
    let p = 1.0 / (w.dim() - 1) as f64;
    let u: Vec<f64> = (0..=g).map(|i| w.eval(i as f64 * h).max(0.0).powf(p)).collect();
    let mut worst = f64::NEG_INFINITY;
    for ia in 0..g {
        for ib in (ia + 2..=g).step_by(2) {
            let mid = (ia + ib) / 2;
            let deficit = 0.5 * (u[ia] + u[ib]) - u[mid];
            worst = worst.max(deficit);
        }
    }
    (worst <= 1e-12, worst.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_params() -> BTreeMap<String, f64> {
        BTreeMap::new()
    }

    #[test]
    fn rectangle_graphs() {
        let d = make_domain("rectangle", 0.1, &no_params()).unwrap();
        assert!((d.top(0.3) - 0.05).abs() < 1e-16);
        assert!((d.bot(0.7) + 0.05).abs() < 1e-16);
        assert!((d.width(0.5) - 0.1).abs() < 1e-16);
    }

    #[test]
    fn wedge_is_triangle() {
        let d = make_domain("wedge", 0.1, &no_params()).unwrap();
        assert_eq!(d.top(0.0), 0.0);
        assert_eq!(d.bot(0.0), 0.0);
        assert!((d.top(1.0) - 0.05).abs() < 1e-16);
        assert!((d.bot(1.0) + 0.05).abs() < 1e-16);
        for &x in &[0.1, 0.4, 0.9] {
            assert!((d.width(x) - 0.1 * x).abs() < 1e-16);
        }
    }

    #[test]
    fn trapezoid_width() {
        let d = make_domain("trapezoid", 0.1, &no_params()).unwrap();
        for &x in &[0.0, 0.25, 1.0] {
            assert!((d.width(x) - 0.05 * (1.0 + x)).abs() < 1e-16);
        }
    }

    #[test]
    fn unknown_family_rejected() {
        let e = make_domain("pentagon", 0.1, &no_params()).unwrap_err();
        assert!(matches!(e, Error::UnknownFamily(_)));
    }

    #[test]
    fn eps_out_of_range_rejected() {
        assert!(make_domain("rectangle", 0.0, &no_params()).is_err());
        assert!(make_domain("rectangle", 0.6, &no_params()).is_err());
    }

    #[test]
    fn nonconvex_polygon_rejected_with_named_invariant() {
        let mut p = BTreeMap::new();
        // top dips in the middle: not concave
        for (i, v) in [0.02, 0.005, 0.03].iter().enumerate() {
            p.insert(format!("top{i}"), *v);
        }
        for (i, v) in [-0.02, -0.03, -0.02].iter().enumerate() {
            p.insert(format!("bot{i}"), *v);
        }
        match make_domain("polygon", 0.05, &p) {
            Err(Error::InvalidDomain { invariant, .. }) => assert_eq!(invariant, "top_concavity"),
            other => panic!("expected concavity rejection, got {other:?}"),
        }
    }

    #[test]
    fn valid_polygon_accepted() {
        let mut p = BTreeMap::new();
        for (i, v) in [0.01, 0.035, 0.03].iter().enumerate() {
            p.insert(format!("top{i}"), *v);
        }
        for (i, v) in [-0.005, -0.03, -0.02].iter().enumerate() {
            p.insert(format!("bot{i}"), *v);
        }
        let d = make_domain("polygon", 0.05, &p).unwrap();
        assert!((d.top(0.25) - 0.0225).abs() < 1e-15);
    }

    #[test]
    fn width_profile_flags() {
        let rect = width_profile(&make_domain("rectangle", 0.1, &no_params()).unwrap()).unwrap();
        assert!(!rect.singular_left() && !rect.singular_right());
        assert!((rect.eval(0.3) - 0.1).abs() < 1e-16);

        let wedge = width_profile(&make_domain("wedge", 0.1, &no_params()).unwrap()).unwrap();
        assert!(wedge.singular_left() && !wedge.singular_right());
        assert!((wedge.eval(0.4) - 0.04).abs() < 1e-16);

        let lens = width_profile(&make_domain("lens", 0.1, &no_params()).unwrap()).unwrap();
        assert!(lens.singular_left() && lens.singular_right());
    }

    #[test]
    fn lens_symmetry() {
        let lens = width_profile(&make_domain("lens", 0.1, &no_params()).unwrap()).unwrap();
        for i in 0..=64 {
            let x = i as f64 / 64.0;
            assert!((lens.eval(x) - lens.eval(1.0 - x)).abs() <= 1e-14);
        }
    }

    #[test]
    fn cone_bound_saturated_by_linear_weight() {
        let w = WeightProfile::new(|x| x, 2).unwrap();
        let report = check_weight_inequalities(&w, 64, 0.1).unwrap();
        let fwd = report.check("cone_ratio_forward").unwrap();
        assert!(fwd.passed);
        // omega(b) = omega(a) (b/a) exactly for omega = x
        assert!(fwd.min_slack.abs() < 1e-12, "slack {}", fwd.min_slack);
    }

    #[test]
    fn constant_weight_end_mass_ratio() {
        let w = WeightProfile::new(|_| 1.0, 2).unwrap();
        let eps = 0.1;
        let report = check_weight_inequalities(&w, 64, eps).unwrap();
        assert!(report.all_passed());
        let end = report.check("end_mass").unwrap();
        // measured constant is 2 eps / (eps (1 - 2 eps)) = 2 / (1 - 2 eps)
        let expect = 2.0 / (1.0 - 2.0 * eps);
        assert!((end.constant.unwrap() - expect).abs() < 1e-10);
    }

    #[test]
    fn convex_weight_fails_brunn_minkowski() {
        let w = WeightProfile::new(|x| x * x + 1e-6, 2).unwrap();
        let (ok, deficit) = brunn_minkowski_check(&w, 64);
        assert!(!ok && deficit > 1e-3);
        let exp = WeightProfile::new(|x| (-x).exp(), 2).unwrap();
        assert!(!brunn_minkowski_check(&exp, 64).0);
    }

    #[test]
    fn concave_weights_pass_brunn_minkowski() {
        let one = WeightProfile::new(|_| 1.0, 2).unwrap();
        let (ok, deficit) = brunn_minkowski_check(&one, 64);
        assert!(ok && deficit == 0.0);
        let para = WeightProfile::new(|x| x * (1.0 - x), 2).unwrap();
        assert!(brunn_minkowski_check(&para, 64).0);
    }

    #[test]
    fn builtin_families_pass_all_checks() {
        for fam in ["rectangle", "wedge", "trapezoid", "lens"] {
            for &eps in &[0.5, 0.2, 0.05] {
                let d = make_domain(fam, eps, &no_params()).unwrap();
                d.validate(1024).unwrap();
                let w = width_profile(&d).unwrap();
                assert!(brunn_minkowski_check(&w, 128).0, "{fam} eps={eps}");
                let rep = check_weight_inequalities(&w, 64, eps.min(0.25)).unwrap();
                assert!(rep.all_passed(), "{fam} eps={eps}: {:?}", rep.checks);
            }
        }
    }
}
