//! Eigensolver tests against independent Bessel-series references.

use thinodal::numerics::quad;
use thinodal::{rayleigh_quotient_1d, s1_of_mu, solve_first_eigen, WeightProfile};
use thinodal_oracles as oracle;

fn weight(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> WeightProfile {
    WeightProfile::new(f, 2).unwrap()
}

#[test]
fn constant_weight_eigenpair() {
    let pi2 = std::f64::consts::PI.powi(2);
    let pair = solve_first_eigen(&weight(|_| 1.0), 1e-10).unwrap();
    assert!((pair.mu - pi2).abs() / pi2 < 1e-8, "mu = {}", pair.mu);
    assert!((pair.s1 - 0.5).abs() < 1e-8);
}

#[test]
fn linear_weight_eigenpair_matches_bessel_zeros() {
    // singular left endpoint: the eigenfunction is J0(sqrt(mu) x)
    let mu_ref = oracle::linear_weight_eigenvalue();
    let s1_ref = oracle::linear_weight_zero();
    let pair = solve_first_eigen(&weight(|x| x), 1e-10).unwrap();
    assert!(
        (pair.mu - mu_ref).abs() / mu_ref < 1e-6,
        "mu = {} vs {mu_ref}",
        pair.mu
    );
    assert!((pair.s1 - s1_ref).abs() < 1e-6, "s1 = {} vs {s1_ref}", pair.s1);
    // pointwise agreement with the Bessel profile away from the zero
    let k = pair.mu.sqrt();
    for &x in &[0.1, 0.3, 0.5, 0.8, 1.0] {
        let (p, _) = pair.eval(x);
        let reference = oracle::bessel_j0(k * x);
        assert!((p - reference).abs() < 1e-6, "phi({x}) = {p} vs {reference}");
    }
}

#[test]
fn affine_weight_matches_cross_product_root() {
    let mu_ref = oracle::affine_weight_eigenvalue();
    let s1_ref = oracle::affine_weight_zero();
    let pair = solve_first_eigen(&weight(|x| 1.0 + x), 1e-10).unwrap();
    assert!(
        (pair.mu - mu_ref).abs() / mu_ref < 1e-6,
        "mu = {} vs {mu_ref}",
        pair.mu
    );
    assert!((pair.s1 - s1_ref).abs() < 1e-6, "s1 = {} vs {s1_ref}", pair.s1);
}

#[test]
fn shoot_linear_weight_zero_location() {
    // left shot at the linear-weight eigenvalue crosses at j01/j11
    let mu = oracle::linear_weight_eigenvalue();
    let s = s1_of_mu(&weight(|x| x), mu).unwrap().unwrap();
    assert!((s - oracle::linear_weight_zero()).abs() < 1e-8, "s = {s}");
}

#[test]
fn zero_monotone_in_mu_for_test_weights() {
    let weights: Vec<(&str, WeightProfile)> = vec![
        ("constant", weight(|_| 1.0)),
        ("linear", weight(|x| x)),
        ("affine", weight(|x| 1.0 + x)),
        ("hump", weight(|x| x * (1.0 - x) + 0.05)),
    ];
    let mu_grid = [10.0, 15.0, 20.0, 30.0, 50.0, 100.0, 1000.0];
    for (name, w) in &weights {
        let mut prev = f64::INFINITY;
        for &mu in &mu_grid {
            let s = s1_of_mu(w, mu)
                .unwrap()
                .unwrap_or_else(|| panic!("{name}: no zero at mu = {mu}"));
            assert!(s < prev, "{name}: s1({mu}) = {s} not below {prev}");
            prev = s;
        }
        let tail = s1_of_mu(w, 1e4).unwrap().unwrap();
        assert!(tail < 0.1, "{name}: s1(1e4) = {tail}");
        // the zero keeps shrinking through the decades
        let s2 = s1_of_mu(w, 1e2).unwrap().unwrap();
        let s3 = s1_of_mu(w, 1e3).unwrap().unwrap();
        assert!(s2 > s3 && s3 > tail, "{name}: {s2} {s3} {tail}");
    }
}

#[test]
fn solved_pairs_satisfy_structural_invariants() {
    let weights: Vec<(&str, WeightProfile)> = vec![
        ("constant", weight(|_| 1.0)),
        ("linear", weight(|x| x)),
        ("affine", weight(|x| 1.0 + x)),
        ("lens", weight(|x| 0.4 * x * (1.0 - x))),
    ];
    let mut end_ratios = Vec::new();
    for (name, w) in &weights {
        let pair = solve_first_eigen(w, 1e-10).unwrap();
        let n = pair.xs.len();
        let h = 1.0 / (n - 1) as f64;

        // Neumann ends
        assert!(pair.norm_value > 0.0 && (pair.phi[0] - pair.norm_value).abs() < 1e-14);
        assert!(pair.dphi[0].abs() < 1e-10, "{name}: phi'(0) = {}", pair.dphi[0]);
        assert!(pair.dphi[n - 1].abs() < 1e-8, "{name}: phi'(1) = {}", pair.dphi[n - 1]);

        // monotone nonincreasing with a single sign change
        let mut crossings = 0;
        for i in 1..n {
            assert!(
                pair.phi[i] <= pair.phi[i - 1] + 1e-10,
                "{name}: increase at {}",
                pair.xs[i]
            );
            if (pair.phi[i - 1] > 0.0) && (pair.phi[i] <= 0.0) {
                crossings += 1;
                assert!(pair.xs[i - 1] <= pair.s1 && pair.s1 <= pair.xs[i]);
            }
        }
        assert_eq!(crossings, 1, "{name}");

        // orthogonality to constants in the weighted inner product
        let wphi: Vec<f64> = pair.xs.iter().zip(&pair.phi).map(|(&x, &p)| w.eval(x) * p).collect();
        let wabs: Vec<f64> =
            pair.xs.iter().zip(&pair.phi).map(|(&x, &p)| w.eval(x) * p.abs()).collect();
        let ortho = quad::simpson(h, &wphi).abs();
        let scale = quad::simpson(h, &wabs);
        assert!(ortho <= 1e-8 * scale, "{name}: {ortho} vs {scale}");

        // Rayleigh quotient reproduces the eigenvalue
        let q = rayleigh_quotient_1d(w, &pair.xs, &pair.phi, &pair.dphi).unwrap();
        assert!((q - pair.mu).abs() / pair.mu < 1e-8, "{name}: q = {q}, mu = {}", pair.mu);

        // endpoint flatness on the left patch: |phi'(x)| <= mu x sup_{s<=x}|phi|
        let mut running_sup: f64 = 0.0;
        for i in 0..n {
            let x = pair.xs[i];
            if x > 0.2 {
                break;
            }
            running_sup = running_sup.max(pair.phi[i].abs());
            let bound = pair.mu * x * running_sup * (1.0 + 1e-8) + 1e-12;
            assert!(
                pair.dphi[i].abs() <= bound,
                "{name}: |phi'({x})| = {} > {bound}",
                pair.dphi[i].abs()
            );
        }

        // interior decrease away from the ends
        let mut min_dec = f64::INFINITY;
        for i in 0..n {
            let d = pair.xs[i].min(1.0 - pair.xs[i]);
            if d >= 0.2 {
                min_dec = min_dec.min(-pair.dphi[i] / pair.norm_value);
            }
        }
        assert!(min_dec > 0.0, "{name}: interior decrease {min_dec}");

        end_ratios.push((*name, pair.norm_value / -pair.phi[n - 1]));
    }
    // Two-sided endpoint ratio phi(0)/(-phi(1)): recorded per family, each
    // within 10% of its frozen value and all inside [1/3, 3]. The measured
    // cross-family spread is 2.5x (the singular linear weight leans hardest
    // on its thick end).
    let recorded = [("constant", 1.0), ("linear", 2.4829), ("affine", 1.3969), ("lens", 1.0)];
    for ((name, ratio), (rec_name, rec)) in end_ratios.iter().zip(recorded) {
        assert_eq!(*name, rec_name);
        assert!(*ratio > 1.0 / 3.0 && *ratio < 3.0, "{name}: ratio {ratio}");
        assert!((ratio / rec - 1.0).abs() < 0.1, "{name}: {ratio} vs recorded {rec}");
    }
}

#[test]
fn grid_refinement_leaves_eigenvalue_unchanged() {
    let w = weight(|x| 1.0 + x);
    let a = thinodal::sl_solver::solve_first_eigen_on_grid(&w, 1e-10, 4097).unwrap();
    let b = thinodal::sl_solver::solve_first_eigen_on_grid(&w, 1e-10, 8193).unwrap();
    assert!((a.mu - b.mu).abs() < 1e-10);
    assert!((a.s1 - b.s1).abs() < 1e-10);
}

#[test]
fn no_zero_below_entry_threshold() {
    assert!(s1_of_mu(&weight(|_| 1.0), 1.0).unwrap().is_none());
    assert!(s1_of_mu(&weight(|x| x), 4.0).unwrap().is_none());
}
