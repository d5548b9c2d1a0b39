//! Manual probes for resolution and timing studies; run with --ignored.

use std::collections::BTreeMap;
use std::time::Instant;

use thinodal::*;

fn dom(family: &str, eps: f64) -> Domain2D {
    make_domain(family, eps, &BTreeMap::new()).unwrap()
}

#[test]
#[ignore]
fn probe_rectangle_accuracy() {
    let pi2 = std::f64::consts::PI.powi(2);
    for nx in [256, 512, 1024, 2048] {
        let t = Instant::now();
        let mesh = build_mesh(&dom("rectangle", 0.05), nx, 8).unwrap();
        let n = mesh.node_count();
        let sol = solve_first_neumann(mesh, 1e-10).unwrap();
        println!(
            "rectangle nx={nx}: lambda={:.12} err={:.3e} nodes={n} iters? t={:?}",
            sol.lambda,
            (sol.lambda - pi2).abs(),
            t.elapsed()
        );
        let nodal = nodal_set(&sol).unwrap();
        println!("  width={:.3e} s0={:.9} osc={:.3e}", nodal.width, nodal.s0,
                 transverse_oscillation(&sol).max);
    }
}

#[test]
#[ignore]
fn probe_run_pair_wedge() {
    for eps in [0.2, 0.1, 0.05, 0.025] {
        let t = Instant::now();
        let row = run_pair("wedge", eps, &MeshPolicy::Auto).unwrap();
        println!(
            "wedge eps={eps} mesh={} gap={:.4e} sup_diff={:.4e} width={:.4e} dist_s1={:.4e} osc={:.4e} tol_disc={:.1e} t={:?}",
            row.mesh_tag, row.gap, row.sup_diff, row.width, row.dist_s1, row.osc, row.tol_disc, t.elapsed()
        );
        println!(
            "  eta={:.4e} grad={:.3} dy={:.3} supinf={:.3} egap={:.3e} supl2={:.3} lip={:.3} dec={:.3}",
            row.eta_ratio, row.grad_ratio, row.dy_ratio, row.supinf_ratio, row.energy_gap,
            row.supl2_ratio, row.lip_ratio, row.interior_decrease
        );
    }
}

#[test]
#[ignore]
fn probe_run_pair_others() {
    for fam in ["trapezoid", "lens", "rectangle"] {
        for eps in [0.2, 0.1, 0.05, 0.025] {
            let t = Instant::now();
            let row = run_pair(fam, eps, &MeshPolicy::Auto).unwrap();
            println!(
                "{fam} eps={eps} mesh={} gap={:.4e} sup_diff={:.4e} width={:.4e} dist_s1={:.4e} osc={:.4e} t={:?}",
                row.mesh_tag, row.gap, row.sup_diff, row.width, row.dist_s1, row.osc, t.elapsed()
            );
            println!(
                "  eta={:.4e} grad={:.3} dy={:.4e} supinf={:.3} egap={:.3e} supl2={:.3} lip={:.3} dec={:.3}",
                row.eta_ratio, row.grad_ratio, row.dy_ratio, row.supinf_ratio, row.energy_gap,
                row.supl2_ratio, row.lip_ratio, row.interior_decrease
            );
        }
    }
}

#[test]
#[ignore]
fn probe_mean_zero() {
    use thinodal::numerics::quad;
    for fam in ["wedge", "trapezoid", "lens"] {
        for eps in [0.2, 0.05] {
            let policy = MeshPolicy::Auto;
            let (nx, ny) = policy.resolve(eps);
            let mesh = build_mesh(&dom(fam, eps), nx, ny).unwrap();
            let sol = solve_first_neumann(mesh, 1e-10).unwrap();
            let prof = cross_section_average(&sol);
            let h = 1.0 / nx as f64;
            let f: Vec<f64> = prof.omega.iter().zip(&prof.ubar).map(|(&o, &u)| o * u).collect();
            let fa: Vec<f64> =
                prof.omega.iter().zip(&prof.ubar).map(|(&o, &u)| o * u.abs()).collect();
            let mz = quad::trapezoid(h, &f).abs() / quad::trapezoid(h, &fa);
            println!("{fam} eps={eps} ({nx}x{ny}): mean-zero rel = {mz:.3e}");
        }
    }
}
