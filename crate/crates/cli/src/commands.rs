//! Command execution: solves, reports, artifacts and exit status.

use std::time::Instant;

use anyhow::Context;
use serde::Serialize;
use serde_json::json;

use thinodal::verify::{self, MeshPolicy, ScalingReport};
use thinodal as core;

use crate::artifacts::{write_json, CsvValue, CsvWriter, Manifest};
use crate::config::{effective_eps_list, Command, Format, MeshParam, RunConfig};
use crate::svg;

/// Runs the configured command, writes all artifacts plus the manifest, and
/// returns the process exit code (0 only if every requested check passed).
pub fn execute(cfg: &RunConfig) -> i32 {
    let started = Instant::now();
    let mut manifest = Manifest::new(cfg);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build();
    let outcome = match pool {
        Ok(pool) => pool.install(|| dispatch(cfg, &mut manifest)),
        Err(e) => Err(anyhow::anyhow!("building worker pool: {e}")),
    };
    let code = match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            manifest.error = Some(crate::artifacts::ErrorRecord {
                kind: "run_error".to_string(),
                message: format!("{e:#}"),
            });
            eprintln!("error: {e:#}");
            1
        }
    };
    if cfg.timestamp {
        manifest.wall_time_s = Some(started.elapsed().as_secs_f64());
    }
    let path = cfg.out_dir.join("manifest.json");
    if let Err(e) = write_json(&path, &manifest) {
        eprintln!("error writing manifest: {e:#}");
        return 1;
    }
    code
}

fn dispatch(cfg: &RunConfig, manifest: &mut Manifest) -> anyhow::Result<bool> {
    match cfg.command {
        Command::SolveOde => solve_ode(cfg, manifest),
        Command::SolvePde => solve_pde(cfg, manifest),
        Command::Nodal => nodal(cfg, manifest),
        Command::Scaling => scaling(cfg, manifest),
        Command::VerifyAll => verify_all(cfg, manifest),
    }
}

fn wants(cfg: &RunConfig, f: Format) -> bool {
    cfg.formats.contains(&f)
}

fn policy_of(cfg: &RunConfig) -> MeshPolicy {
    match (cfg.nx, cfg.ny) {
        (MeshParam::Auto, MeshParam::Auto) => MeshPolicy::Auto,
        (nx, ny) => {
            // explicit values win; the unspecified direction follows the
            // per-width policy
            let eps = cfg.eps.unwrap_or(0.1);
            let (anx, any) = MeshPolicy::Auto.resolve(eps);
            MeshPolicy::Explicit {
                nx: if let MeshParam::Given(n) = nx { n } else { anx },
                ny: if let MeshParam::Given(n) = ny { n } else { any },
            }
        }
    }
}

fn solve_ode(cfg: &RunConfig, manifest: &mut Manifest) -> anyhow::Result<bool> {
    let eps = cfg.eps.expect("validated");
    let dom = core::make_domain(&cfg.family, eps, &cfg.params)?;
    let w = core::width_profile(&dom)?;
    let pair = core::solve_first_eigen(&w, cfg.tol.max(1e-12))?;

    if wants(cfg, Format::Csv) {
        let mut csv = CsvWriter::new(&["x", "phi", "dphi"]);
        for i in 0..pair.xs.len() {
            csv.row(&[
                CsvValue::Num(pair.xs[i]),
                CsvValue::Num(pair.phi[i]),
                CsvValue::Num(pair.dphi[i]),
            ]);
        }
        let path = cfg.out_dir.join("phi.csv");
        csv.write_to(&path)?;
        manifest.artifacts.push(path);
    }
    if wants(cfg, Format::Json) {
        let path = cfg.out_dir.join("phi.json");
        write_json(
            &path,
            &json!({
                "mu": pair.mu,
                "s1": pair.s1,
                "family": cfg.family,
                "eps": eps,
            }),
        )?;
        manifest.artifacts.push(path);
    }
    if wants(cfg, Format::Svg) {
        let plot = svg::Plot {
            title: format!("first eigenfunction, {} eps={eps}", cfg.family),
            x_label: "x",
            y_label: "phi",
            log_log: false,
            series: vec![svg::Series {
                label: "phi",
                points: pair.xs.iter().cloned().zip(pair.phi.iter().cloned()).collect(),
                color: "steelblue",
                markers: false,
            }],
            fit: None,
            timestamp: cfg.timestamp,
        };
        let path = cfg.out_dir.join("phi.svg");
        crate::artifacts::write_file(&path, svg::render(&plot).as_bytes())?;
        manifest.artifacts.push(path);
    }
    manifest.diagnostics = json!({ "mu": pair.mu, "s1": pair.s1 });
    Ok(true)
}

fn planar_solution(cfg: &RunConfig) -> anyhow::Result<(core::Domain2D, core::PDESolution)> {
    let eps = cfg.eps.expect("validated");
    let dom = core::make_domain(&cfg.family, eps, &cfg.params)?;
    let (nx, ny) = policy_of(cfg).resolve(eps);
    let mesh = core::build_mesh(&dom, nx, ny)?;
    let sol = core::solve_first_neumann(mesh, cfg.tol.max(1e-10))?;
    Ok((dom, sol))
}

fn solve_pde(cfg: &RunConfig, manifest: &mut Manifest) -> anyhow::Result<bool> {
    let (dom, sol) = planar_solution(cfg)?;
    let prof = core::cross_section_average(&sol);

    if wants(cfg, Format::Csv) {
        let mut nodes = CsvWriter::new(&["x", "y", "u"]);
        for (p, &u) in sol.mesh.nodes.iter().zip(&sol.u) {
            nodes.row(&[CsvValue::Num(p[0]), CsvValue::Num(p[1]), CsvValue::Num(u)]);
        }
        let path = cfg.out_dir.join("u_nodes.csv");
        nodes.write_to(&path)?;
        manifest.artifacts.push(path);

        let mut elems = CsvWriter::new(&["v0", "v1", "v2"]);
        for tri in &sol.mesh.elements {
            elems.row(&[
                CsvValue::Int(tri[0] as i64),
                CsvValue::Int(tri[1] as i64),
                CsvValue::Int(tri[2] as i64),
            ]);
        }
        let path = cfg.out_dir.join("u_elements.csv");
        elems.write_to(&path)?;
        manifest.artifacts.push(path);

        let mut pcsv = CsvWriter::new(&["x", "omega", "ubar", "dubar", "eta"]);
        for i in 0..prof.xs.len() {
            pcsv.row(&[
                CsvValue::Num(prof.xs[i]),
                CsvValue::Num(prof.omega[i]),
                CsvValue::Num(prof.ubar[i]),
                CsvValue::Num(prof.dubar[i]),
                CsvValue::Num(prof.eta[i]),
            ]);
        }
        let path = cfg.out_dir.join("profile.csv");
        pcsv.write_to(&path)?;
        manifest.artifacts.push(path);
    }
    if wants(cfg, Format::Json) {
        let path = cfg.out_dir.join("solution.json");
        write_json(
            &path,
            &json!({
                "lambda": sol.lambda,
                "eps": sol.mesh.eps,
                "nx": sol.mesh.nx,
                "ny": sol.mesh.ny,
                "family": sol.mesh.family,
            }),
        )?;
        manifest.artifacts.push(path);
    }
    if wants(cfg, Format::Svg) {
        // overlay the 1D eigenfunction scaled to the average's left value
        let w = core::width_profile(&dom)?;
        let pair = core::solve_first_eigen(&w, 1e-10)?;
        let scale = prof.ubar[0] / pair.norm_value;
        let phi_pts: Vec<(f64, f64)> =
            prof.xs.iter().map(|&x| (x, scale * pair.eval(x).0)).collect();
        let plot = svg::Plot {
            title: format!("cross-section average vs 1D mode, {} eps={}", cfg.family, sol.mesh.eps),
            x_label: "x",
            y_label: "value",
            log_log: false,
            series: vec![
                svg::Series {
                    label: "ubar (2D average)",
                    points: prof.xs.iter().cloned().zip(prof.ubar.iter().cloned()).collect(),
                    color: "steelblue",
                    markers: false,
                },
                svg::Series {
                    label: "phi (1D, matched at 0)",
                    points: phi_pts,
                    color: "firebrick",
                    markers: false,
                },
            ],
            fit: None,
            timestamp: cfg.timestamp,
        };
        let path = cfg.out_dir.join("profile.svg");
        crate::artifacts::write_file(&path, svg::render(&plot).as_bytes())?;
        manifest.artifacts.push(path);
    }
    manifest.diagnostics = json!({
        "lambda": sol.lambda,
        "residual": sol.residual,
        "sup_u": sol.sup_u,
        "inf_u": sol.inf_u,
    });
    Ok(true)
}

fn nodal(cfg: &RunConfig, manifest: &mut Manifest) -> anyhow::Result<bool> {
    let (_dom, sol) = planar_solution(cfg)?;
    let report = core::nodal_set(&sol)?;
    if wants(cfg, Format::Json) {
        let path = cfg.out_dir.join("nodal_report.json");
        write_json(&path, &report)?;
        manifest.artifacts.push(path);
    }
    if wants(cfg, Format::Csv) {
        let mut csv = CsvWriter::new(&["x", "y_min", "y_max"]);
        for &(x, ymin, ymax) in &report.per_column_roots {
            csv.row(&[CsvValue::Num(x), CsvValue::Num(ymin), CsvValue::Num(ymax)]);
        }
        let path = cfg.out_dir.join("nodal_roots.csv");
        csv.write_to(&path)?;
        manifest.artifacts.push(path);
    }
    manifest.diagnostics = serde_json::to_value(&report).context("nodal report")?;
    Ok(true)
}

/// Per-family acceptance predicates evaluated on a finished study.
#[derive(Serialize)]
pub struct Predicate {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Serialize)]
struct Summary<'a> {
    #[serde(flatten)]
    report: &'a ScalingReport,
    sandwich: Vec<verify::SandwichCheck>,
    ratios: Vec<verify::RatioStability>,
    predicates: Vec<Predicate>,
}

fn slope_of<'a>(report: &'a ScalingReport, q: &str) -> Option<&'a verify::SlopeFit> {
    report.slopes.iter().find(|s| s.quantity == q)
}

/// The checks `verify-all` holds a family's study to.
pub fn family_predicates(report: &ScalingReport) -> Vec<Predicate> {
    let mut out = Vec::new();
    let mut push = |name: String, passed: bool, detail: String| {
        out.push(Predicate { name, passed, detail });
    };

    if let Some(flag) = &report.flagged {
        push("rows_complete".into(), false, flag.clone());
        return out;
    }

    // eigenvalue sandwich on every row
    for row in &report.rows {
        let check = verify::sandwich_check(row, row.tol_disc);
        push(
            format!("sandwich eps={}", row.eps),
            check.passed,
            if check.passed { "ok".into() } else { check.failures.join("; ") },
        );
    }

    // bound-ratio stability
    for r in verify::ratio_stability(report) {
        push(
            format!("ratio_stable {}", r.name),
            r.passed,
            if r.floored {
                "at noise floor".into()
            } else {
                format!("variation {:.3}", r.variation)
            },
        );
    }

    // triangle inequality between the width and the distance to the 1D zero
    for row in &report.rows {
        let bound = 2.0 * row.dist_s1 + (row.s0_prime - row.s0).abs() + 1e-12;
        push(
            format!("width_triangle eps={}", row.eps),
            row.width <= bound,
            format!("width {:.3e} vs {:.3e}", row.width, bound),
        );
    }

    match report.family.as_str() {
        "wedge" => {
            for (q, lo, hi, r2) in [
                ("gap", 0.9, f64::INFINITY, Some(0.95)),
                ("sup_diff", 0.9, f64::INFINITY, Some(0.95)),
                ("dist_s1", 0.9, f64::INFINITY, None),
            ] {
                out.push(window_predicate(report, q, lo, hi, r2));
            }
            out.push(monotone_gap(report));
        }
        "trapezoid" => {
            for (q, lo, hi, r2) in [
                ("gap", 0.9, f64::INFINITY, Some(0.95)),
                ("sup_diff", 0.9, f64::INFINITY, Some(0.95)),
                ("width", 1.8, 2.2, None),
            ] {
                out.push(window_predicate(report, q, lo, hi, r2));
            }
            out.push(width_refinement(report));
            out.push(monotone_gap(report));
        }
        "rectangle" => {
            // null case: everything at the numerical floor
            for fit in &report.slopes {
                out.push(Predicate {
                    name: format!("floor {}", fit.quantity),
                    passed: fit.floored,
                    detail: if fit.floored {
                        "flagged floor".into()
                    } else {
                        format!("unexpected fit: slope {:.3}", fit.slope)
                    },
                });
            }
        }
        _ => {}
    }

    // mesh independence of every fitted slope
    for fit in &report.slopes {
        if !fit.floored && fit.refined_delta.is_finite() {
            out.push(Predicate {
                name: format!("slope_mesh_independent {}", fit.quantity),
                passed: fit.refined_delta < 0.15,
                detail: format!("delta {:.3}", fit.refined_delta),
            });
        }
    }
    out
}

fn window_predicate(
    report: &ScalingReport,
    q: &str,
    lo: f64,
    hi: f64,
    need_r2: Option<f64>,
) -> Predicate {
    match slope_of(report, q) {
        Some(f) if !f.floored => {
            let mut ok = f.slope >= lo && f.slope <= hi;
            let mut detail = format!("slope {:.3}", f.slope);
            if let Some(r2min) = need_r2 {
                detail = format!("{detail}, R2 {:.4}", f.r2);
                ok = ok && f.r2 >= r2min;
            }
            Predicate { name: format!("slope {q}"), passed: ok, detail }
        }
        _ => Predicate {
            name: format!("slope {q}"),
            passed: false,
            detail: "at floor; no fit".into(),
        },
    }
}

fn monotone_gap(report: &ScalingReport) -> Predicate {
    let mut ok = true;
    for w in report.rows.windows(2) {
        // rows sorted by eps descending: the gap must not grow as eps halves
        if w[1].gap > 1.1 * w[0].gap {
            ok = false;
        }
    }
    Predicate {
        name: "monotone_gap".into(),
        passed: ok,
        detail: report
            .rows
            .iter()
            .map(|r| format!("{:.3e}", r.gap))
            .collect::<Vec<_>>()
            .join(" "),
    }
}

fn width_refinement(report: &ScalingReport) -> Predicate {
    let delta = report
        .refinement_deltas
        .iter()
        .find(|(q, _)| q == "width")
        .map(|(_, d)| *d)
        .unwrap_or(f64::NAN);
    Predicate {
        name: "width_refinement".into(),
        passed: delta.is_finite() && delta < 0.10,
        detail: format!("delta {delta:.4}"),
    }
}

fn write_study(
    cfg: &RunConfig,
    prefix: &str,
    report: &ScalingReport,
    manifest: &mut Manifest,
) -> anyhow::Result<Vec<Predicate>> {
    let predicates = family_predicates(report);
    if wants(cfg, Format::Csv) {
        let mut csv = CsvWriter::new(verify::CSV_COLUMNS);
        for row in &report.rows {
            let mut vals: Vec<CsvValue> =
                row.csv_numbers().into_iter().map(CsvValue::Num).collect();
            vals.push(CsvValue::Str(row.mesh_tag.clone()));
            csv.row(&vals);
        }
        let path = cfg.out_dir.join(format!("{prefix}scaling_report.csv"));
        csv.write_to(&path)?;
        manifest.artifacts.push(path);
    }
    if wants(cfg, Format::Json) {
        let sandwich =
            report.rows.iter().map(|r| verify::sandwich_check(r, r.tol_disc)).collect();
        let summary = Summary {
            report,
            sandwich,
            ratios: verify::ratio_stability(report),
            predicates: family_predicates(report),
        };
        let path = cfg.out_dir.join(format!("{prefix}summary.json"));
        write_json(&path, &summary)?;
        manifest.artifacts.push(path);
    }
    if wants(cfg, Format::Svg) {
        for fit in &report.slopes {
            if fit.floored {
                continue;
            }
            let points: Vec<(f64, f64)> = report
                .rows
                .iter()
                .map(|r| (r.eps, r.quantity(&fit.quantity)))
                .collect();
            let plot = svg::Plot {
                title: format!("{} vs eps, {}", fit.quantity, report.family),
                x_label: "eps",
                y_label: &fit.quantity,
                log_log: true,
                series: vec![svg::Series {
                    label: &fit.quantity,
                    points,
                    color: "steelblue",
                    markers: true,
                }],
                fit: Some((
                    fit.slope,
                    fit.intercept,
                    format!("slope {:.2}, R2 {:.4}", fit.slope, fit.r2),
                )),
                timestamp: cfg.timestamp,
            };
            let path = cfg.out_dir.join(format!("{prefix}{}_scaling.svg", fit.quantity));
            crate::artifacts::write_file(&path, svg::render(&plot).as_bytes())?;
            manifest.artifacts.push(path);
        }
    }
    Ok(predicates)
}

fn scaling(cfg: &RunConfig, manifest: &mut Manifest) -> anyhow::Result<bool> {
    let eps_list = effective_eps_list(cfg);
    let report = verify::scaling_study(&cfg.family, &eps_list, &policy_of(cfg))?;
    let _ = write_study(cfg, "", &report, manifest)?;
    manifest.diagnostics = serde_json::to_value(&report.slopes).context("slopes")?;
    Ok(report.flagged.is_none() || cfg.family == "rectangle")
}

fn verify_all(cfg: &RunConfig, manifest: &mut Manifest) -> anyhow::Result<bool> {
    let eps_list = effective_eps_list(cfg);
    let families: Vec<String> = if cfg.family == "all" {
        ["rectangle", "wedge", "trapezoid", "lens"].iter().map(|s| s.to_string()).collect()
    } else {
        vec![cfg.family.clone()]
    };
    let multi = families.len() > 1;
    let mut all_passed = true;
    let mut summary = serde_json::Map::new();
    for family in &families {
        let report = verify::scaling_study(family, &eps_list, &policy_of(cfg))?;
        let prefix = if multi { format!("{family}_") } else { String::new() };
        let predicates = write_study(cfg, &prefix, &report, manifest)?;
        let ok = predicates.iter().all(|p| p.passed);
        all_passed &= ok;
        summary.insert(
            family.clone(),
            json!({
                "passed": ok,
                "predicates": predicates
                    .iter()
                    .map(|p| json!({"name": p.name, "passed": p.passed, "detail": p.detail}))
                    .collect::<Vec<_>>(),
            }),
        );
        for p in predicates.iter().filter(|p| !p.passed) {
            eprintln!("FAIL [{family}] {}: {}", p.name, p.detail);
        }
    }
    manifest.diagnostics = json!({ "families": summary, "all_passed": all_passed });
    Ok(all_passed)
}
