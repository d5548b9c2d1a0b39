//! Command line driver for the thin-domain eigenpair tools.

mod artifacts;
mod commands;
mod config;
mod svg;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{Command, Format, MeshParam, Overrides};

#[derive(Parser)]
#[command(
    name = "thinodal",
    version,
    about = "First Neumann eigenpairs of thin convex planar domains and their 1D comparison problem"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the weighted interval eigenproblem for a family's width profile
    SolveOde(CommonArgs),
    /// Solve the planar Neumann eigenproblem on a boundary-fitted mesh
    SolvePde(CommonArgs),
    /// Extract the nodal set of the planar eigenfunction
    Nodal(CommonArgs),
    /// Run a width-scaling study over an eps grid
    Scaling(CommonArgs),
    /// Run scaling studies plus every acceptance predicate
    VerifyAll(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Domain family: rectangle, wedge, trapezoid, lens, polygon
    #[arg(long)]
    family: Option<String>,
    /// Width bound for single-solve commands
    #[arg(long)]
    eps: Option<f64>,
    /// Comma-separated width grid for scaling commands
    #[arg(long, value_delimiter = ',')]
    eps_list: Option<Vec<f64>>,
    /// Horizontal resolution: `auto` or a column count
    #[arg(long)]
    nx: Option<String>,
    /// Transverse resolution: `auto` or a row count
    #[arg(long)]
    ny: Option<String>,
    /// Solver tolerance (within [1e-13, 1e-6])
    #[arg(long)]
    tol: Option<f64>,
    /// Output directory (default: $THINODAL_OUT or ./out)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of csv,json,svg
    #[arg(long, value_delimiter = ',')]
    formats: Option<Vec<String>>,
    /// Worker pool size for scaling rows
    #[arg(long)]
    jobs: Option<usize>,
    /// Drop timestamps and wall time from all artifacts
    #[arg(long)]
    no_timestamp: bool,
    /// Extra family parameter, repeatable: --param top0=0.01
    #[arg(long = "param", value_name = "KEY=VALUE")]
    param: Vec<String>,
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
}

fn mesh_param(raw: &str) -> anyhow::Result<MeshParam> {
    if raw == "auto" {
        return Ok(MeshParam::Auto);
    }
    let n: usize = raw
        .parse()
        .map_err(|_| anyhow::anyhow!("expected `auto` or a positive integer, got `{raw}`"))?;
    Ok(MeshParam::Given(n))
}

fn to_overrides(args: &CommonArgs) -> anyhow::Result<Overrides> {
    let mut ov = Overrides {
        family: args.family.clone(),
        eps: args.eps,
        eps_list: args.eps_list.clone(),
        tol: args.tol,
        out: args.out.clone(),
        jobs: args.jobs,
        no_timestamp: args.no_timestamp,
        config: args.config.clone(),
        ..Overrides::default()
    };
    if let Some(nx) = &args.nx {
        ov.nx = Some(mesh_param(nx)?);
    }
    if let Some(ny) = &args.ny {
        ov.ny = Some(mesh_param(ny)?);
    }
    if let Some(fmts) = &args.formats {
        let mut parsed = Vec::new();
        for f in fmts {
            parsed.push(f.parse::<Format>()?);
        }
        ov.formats = Some(parsed);
    }
    for p in &args.param {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| anyhow::anyhow!("--param expects KEY=VALUE, got `{p}`"))?;
        let value: f64 =
            v.parse().map_err(|_| anyhow::anyhow!("--param {k}: `{v}` is not a number"))?;
        ov.params.push((k.to_string(), value));
    }
    Ok(ov)
}

fn main() {
    let cli = Cli::parse();
    let (command, args) = match &cli.cmd {
        Cmd::SolveOde(a) => (Command::SolveOde, a),
        Cmd::SolvePde(a) => (Command::SolvePde, a),
        Cmd::Nodal(a) => (Command::Nodal, a),
        Cmd::Scaling(a) => (Command::Scaling, a),
        Cmd::VerifyAll(a) => (Command::VerifyAll, a),
    };
    let cfg = match to_overrides(args).and_then(|ov| config::parse_config(command, &ov)) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    };
    std::process::exit(commands::execute(&cfg));
}
