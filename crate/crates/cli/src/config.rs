//! Run configuration: defaults, JSON config files, flag overlay and
//! validation. Flags beat file values; the `THINODAL_OUT` environment
//! variable supplies the output directory when nothing else does.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SolveOde,
    SolvePde,
    Nodal,
    Scaling,
    VerifyAll,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SolveOde => "solve-ode",
            Command::SolvePde => "solve-pde",
            Command::Nodal => "nodal",
            Command::Scaling => "scaling",
            Command::VerifyAll => "verify-all",
        }
    }

    /// Scaling-type commands take a width list; the rest take a single width.
    pub fn takes_list(&self) -> bool {
        matches!(self, Command::Scaling | Command::VerifyAll)
    }
}

/// Mesh resolution: either delegated to the per-width policy or explicit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshParam {
    Auto,
    Given(usize),
}

impl Serialize for MeshParam {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            MeshParam::Auto => s.serialize_str("auto"),
            MeshParam::Given(n) => s.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for MeshParam {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Word(String),
            Number(u64),
        }
        match Raw::deserialize(d)? {
            Raw::Word(w) if w == "auto" => Ok(MeshParam::Auto),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "mesh resolution must be `auto` or a positive integer, got `{w}`"
            ))),
            Raw::Number(n) => Ok(MeshParam::Given(n as usize)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => bail!("unknown format `{other}` (expected csv, json or svg)"),
        }
    }
}

/// Fully resolved configuration of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_list: Option<Vec<f64>>,
    pub nx: MeshParam,
    pub ny: MeshParam,
    pub tol: f64,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
    pub jobs: usize,
    pub timestamp: bool,
    /// Extra family parameters (used by the polygon family).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

/// Values of optional flags before merging with a config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub family: Option<String>,
    pub eps: Option<f64>,
    pub eps_list: Option<Vec<f64>>,
    pub nx: Option<MeshParam>,
    pub ny: Option<MeshParam>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub formats: Option<Vec<Format>>,
    pub jobs: Option<usize>,
    pub no_timestamp: bool,
    pub params: Vec<(String, f64)>,
    pub config: Option<PathBuf>,
}

pub const DEFAULT_EPS_GRID: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

/// Builds the validated configuration for `command` from a config file (if
/// any) overlaid by flags.
pub fn parse_config(command: Command, ov: &Overrides) -> anyhow::Result<RunConfig> {
    let mut cfg = match &ov.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config file {}", path.display()))?;
            let mut file_cfg: RunConfig =
                serde_json::from_str(&text).context("parsing config file")?;
            file_cfg.command = command;
            file_cfg
        }
        None => RunConfig {
            command,
            family: default_family(command),
            eps: None,
            eps_list: None,
            nx: MeshParam::Auto,
            ny: MeshParam::Auto,
            tol: 1e-10,
            out_dir: default_out_dir(),
            formats: vec![Format::Csv, Format::Json],
            jobs: default_jobs(),
            timestamp: true,
            params: BTreeMap::new(),
        },
    };
    if let Some(f) = &ov.family {
        cfg.family = f.clone();
    }
    if ov.eps.is_some() {
        cfg.eps = ov.eps;
    }
    if ov.eps_list.is_some() {
        cfg.eps_list = ov.eps_list.clone();
    }
    if let Some(nx) = ov.nx {
        cfg.nx = nx;
    }
    if let Some(ny) = ov.ny {
        cfg.ny = ny;
    }
    if let Some(t) = ov.tol {
        cfg.tol = t;
    }
    if let Some(o) = &ov.out {
        cfg.out_dir = o.clone();
    }
    if let Some(f) = &ov.formats {
        let mut f = f.clone();
        f.sort();
        f.dedup();
        cfg.formats = f;
    }
    if let Some(j) = ov.jobs {
        cfg.jobs = j;
    }
    if ov.no_timestamp {
        cfg.timestamp = false;
    }
    for (k, v) in &ov.params {
        cfg.params.insert(k.clone(), *v);
    }
    validate(&cfg)?;
    Ok(cfg)
}

fn default_family(command: Command) -> String {
    match command {
        Command::VerifyAll => "all".to_string(),
        _ => String::new(),
    }
}

fn default_out_dir() -> PathBuf {
    match std::env::var_os("THINODAL_OUT") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => PathBuf::from("out"),
    }
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

pub fn validate(cfg: &RunConfig) -> anyhow::Result<()> {
    if cfg.eps.is_some() && cfg.eps_list.is_some() {
        bail!("conflicting epsilon specifications: give either --eps or --eps-list");
    }
    if cfg.command.takes_list() {
        if cfg.eps.is_some() {
            bail!("{} takes --eps-list, not --eps", cfg.command.name());
        }
    } else {
        if cfg.eps_list.is_some() {
            bail!("{} takes --eps, not --eps-list", cfg.command.name());
        }
        if cfg.eps.is_none() {
            bail!("{} requires --eps", cfg.command.name());
        }
    }
    if cfg.family.is_empty() {
        bail!("--family is required for {}", cfg.command.name());
    }
    if cfg.family == "all" && cfg.command != Command::VerifyAll {
        bail!("family `all` is only valid with verify-all");
    }
    if !(1e-13..=1e-6).contains(&cfg.tol) {
        bail!("tol must lie in [1e-13, 1e-6], got {}", cfg.tol);
    }
    if let Some(list) = &cfg.eps_list {
        if list.is_empty() {
            bail!("--eps-list must not be empty");
        }
    }
    if cfg.jobs == 0 {
        bail!("--jobs must be positive");
    }
    if cfg.formats.is_empty() {
        bail!("--formats must name at least one of csv, json, svg");
    }
    Ok(())
}

/// The width list a scaling-type command runs over (the default grid when
/// none was given).
pub fn effective_eps_list(cfg: &RunConfig) -> Vec<f64> {
    cfg.eps_list.clone().unwrap_or_else(|| DEFAULT_EPS_GRID.to_vec())
}

/// Serializes a config exactly as `parse_config` will read it back.
#[allow(dead_code)] // exercised by the round-trip tests
pub fn render(cfg: &RunConfig) -> String {
    serde_json::to_string_pretty(cfg).expect("config serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn overrides() -> Overrides {
        Overrides::default()
    }

    #[test]
    fn solve_ode_example() {
        let mut ov = overrides();
        ov.family = Some("wedge".to_string());
        ov.eps = Some(0.1);
        let cfg = parse_config(Command::SolveOde, &ov).unwrap();
        assert_eq!(cfg.command, Command::SolveOde);
        assert_eq!(cfg.family, "wedge");
        assert_eq!(cfg.eps, Some(0.1));
        assert_eq!(cfg.nx, MeshParam::Auto);
        assert_eq!(cfg.tol, 1e-10);
    }

    #[test]
    fn scaling_example() {
        let mut ov = overrides();
        ov.family = Some("trapezoid".to_string());
        ov.eps_list = Some(vec![0.2, 0.1, 0.05, 0.025]);
        let cfg = parse_config(Command::Scaling, &ov).unwrap();
        assert_eq!(cfg.eps_list.as_ref().unwrap().len(), 4);
    }

    #[test]
    fn conflicting_eps_rejected() {
        let mut ov = overrides();
        ov.family = Some("rectangle".to_string());
        ov.eps = Some(0.1);
        ov.eps_list = Some(vec![0.2, 0.1]);
        let err = parse_config(Command::SolvePde, &ov).unwrap_err();
        assert!(err.to_string().contains("conflicting epsilon"));
    }

    #[test]
    fn round_trip() {
        let mut ov = overrides();
        ov.family = Some("lens".to_string());
        ov.eps = Some(0.05);
        ov.nx = Some(MeshParam::Given(256));
        ov.formats = Some(vec![Format::Svg, Format::Csv]);
        let cfg = parse_config(Command::Nodal, &ov).unwrap();
        let text = render(&cfg);
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_key_rejected_with_name() {
        let text = r#"{"command":"solve-ode","family":"wedge","eps":0.1,
            "nx":"auto","ny":"auto","tol":1e-10,"out_dir":"out",
            "formats":["csv"],"jobs":1,"timestamp":true,"bogus_key":3}"#;
        let err = serde_json::from_str::<RunConfig>(text).unwrap_err();
        assert!(err.to_string().contains("bogus_key"));
    }

    #[test]
    fn tol_window_enforced() {
        let mut ov = overrides();
        ov.family = Some("rectangle".to_string());
        ov.eps = Some(0.1);
        ov.tol = Some(1e-5);
        assert!(parse_config(Command::SolvePde, &ov).is_err());
    }

    #[test]
    fn verify_all_defaults() {
        let cfg = parse_config(Command::VerifyAll, &overrides()).unwrap();
        assert_eq!(cfg.family, "all");
        assert_eq!(effective_eps_list(&cfg), DEFAULT_EPS_GRID.to_vec());
    }
}
