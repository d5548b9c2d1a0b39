//! Deterministic artifact writers: CSV with full-precision floats, JSON
//! documents, and the run manifest.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

/// 17 significant digits: round-trips every finite f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvWriter {
    buf: String,
    cols: usize,
}

impl CsvWriter {
    pub fn new(columns: &[&str]) -> Self {
        CsvWriter { buf: format!("{}\n", columns.join(",")), cols: columns.len() }
    }

    pub fn row(&mut self, values: &[CsvValue]) {
        assert_eq!(values.len(), self.cols, "column count mismatch");
        let mut first = true;
        for v in values {
            if !first {
                self.buf.push(',');
            }
            first = false;
            match v {
                CsvValue::Num(x) => self.buf.push_str(&fmt_f64(*x)),
                CsvValue::Int(n) => self.buf.push_str(&n.to_string()),
                CsvValue::Str(s) => self.buf.push_str(s),
            }
        }
        self.buf.push('\n');
    }

    pub fn write_to(self, path: &Path) -> anyhow::Result<()> {
        write_file(path, self.buf.as_bytes())
    }
}

pub enum CsvValue {
    Num(f64),
    Int(i64),
    Str(String),
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value).context("serializing JSON")?;
    write_file(path, format!("{text}\n").as_bytes())
}

pub fn write_file(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
    }
    let mut f = std::fs::File::create(path)
        .with_context(|| format!("creating {}", path.display()))?;
    f.write_all(bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Machine-readable record of one run: inputs, written artifacts, headline
/// diagnostics and the error, if any. Wall time is recorded only when
/// timestamps are enabled so that reruns stay byte-identical.
#[derive(Serialize)]
pub struct Manifest {
    pub command: String,
    pub config: crate::config::RunConfig,
    pub version: String,
    pub artifacts: Vec<PathBuf>,
    pub diagnostics: serde_json::Value,
    pub error: Option<ErrorRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Serialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

impl Manifest {
    pub fn new(cfg: &crate::config::RunConfig) -> Self {
        Manifest {
            command: cfg.command.name().to_string(),
            config: cfg.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            artifacts: Vec::new(),
            diagnostics: serde_json::Value::Null,
            error: None,
            wall_time_s: None,
        }
    }
}
