//! Report assembly, rendering and atomic file output.

use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, Context};
use clext_core::fmt::{format_float, ser_complex_vec, ser_f64, ser_vec};
use clext_core::AlgebraSpec;
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::Failure;

#[derive(Serialize, Debug, Clone)]
pub struct SpecEcho {
    pub lambda: usize,
    #[serde(serialize_with = "ser_vec")]
    pub alpha: Vec<f64>,
    #[serde(serialize_with = "ser_complex_vec")]
    pub kappa: Vec<Complex64>,
}

impl From<&AlgebraSpec> for SpecEcho {
    fn from(s: &AlgebraSpec) -> Self {
        Self { lambda: s.lambda(), alpha: s.alpha().to_vec(), kappa: s.kappa().to_vec() }
    }
}

#[derive(Serialize, Debug, Clone)]
pub struct Header {
    pub command: &'static str,
    pub version: &'static str,
    pub spec: SpecEcho,
    pub dim: usize,
    #[serde(serialize_with = "ser_f64")]
    pub tol: f64,
    pub seed: u64,
}

impl Header {
    pub fn new(cfg: &RunConfig) -> Self {
        Self {
            command: cfg.command.name(),
            version: env!("CARGO_PKG_VERSION"),
            spec: SpecEcho::from(&cfg.spec),
            dim: cfg.dim,
            tol: cfg.tol,
            seed: cfg.seed,
        }
    }
}

/// Delimited output: plain rows, or free text parameterised by the delimiter.
pub enum Table {
    Rows { columns: Vec<&'static str>, rows: Vec<Vec<String>> },
    Text(Box<dyn Fn(char) -> Vec<u8>>),
}

#[derive(Serialize)]
pub struct Report {
    pub header: Header,
    pub pass: bool,
    pub body: serde_json::Value,
    #[serde(skip)]
    pub table: Option<Table>,
    /// Human-readable lines shown alongside the machine report.
    #[serde(skip)]
    pub summary: Vec<String>,
}

pub fn num(x: f64) -> String {
    format_float(x)
}

pub fn to_body<S: Serialize>(value: &S) -> Result<serde_json::Value, Failure> {
    serde_json::to_value(value).map_err(|e| Failure::Usage(anyhow!(e)))
}

pub fn render(report: &Report, format: Format) -> Result<Vec<u8>, Failure> {
    let delim = match format {
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(report).map_err(|e| Failure::Usage(anyhow!(e)))?;
            bytes.push(b'\n');
            return Ok(bytes);
        }
        Format::Csv => ',',
        Format::Tsv => '\t',
    };
    match &report.table {
        Some(Table::Rows { columns, rows }) => {
            let mut out = String::new();
            out.push_str(&columns.join(&delim.to_string()));
            out.push('\n');
            for row in rows {
                out.push_str(&row.join(&delim.to_string()));
                out.push('\n');
            }
            Ok(out.into_bytes())
        }
        Some(Table::Text(f)) => Ok(f(delim)),
        None => Err(Failure::Usage(anyhow!("{} has no tabular output; use --format json", report.header.command))),
    }
}

/// Writes via a temporary file in the target directory, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Failure::Io(anyhow!(e).context(format!("writing {}", path.display())));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path)
        .map_err(|e| e.error)
        .with_context(|| format!("renaming into {}", path.display()))
        .map_err(Failure::Io)?;
    Ok(())
}
