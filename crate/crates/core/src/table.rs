//! Tabular results and their CSV/JSON serialization.
//!
//! Headers are `name[unit]`. Numbers are written with Rust's shortest
//! round-trip exponent formatting, so parsing a file back gives the same
//! bits. Run metadata (timestamp included) goes to a sidecar file and never
//! into the data payload.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Domain(format!("format must be csv or json, got `{s}`"))),
        }
    }
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// A grid point or row that could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    /// Position in the requested grid order.
    pub index: usize,
    /// Coordinates of the point, keyed by column header.
    pub at: Vec<(String, f64)>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    /// Short identifier, used as a file-name suffix for secondary tables.
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<Failure>,
}

/// Splits `name[unit]`; `None` if the header carries no unit.
pub fn parse_header(h: &str) -> Option<(&str, &str)> {
    let open = h.find('[')?;
    let unit = h[open + 1..].strip_suffix(']')?;
    let name = &h[..open];
    if name.is_empty() || unit.is_empty() || unit.contains('[') || unit.contains(']') {
        return None;
    }
    Some((name, unit))
}

impl ResultTable {
    pub fn new(name: impl Into<String>, columns: Vec<String>) -> Result<Self> {
        for c in &columns {
            if parse_header(c).is_none() {
                return Err(Error::Domain(format!("column `{c}` lacks a [unit] suffix")));
            }
        }
        Ok(ResultTable { name: name.into(), columns, rows: Vec::new(), failures: Vec::new() })
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Domain(format!("row has {} values for {} columns", row.len(), self.columns.len())));
        }
        if let Some((i, v)) = row.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite value {v} in column `{}`", self.columns[i])));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, header: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == header)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| Error::Io(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r.iter().map(|v| format!("{v:e}"))).map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_csv(name: &str, text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let columns: Vec<String> = r.headers().map_err(|e| Error::Io(e.to_string()))?.iter().map(String::from).collect();
        let mut t = ResultTable::new(name, columns)?;
        for rec in r.records() {
            let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
            let row = rec
                .iter()
                .map(|f| f.parse::<f64>().map_err(|e| Error::Io(format!("`{f}`: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            t.push(row)?;
        }
        Ok(t)
    }

    /// `{"columns": [...], "rows": [[...], ...]}`.
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Payload<'a> {
            columns: &'a [String],
            rows: &'a [Vec<f64>],
        }
        let mut s = serde_json::to_string_pretty(&Payload { columns: &self.columns, rows: &self.rows }).map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Everything needed to rerun a table.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub command: String,
    pub version: &'static str,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub config: serde_json::Value,
    pub options: serde_json::Value,
    pub failures: Vec<Failure>,
}

impl Metadata {
    pub fn new(command: &str, config: serde_json::Value, options: serde_json::Value) -> Self {
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Metadata { command: command.into(), version: env!("CARGO_PKG_VERSION"), timestamp, config, options, failures: Vec::new() }
    }
}

/// Path of a secondary table: `out.csv` + `depth` → `out.depth.csv`.
pub fn sibling_path(out: &Path, suffix: &str, format: Format) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.{suffix}.{}", format.extension()))
}

pub fn meta_path(data: &Path) -> PathBuf {
    let mut s = data.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Writes the data file and its `.meta.json` sidecar.
pub fn write_table(path: &Path, table: &ResultTable, format: Format, meta: &Metadata) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    std::fs::write(path, table.render(format)?).map_err(io)?;
    let mut m = meta.clone();
    m.failures = table.failures.clone();
    let mut f = std::fs::File::create(meta_path(path)).map_err(io)?;
    serde_json::to_writer_pretty(&mut f, &m).map_err(|e| Error::Io(e.to_string()))?;
    f.write_all(b"\n").map_err(io)?;
    Ok(())
}
