use std::collections::HashMap;
use std::path::Path;

use crate::error::{schema, Error, Result};

pub(crate) struct Table {
    pub header: Vec<String>,
    pub rows: Vec<(u64, csv::StringRecord)>,
    index: HashMap<String, usize>,
}

impl Table {
    pub fn read_path(path: &Path) -> Result<Table> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::read_bytes(&bytes).map_err(|e| match e {
            Error::Schema(msg) => schema!("{}: {msg}", path.display()),
            other => other,
        })
    }

    pub fn read_bytes(bytes: &[u8]) -> Result<Table> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(bytes);
        let header: Vec<String> = match rdr.headers() {
            Ok(h) => h.iter().map(|s| s.trim_start_matches('\u{feff}').to_string()).collect(),
            Err(e) => return Err(schema!("unreadable header: {e}")),
        };
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| schema!("malformed CSV: {e}"))?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            if rec.iter().all(|c| c.is_empty()) {
                continue;
            }
            rows.push((line, rec));
        }
        let index = header.iter().enumerate().map(|(i, h)| (h.clone(), i)).collect();
        Ok(Table { header, rows, index })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.column(name)
            .ok_or_else(|| schema!("missing required column '{name}'"))
    }
}

pub(crate) fn cell<'a>(rec: &'a csv::StringRecord, col: usize) -> &'a str {
    rec.get(col).unwrap_or("")
}

/// Parses an optional numeric cell; empty means missing.
pub(crate) fn opt_number(rec: &csv::StringRecord, line: u64, col: usize, name: &str) -> Result<Option<f64>> {
    let raw = cell(rec, col);
    if raw.is_empty() {
        return Ok(None);
    }
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(schema!("line {line}, column '{name}': cannot parse '{raw}' as a number")),
    }
}

pub(crate) fn number(rec: &csv::StringRecord, line: u64, col: usize, name: &str) -> Result<f64> {
    opt_number(rec, line, col, name)?
        .ok_or_else(|| schema!("line {line}, column '{name}': value required"))
}

pub(crate) fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub(crate) fn writer<W: std::io::Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).from_writer(w)
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io("<csv writer>", io),
        other => schema!("csv write failed: {other:?}"),
    }
}
