//! CSV and JSON table writers.
//!
//! CSV: `#`-prefixed metadata lines, a header row, then data. JSON: one
//! object `{"metadata": {..}, "columns": [..], "rows": [[..], ..]}`.
//! Numbers use the shortest representation that round-trips.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::ser::{Serialize, Serializer};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Num(v) if v.is_finite() => s.serialize_f64(*v),
            Cell::Num(v) => s.serialize_str(&format_number(*v)),
            Cell::Int(v) => s.serialize_u64(*v),
            Cell::Bool(v) => s.serialize_bool(*v),
            Cell::Text(v) => s.serialize_str(v),
        }
    }
}

/// Shortest round-trip decimal, switching to exponent form outside
/// `1e-5 <= |x| < 1e16`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn render(c: &Cell) -> String {
    match c {
        Cell::Num(v) => format_number(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Bool(v) => v.to_string(),
        Cell::Text(v) => v.clone(),
    }
}

pub type Metadata = Vec<(String, String)>;

enum Inner {
    Csv(csv::Writer<Box<dyn Write>>),
    Json { out: Box<dyn Write>, first: bool },
}

/// Writes one table row by row; call [`TableSink::finish`] at the end.
pub struct TableSink {
    inner: Inner,
    path: PathBuf,
    width: usize,
}

fn open(out: Option<&Path>) -> CliResult<(Box<dyn Write>, PathBuf)> {
    match out {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::io(p, e))?;
            Ok((Box::new(BufWriter::new(f)), p.to_path_buf()))
        }
        None => Ok((Box::new(BufWriter::new(io::stdout().lock())), PathBuf::from("<stdout>"))),
    }
}

impl TableSink {
    pub fn create(out: Option<&Path>, format: Format, meta: &Metadata, columns: &[&str]) -> CliResult<Self> {
        let (mut w, path) = open(out)?;
        let io_err = |e| CliError::io(&path, e);
        let inner = match format {
            Format::Csv => {
                for (k, v) in meta {
                    writeln!(w, "# {k}: {v}").map_err(io_err)?;
                }
                let mut cw = csv::WriterBuilder::new().from_writer(w);
                cw.write_record(columns).map_err(|e| csv_err(&path, e))?;
                Inner::Csv(cw)
            }
            Format::Json => {
                let m: serde_json::Map<String, serde_json::Value> =
                    meta.iter().map(|(k, v)| (k.clone(), v.clone().into())).collect();
                w.write_all(b"{\"metadata\":").map_err(io_err)?;
                serde_json::to_writer(&mut w, &m).map_err(|e| json_err(&path, e))?;
                w.write_all(b",\"columns\":").map_err(io_err)?;
                serde_json::to_writer(&mut w, columns).map_err(|e| json_err(&path, e))?;
                w.write_all(b",\"rows\":[").map_err(io_err)?;
                Inner::Json { out: w, first: true }
            }
        };
        Ok(Self {
            inner,
            path,
            width: columns.len(),
        })
    }

    pub fn row(&mut self, cells: &[Cell]) -> CliResult<()> {
        debug_assert_eq!(cells.len(), self.width);
        match &mut self.inner {
            Inner::Csv(cw) => cw
                .write_record(cells.iter().map(render))
                .map_err(|e| csv_err(&self.path, e)),
            Inner::Json { out, first } => {
                if !*first {
                    out.write_all(b",").map_err(|e| CliError::io(&self.path, e))?;
                }
                *first = false;
                serde_json::to_writer(out, cells).map_err(|e| json_err(&self.path, e))
            }
        }
    }

    pub fn num_row(&mut self, values: &[f64]) -> CliResult<()> {
        let cells: Vec<Cell> = values.iter().map(|&v| Cell::Num(v)).collect();
        self.row(&cells)
    }

    pub fn finish(self) -> CliResult<()> {
        let path = self.path;
        match self.inner {
            Inner::Csv(mut cw) => cw.flush().map_err(|e| CliError::io(&path, e)),
            Inner::Json { mut out, .. } => out
                .write_all(b"]}\n")
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io(&path, e)),
        }
    }
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::io(path, io::Error::other(format!("{other:?}"))),
    }
}

fn json_err(path: &Path, e: serde_json::Error) -> CliError {
    CliError::io(path, io::Error::other(e))
}

/// Writes a whole serializable document as pretty JSON.
pub fn write_json<T: serde::Serialize>(out: Option<&Path>, value: &T) -> CliResult<()> {
    let (mut w, path) = open(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| json_err(&path, e))?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| CliError::io(&path, e))
}
