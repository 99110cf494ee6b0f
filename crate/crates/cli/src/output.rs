//! Row sinks: CSV with `#` metadata lines, or a single JSON document whose
//! rows mirror the CSV columns.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    UInt(u64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::UInt(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::UInt(v as u64)
    }
}
impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::UInt(v) => v.to_string(),
            // Shortest round-trip representation, so equal values print equally.
            Cell::Float(v) => format!("{v:e}"),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::UInt(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(v) => Value::String(v.clone()),
        }
    }
}

enum Sink {
    Csv(Box<csv::Writer<Box<dyn Write>>>),
    Json { out: Box<dyn Write>, rows: Vec<Value> },
}

/// Collects metadata up front, streams rows, and closes with the wall time
/// and an optional `#truncated` marker.
pub struct Table {
    columns: Vec<&'static str>,
    metadata: Vec<(String, String)>,
    sink: Option<Sink>,
    /// Metadata added after the header; CSV writes it as trailing comments.
    trailer: Vec<(String, String)>,
    started: Instant,
}

impl Table {
    pub fn new(
        format: Format,
        output: Option<&Path>,
        command: &str,
        columns: Vec<&'static str>,
        metadata: Vec<(String, String)>,
    ) -> io::Result<Self> {
        let out: Box<dyn Write> = match output {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let mut meta = vec![
            ("command".to_string(), command.to_string()),
            ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
            ("timestamp".to_string(), timestamp.to_string()),
        ];
        meta.extend(metadata);
        let sink = match format {
            Format::Csv => {
                let mut out = out;
                for (k, v) in &meta {
                    writeln!(out, "# {k}: {v}")?;
                }
                let mut w = csv::WriterBuilder::new().from_writer(out);
                w.write_record(&columns)?;
                Sink::Csv(Box::new(w))
            }
            Format::Json => Sink::Json { out, rows: Vec::new() },
        };
        Ok(Table { columns, metadata: meta, sink: Some(sink), trailer: Vec::new(), started: Instant::now() })
    }

    pub fn push(&mut self, row: Vec<Cell>) -> io::Result<()> {
        debug_assert_eq!(row.len(), self.columns.len());
        match self.sink.as_mut().expect("table already finished") {
            Sink::Csv(w) => {
                w.write_record(row.iter().map(Cell::to_csv))?;
            }
            Sink::Json { rows, .. } => {
                let obj: Map<String, Value> =
                    self.columns.iter().zip(&row).map(|(c, v)| (c.to_string(), v.to_json())).collect();
                rows.push(Value::Object(obj));
            }
        }
        Ok(())
    }

    /// Extra metadata known only after the computation (fits, warnings).
    pub fn note(&mut self, key: &str, value: impl ToString) {
        let entry = (key.to_string(), value.to_string());
        self.trailer.push(entry.clone());
        self.metadata.push(entry);
    }

    pub fn finish(mut self, truncated: bool) -> io::Result<()> {
        let wall = format!("{:.3}", self.started.elapsed().as_secs_f64());
        match self.sink.take().expect("table already finished") {
            Sink::Csv(mut w) => {
                w.flush()?;
                let mut out = (*w).into_inner().map_err(|e| e.into_error())?;
                for (k, v) in &self.trailer {
                    writeln!(out, "# {k}: {v}")?;
                }
                writeln!(out, "# wall_time_s: {wall}")?;
                if truncated {
                    writeln!(out, "#truncated")?;
                }
                out.flush()
            }
            Sink::Json { mut out, rows } => {
                let mut meta: Map<String, Value> =
                    self.metadata.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
                meta.insert("wall_time_s".into(), Value::String(wall));
                let doc = serde_json::json!({
                    "metadata": meta,
                    "columns": self.columns,
                    "rows": rows,
                    "truncated": truncated,
                });
                serde_json::to_writer_pretty(&mut out, &doc)?;
                writeln!(out)?;
                out.flush()
            }
        }
    }
}
