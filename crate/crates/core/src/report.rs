//! CSV reports with `#key=value` header lines.
//!
//! Reals are written with 17 significant digits so that every value
//! round-trips exactly; the header echoes the full configuration (never the
//! worker count) so that a report can be regenerated from itself.

use std::fmt;
use std::io::Write;

use crate::error::Result;

/// A single CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(u64),
    Real(f64),
    Text(String),
    Bool(bool),
    /// Not applicable; written as an empty cell.
    Missing,
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Real(v) => write!(f, "{v:.16e}"),
            Value::Text(s) => f.write_str(s),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Missing => Ok(()),
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Real(v)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as u64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Missing, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    header: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

impl ExperimentReport {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self {
            header: vec![
                ("command".into(), command.into()),
                ("version".into(), env!("CARGO_PKG_VERSION").into()),
            ],
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_header(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.header.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push_row(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the columns");
        self.rows.push(row);
    }

    pub fn header(&self) -> &[(String, String)] {
        &self.header
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    /// True when every cell of the `pass` column is `true` or not
    /// applicable. Reports without a `pass` column pass.
    pub fn passed(&self) -> bool {
        match self.columns.iter().position(|c| c == "pass") {
            None => true,
            Some(i) => self
                .rows
                .iter()
                .all(|r| matches!(r[i], Value::Bool(true) | Value::Missing)),
        }
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        for (k, v) in &self.header {
            writeln!(out, "#{k}={v}")?;
        }
        let mut w = csv::WriterBuilder::new().from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        Ok(buf)
    }
}
