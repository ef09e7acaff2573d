//! Column tables and their CSV and JSON forms.
//!
//! Floats are always written with 17 significant digits in exponent
//! notation, in both formats, so output is byte-stable and round-trips.

use serde::Serialize;
use serde_json::value::RawValue;

use crate::config::Format;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl Cell {
    pub fn as_f64(self) -> f64 {
        match self {
            Cell::Int(v) => v as f64,
            Cell::Float(v) => v,
        }
    }

    fn text(self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => sci(v),
        }
    }
}

/// `x` with 17 significant digits, e.g. `-1.2500000000000000e-3`.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Serialize)]
struct JsonTable<'a> {
    command: &'a str,
    columns: &'a [String],
    rows: Vec<Vec<Box<RawValue>>>,
}

impl Table {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Result<usize, CliError> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| CliError::Config(format!("table has no column `{name}`")))
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => Ok(self.to_csv()),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|c| c.text()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| RawValue::from_string(c.text()))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Numerical(format!("non-finite value in output: {e}")))?;
        let doc = JsonTable {
            command: &self.command,
            columns: &self.columns,
            rows,
        };
        let mut text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        #[derive(serde::Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Doc {
            command: String,
            columns: Vec<String>,
            rows: Vec<Vec<serde_json::Number>>,
        }
        let doc: Doc = serde_json::from_str(text).map_err(|e| CliError::Config(format!("bad table JSON: {e}")))?;
        let mut rows = Vec::with_capacity(doc.rows.len());
        for row in doc.rows {
            if row.len() != doc.columns.len() {
                return Err(CliError::Config(format!(
                    "bad table JSON: row of {} values for {} columns",
                    row.len(),
                    doc.columns.len()
                )));
            }
            rows.push(
                row.into_iter()
                    .map(|v| match v.as_i64() {
                        Some(i) => Cell::Int(i),
                        None => Cell::Float(v.as_f64().unwrap_or(f64::NAN)),
                    })
                    .collect(),
            );
        }
        Ok(Self {
            command: doc.command,
            columns: doc.columns,
            rows,
        })
    }
}
