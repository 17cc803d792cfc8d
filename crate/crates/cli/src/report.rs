//! Tabular reports, written as CSV or as a JSON array with the same fields.

use std::io::Write;

use serde_json::{Map, Number, Value};

/// Version of the column layout; emitted as the first column of every row.
pub const SCHEMA_VERSION: i64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Text(String),
    Bool(bool),
    /// Not applicable for this row.
    Na,
}

impl Cell {
    pub fn status(pass: bool) -> Self {
        Cell::Text(if pass { "PASS" } else { "FAIL" }.into())
    }

    pub fn opt_status(pass: Option<bool>) -> Self {
        pass.map_or(Cell::Na, Cell::status)
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Na => "N/A".into(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => i64::try_from(*v).map_or_else(|_| Value::String(v.to_string()), Value::from),
            Cell::Float(v) => Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Na => Value::String("N/A".into()),
        }
    }
}

/// Shortest round-trip text; scientific notation outside `[1e-4, 1e15)`.
fn format_float(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

macro_rules! int_cell {
    ($($t:ty),*) => {$(
        impl From<$t> for Cell {
            fn from(v: $t) -> Self {
                Cell::Int(v as i128)
            }
        }
    )*};
}
int_cell!(u32, u64, usize, i64, i32);

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
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Rows sharing one set of named columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        let mut all = vec!["schema_version".to_string()];
        all.extend(columns.into_iter().map(Into::into));
        Self {
            columns: all,
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn push(&mut self, cells: Vec<Cell>) {
        let mut row = vec![Cell::Int(SCHEMA_VERSION as i128)];
        row.extend(cells);
        assert_eq!(row.len(), self.columns.len(), "row width does not match header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Cell in a named column.
    pub fn get(&self, row: usize, column: &str) -> Option<&Cell> {
        let k = self.columns.iter().position(|c| c == column)?;
        self.rows.get(row).map(|r| &r[k])
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.flush()
    }

    fn write_json<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                Value::Object(obj)
            })
            .collect();
        serde_json::to_writer_pretty(&mut out, &rows)?;
        writeln!(out)
    }

    pub fn render(&self, format: Format) -> String {
        let mut buf = Vec::new();
        self.write(format, &mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 report")
    }
}
