//! CSV and JSON rendering of result tables.
//!
//! CSV files start with `#` metadata lines (version, resolved config, derived
//! values), then a header row. Floats are written with 17 significant digits.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Format, RunConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(x) => float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(_) | Cell::Empty => Value::Null,
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Float)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

macro_rules! int_cell {
    ($($t:ty),*) => {$(
        impl From<$t> for Cell {
            fn from(i: $t) -> Self {
                Cell::Int(i as i64)
            }
        }
    )*};
}
int_cell!(u32, usize, i32);

/// Scientific notation with 17 significant digits.
pub fn float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Derived scalars reported alongside the rows.
    pub meta: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.meta.push((key.into(), value.into()));
    }
}

pub fn render(table: &Table, config: &RunConfig) -> std::io::Result<Vec<u8>> {
    match config.format {
        Format::Csv => render_csv(table, config),
        Format::Json => render_json(table, config),
    }
}

fn render_csv(table: &Table, config: &RunConfig) -> std::io::Result<Vec<u8>> {
    let mut out = Vec::new();
    writeln!(out, "# jch {VERSION}")?;
    for (key, value) in &config.resolved {
        writeln!(out, "# {key} = {value}")?;
    }
    for (key, value) in &table.meta {
        writeln!(out, "# result.{key} = {value}")?;
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::csv))?;
    }
    w.into_inner().map_err(|e| e.into_error())
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    version: &'a str,
    config: serde_json::Map<String, Value>,
    results: serde_json::Map<String, Value>,
    columns: &'a [&'static str],
    rows: Vec<Vec<Value>>,
}

fn render_json(table: &Table, config: &RunConfig) -> std::io::Result<Vec<u8>> {
    let doc = JsonDoc {
        version: VERSION,
        config: config
            .resolved
            .iter()
            .map(|(k, v)| (k.to_string(), json!(v)))
            .collect(),
        results: table.meta.iter().map(|(k, v)| (k.clone(), json!(v))).collect(),
        columns: &table.columns,
        rows: table
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::json).collect())
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&doc)?;
    out.push(b'\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Assignments;

    fn config(format: &str) -> RunConfig {
        let mut a = Assignments::default();
        a.read_argument(&format!("format={format}")).unwrap();
        a.resolve().unwrap()
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, -0.510_049_998_750_062_4, 1e-300, 123456.789, 0.0] {
            let s = float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17);
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["k", "branch_index", "energy_over_beta"]);
        t.push(vec![0.5.into(), 1u32.into(), Cell::Empty]);
        t.meta("tip", "0.25");
        let text = String::from_utf8(render(&t, &config("csv")).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("# jch {VERSION}"));
        assert!(lines.contains(&"# result.tip = 0.25"));
        let header = lines.iter().position(|l| !l.starts_with('#')).unwrap();
        assert_eq!(lines[header], "k,branch_index,energy_over_beta");
        assert_eq!(lines[header + 1], "5.0000000000000000e-1,1,");
        assert!(!text.contains('\r'));
    }

    #[test]
    fn json_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![f64::NAN.into(), "x".into()]);
        let v: Value = serde_json::from_slice(&render(&t, &config("json")).unwrap()).unwrap();
        assert_eq!(v["rows"][0][0], Value::Null);
        assert_eq!(v["rows"][0][1], "x");
        assert_eq!(v["config"]["format"], "json");
    }
}
