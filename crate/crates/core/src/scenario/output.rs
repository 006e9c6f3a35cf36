//! Tagged tables and their CSV / JSON rendering.
//!
//! Every column carries the formula (or provenance) of the numbers in it.
//! CSV output puts column names in the header and the formula tags in the
//! first record; JSON output carries them in a `formulas` object next to
//! the rows. Numbers are rounded to the requested significant digits and
//! then written in shortest round-trip form.

use serde::Serialize;
use serde_json::{Map, Value};

use super::config::OutputFormat;
use crate::{Error, Result};

pub const DEFAULT_PRECISION: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    pub formula: String,
}

impl Column {
    pub fn new(name: impl Into<String>, formula: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            formula: formula.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Number(f64),
    Text(String),
    Flag(bool),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Number(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Number)
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

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Flag(b)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn render(&self, format: OutputFormat, precision: usize) -> Result<String> {
        if precision == 0 || precision > 17 {
            return Err(Error::param("precision", format!("must be between 1 and 17, got {precision}")));
        }
        Ok(match format {
            OutputFormat::Csv => self.to_csv(precision)?,
            OutputFormat::Json => self.to_json(precision),
        })
    }

    fn to_csv(&self, precision: usize) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(self.columns.iter().map(|c| c.name.as_str())).map_err(io)?;
        w.write_record(self.columns.iter().map(|c| c.formula.as_str())).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|cell| format_cell(cell, precision))).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    fn to_json(&self, precision: usize) -> String {
        let formulas: Map<String, Value> = self
            .columns
            .iter()
            .map(|c| (c.name.clone(), Value::String(c.formula.clone())))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, cell)| (c.name.clone(), json_cell(cell, precision)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("formulas".into(), Value::Object(formulas));
        doc.insert("rows".into(), Value::Array(rows));
        serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON values serialize") + "\n"
    }
}

/// Rounds to `digits` significant digits.
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

/// Shortest round-trip text, in exponent form outside `[1e-4, 1e6)`.
pub fn format_number(x: f64, digits: usize) -> String {
    let r = round_significant(x, digits);
    if r.is_nan() {
        return "nan".into();
    }
    if r.is_infinite() {
        return if r > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = r.abs();
    if r == 0.0 || (1e-4..1e6).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn format_cell(cell: &Cell, digits: usize) -> String {
    match cell {
        Cell::Number(x) => format_number(*x, digits),
        Cell::Text(s) => s.clone(),
        Cell::Flag(b) => b.to_string(),
        Cell::Missing => String::new(),
    }
}

fn json_cell(cell: &Cell, digits: usize) -> Value {
    match cell {
        Cell::Number(x) => {
            let r = round_significant(*x, digits);
            serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number)
        }
        Cell::Text(s) => Value::String(s.clone()),
        Cell::Flag(b) => Value::Bool(*b),
        Cell::Missing => Value::Null,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(vec![Column::new("q", "q = 1 - |Delta|^2"), Column::new("note", "free text")]);
        t.push(vec![Cell::Number(2.508_329_428_367_402e-3), "leo".into()]);
        t.push(vec![Cell::Missing, "a, b".into()]);
        t
    }

    #[test]
    fn rounding() {
        assert_eq!(round_significant(2.508_329_428_367_402e-3, 3), 2.51e-3);
        assert_eq!(format_number(2.508_329_428_367_402e-3, 12), "0.00250832942837");
        assert_eq!(format_number(1.431_847_830_664_789e-10, 12), "1.43184783066e-10");
        assert_eq!(format_number(200.0, 12), "200");
        assert_eq!(format_number(0.0, 3), "0");
        assert_eq!(format_number(f64::INFINITY, 3), "inf");
    }

    #[test]
    fn csv_layout() {
        let text = sample().render(OutputFormat::Csv, 4).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "q,note");
        assert_eq!(lines[1], "q = 1 - |Delta|^2,free text");
        assert_eq!(lines[2], "0.002508,leo");
        assert_eq!(lines[3], ",\"a, b\"");
    }

    #[test]
    fn json_layout() {
        let text = sample().render(OutputFormat::Json, 4).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["formulas"]["q"], "q = 1 - |Delta|^2");
        assert_eq!(v["rows"][0]["q"], 0.002508);
        assert!(v["rows"][1]["q"].is_null());
    }

    #[test]
    fn precision_bounds() {
        assert!(sample().render(OutputFormat::Csv, 0).is_err());
        assert!(sample().render(OutputFormat::Json, 18).is_err());
        // 17 digits round-trips exactly
        let x = 0.1 + 0.2;
        assert_eq!(format_number(x, 17).parse::<f64>().unwrap(), x);
    }
}
