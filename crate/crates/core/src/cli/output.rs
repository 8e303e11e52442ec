//! Tables written by the commands, as CSV or JSON lines.

use std::io::{self, Write};

use serde_json::{Map, Value};

use super::config::OutputFormat;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(u64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &'static [&'static str]) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: OutputFormat, out: &mut dyn Write) -> io::Result<()> {
        match format {
            OutputFormat::Csv => {
                writeln!(out, "{}", self.columns.join(","))?;
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(csv_cell).collect();
                    writeln!(out, "{}", cells.join(","))?;
                }
            }
            OutputFormat::Jsonl => {
                for row in &self.rows {
                    let mut obj = Map::new();
                    for (name, cell) in self.columns.iter().zip(row) {
                        obj.insert((*name).into(), json_cell(cell));
                    }
                    writeln!(out, "{}", Value::Object(obj))?;
                }
            }
        }
        Ok(())
    }
}

fn csv_cell(cell: &Cell) -> String {
    match cell {
        Cell::Real(v) => format_real(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Text(s) => s.clone(),
    }
}

fn json_cell(cell: &Cell) -> Value {
    match cell {
        Cell::Real(v) if v.is_finite() => Value::from(*v),
        Cell::Real(v) => Value::from(format_real(*v)),
        Cell::Int(v) => Value::from(*v),
        Cell::Text(s) => Value::from(s.as_str()),
    }
}

/// 17 significant digits, like C's `%.17g` but keeping trailing zeros:
/// positional notation for decimal exponents in `[-5, 17)`, otherwise
/// scientific.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{v:.16e}");
    let exponent: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..17).contains(&exponent) {
        format!("{:.*}", (16 - exponent) as usize, v)
    } else {
        sci
    }
}
