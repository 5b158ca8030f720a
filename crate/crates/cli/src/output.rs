//! CSV and JSON-lines emitters. CSV is comma separated with LF line endings
//! and a header row.

use std::io::{self, Write};

use serde_json::{Map, Number, Value};

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// Printed with six significant digits.
    Num(f64),
    /// Printed with a fixed number of decimals.
    Fixed(f64, usize),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => sig6(*x),
            Cell::Fixed(x, d) => fixed(*x, *d),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n', '\r']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        let num = |text: String| {
            text.parse::<f64>()
                .ok()
                .and_then(Number::from_f64)
                .map_or(Value::String(text), Value::Number)
        };
        match self {
            Cell::Num(x) => num(sig6(*x)),
            Cell::Fixed(x, d) => num(fixed(*x, *d)),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

fn fixed(x: f64, decimals: usize) -> String {
    let s = format!("{x:.decimals$}");
    // No negative zero.
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Six significant digits, trailing zeros dropped, exponent form outside
/// `[1e-5, 1e6)`.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    let rounded: f64 = format!("{x:.5e}").parse().unwrap_or(x);
    let exp = if rounded.abs() >= 10f64.powi(exp + 1) { exp + 1 } else { exp };
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{x:.5e}");
        let (m, e) = s.split_once('e').unwrap();
        let m = if m.contains('.') {
            m.trim_end_matches('0').trim_end_matches('.')
        } else {
            m
        };
        format!("{m}e{e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, format: Format, out: &mut W) -> io::Result<()> {
        match format {
            Format::Csv => {
                writeln!(out, "{}", self.header.join(","))?;
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    writeln!(out, "{}", cells.join(","))?;
                }
            }
            Format::Jsonl => {
                for row in &self.rows {
                    let mut obj = Map::new();
                    for (k, c) in self.header.iter().zip(row) {
                        obj.insert((*k).to_string(), c.json());
                    }
                    writeln!(out, "{}", Value::Object(obj))?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.5), "0.5");
        assert_eq!(sig6(0.846574), "0.846574");
        assert_eq!(sig6(0.8465735902), "0.846574");
        assert_eq!(sig6(1.0), "1");
        assert_eq!(sig6(0.99999999), "1");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(1234567.0), "1.23457e6");
        assert_eq!(sig6(3.2e-9), "3.2e-9");
        assert_eq!(sig6(-2.5e-3), "-0.0025");
        assert_eq!(sig6(0.0), "0");
    }

    #[test]
    fn csv_and_jsonl() {
        let mut t = Table::new(vec!["family", "n", "value"]);
        t.push(vec![Cell::Text("d".into()), Cell::Int(1), Cell::Fixed(1.0, 5)]);
        t.push(vec![Cell::Text("d".into()), Cell::Int(2), Cell::Text("NC".into())]);
        let mut csv = Vec::new();
        t.write(Format::Csv, &mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap(), "family,n,value\nd,1,1.00000\nd,2,NC\n");
        let mut js = Vec::new();
        t.write(Format::Jsonl, &mut js).unwrap();
        let text = String::from_utf8(js).unwrap();
        let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first["value"], 1.0);
        assert_eq!(first["family"], "d");
    }

    #[test]
    fn quotes_text_with_commas() {
        assert_eq!(Cell::Text("frechet:a=1,gamma=2".into()).csv(), "\"frechet:a=1,gamma=2\"");
        assert_eq!(Cell::Text("say \"hi\"".into()).csv(), "\"say \"\"hi\"\"\"");
        assert_eq!(Cell::Text("d".into()).csv(), "d");
    }

    #[test]
    fn no_negative_zero() {
        assert_eq!(fixed(-0.000001, 5), "0.00000");
    }
}
