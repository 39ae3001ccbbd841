//! Row-oriented output shared by every subcommand, rendered as CSV or JSON.

use std::io::Write;

use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    /// Arbitrary-length decimal, emitted as a JSON string.
    Digits(String),
    Empty,
}

/// Fixed-point with 15 significant digits; scientific outside `[1e-5, 1e15)`.
pub fn sig15(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..15).contains(&exp) {
        return format!("{x:.14e}");
    }
    format!("{:.*}", (14 - exp) as usize, x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sheet {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Sheet {
    pub fn new(columns: &[&'static str]) -> Self {
        Sheet { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        out.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|c| match c {
                Cell::Int(v) => v.to_string(),
                Cell::Real(v) => sig15(*v),
                Cell::Digits(s) => s.clone(),
                Cell::Empty => String::new(),
            }))
            .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let records = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(&k, c)| {
                        let v = match c {
                            Cell::Int(v) => Value::from(*v),
                            Cell::Real(v) => sig15(*v)
                                .parse::<f64>()
                                .ok()
                                .and_then(Number::from_f64)
                                .map_or(Value::Null, Value::Number),
                            Cell::Digits(s) => Value::String(s.clone()),
                            Cell::Empty => Value::Null,
                        };
                        (k.to_string(), v)
                    })
                    .collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(records)
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, &self.to_json()).map_err(|e| Error::Io(e.into()))?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig15(1.6449340668482264), "1.64493406684823");
        assert_eq!(sig15(46682.37), "46682.3700000000");
        assert_eq!(sig15(0.0), "0");
        assert_eq!(sig15(3e-17), "3.00000000000000e-17");
    }

    #[test]
    fn csv_and_json() {
        let mut s = Sheet::new(&["n", "x", "big", "opt"]);
        s.push(vec![
            Cell::Int(8),
            Cell::Real(0.5),
            Cell::Digits("123456789012345678901234".into()),
            Cell::Empty,
        ]);
        let mut csv = Vec::new();
        s.write_csv(&mut csv).unwrap();
        assert_eq!(
            String::from_utf8(csv).unwrap(),
            "n,x,big,opt\n8,0.500000000000000,123456789012345678901234,\n"
        );
        let json = s.to_json();
        assert_eq!(json[0]["n"], 8);
        assert_eq!(json[0]["x"], 0.5);
        assert_eq!(json[0]["big"], "123456789012345678901234");
        assert!(json[0]["opt"].is_null());
        let empty = Sheet::new(&["n"]);
        let mut csv = Vec::new();
        empty.write_csv(&mut csv).unwrap();
        assert_eq!(csv, b"n\n");
    }
}
