//! Deterministic text encodings shared by every exported artifact.
//!
//! Floats are written with 17 significant digits in lowercase scientific
//! notation with a signed exponent (`-1.2500000000000000e-1`,
//! `2.0000000000000000e+0`), which round-trips every `f64` bit-exactly.
//! CSV files use a header row and LF line endings.

use serde_json::{Number, Value};

use crate::error::{Error, Result};

/// 17-significant-digit scientific rendering. Negative zero is written as zero.
pub fn sci(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    let text = format!("{x:.16e}");
    match text.split_once('e') {
        Some((mantissa, exp)) if !exp.starts_with('-') => format!("{mantissa}e+{exp}"),
        _ => text,
    }
}

/// A JSON number carrying the exact [`sci`] text.
pub fn json_number(x: f64) -> Result<Value> {
    if !x.is_finite() {
        return Err(Error::NonFinite {
            context: "JSON serialization",
        });
    }
    let n: Number = sci(x).parse()?;
    Ok(Value::Number(n))
}

pub fn json_numbers(xs: &[f64]) -> Result<Value> {
    xs.iter()
        .map(|&x| json_number(x))
        .collect::<Result<Vec<_>>>()
        .map(Value::Array)
}

/// Pretty JSON with a trailing newline.
pub fn to_json_text(value: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Accumulates CSV rows of floats under a fixed header.
#[derive(Debug, Clone)]
pub struct CsvTable {
    columns: usize,
    text: String,
}

impl CsvTable {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut text = header
            .iter()
            .map(|h| h.as_ref())
            .collect::<Vec<_>>()
            .join(",");
        text.push('\n');
        Self {
            columns: header.len(),
            text,
        }
    }

    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.columns, "CSV row width mismatch");
        let line = row.iter().map(|&x| sci(x)).collect::<Vec<_>>().join(",");
        self.text.push_str(&line);
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_lowercase() {
        assert_eq!(sci(0.125), "1.2500000000000000e-1");
        assert_eq!(sci(-0.0), "0.0000000000000000e+0");
        assert_eq!(sci(-250.0), "-2.5000000000000000e+2");
        assert_eq!(sci(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn json_keeps_text() {
        let v = json_numbers(&[0.5, -2.0]).unwrap();
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            "[5.0000000000000000e-1,-2.0000000000000000e+0]"
        );
        assert!(json_number(f64::NAN).is_err());
    }

    #[test]
    fn csv_header_and_lf() {
        let mut t = CsvTable::new(&["a", "b"]);
        t.push_row(&[1.0, 2.0]);
        assert_eq!(
            t.into_string(),
            "a,b\n1.0000000000000000e+0,2.0000000000000000e+0\n"
        );
    }
}
