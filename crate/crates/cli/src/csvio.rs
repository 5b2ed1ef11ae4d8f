//! Deterministic CSV emission: every float is printed with 17 significant
//! digits so golden files round-trip exactly.

use anyhow::{Context, Result};
use std::fmt::Write as _;
use std::path::Path;

pub struct CsvWriter {
    buf: String,
}

impl CsvWriter {
    pub fn new(header: &str) -> Self {
        let mut buf = String::new();
        buf.push_str(header);
        buf.push('\n');
        Self { buf }
    }

    pub fn row(&mut self, fields: &[CsvField]) {
        let mut first = true;
        for f in fields {
            if !first {
                self.buf.push(',');
            }
            first = false;
            match f {
                CsvField::Float(v) => {
                    let _ = write!(self.buf, "{v:.16e}");
                }
                CsvField::Int(v) => {
                    let _ = write!(self.buf, "{v}");
                }
                CsvField::Text(s) => self.buf.push_str(s),
            }
        }
        self.buf.push('\n');
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, &self.buf)
            .with_context(|| format!("cannot write {}", path.display()))
    }
}

pub enum CsvField {
    Float(f64),
    Int(i64),
    Text(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for v in [1.0, std::f64::consts::PI, -2.5e-7, 1.23456789e12] {
            let mut w = CsvWriter::new("v");
            w.row(&[CsvField::Float(v)]);
            let line = w.buf.lines().nth(1).unwrap();
            let back: f64 = line.parse().unwrap();
            assert_eq!(back, v, "{line}");
        }
    }
}
