//! Minimal RFC-4180-style CSV writing: header row mandatory, `.` decimal
//! separator (Rust float formatting is locale-independent), `\n` line ends,
//! full shortest-roundtrip precision for floats.

use std::fmt::Write as _;

#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    UInt(u64),
    Float(f64),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::UInt(v)
    }
}
impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

/// Render a table to CSV text. Panics if a row length differs from the
/// header length (schema bugs should not produce files).
pub fn render(header: &[&str], rows: &[Vec<Cell>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        assert_eq!(row.len(), header.len(), "row width != header width");
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            match cell {
                Cell::Int(v) => write!(out, "{v}").unwrap(),
                Cell::UInt(v) => write!(out, "{v}").unwrap(),
                Cell::Float(v) => write!(out, "{v:?}").unwrap(),
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_full_precision() {
        let text = render(
            &["n", "value"],
            &[
                vec![Cell::UInt(1), Cell::Float(0.1)],
                vec![Cell::UInt(2), Cell::Float(1.0 / 3.0)],
            ],
        );
        assert_eq!(text, "n,value\n1,0.1\n2,0.3333333333333333\n");
        let parsed: f64 = "0.3333333333333333".parse().unwrap();
        assert_eq!(parsed, 1.0 / 3.0);
    }
}
