//! Minimal CSV emission: comma separated, LF endings, 17 significant digits.
//!
//! Metadata goes in leading `# key=value` comment lines so that tables stay
//! self-describing; readers should skip lines starting with `#`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

/// Formats a float with 17 significant digits (round-trip exact).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A table built in memory and written in one go.
#[derive(Debug, Clone, Default)]
pub struct CsvTable {
    meta: Vec<(String, String)>,
    columns: Vec<String>,
    body: String,
    rows: usize,
}

/// One cell of a row.
#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl CsvTable {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        for (k, cell) in cells.iter().enumerate() {
            if k > 0 {
                self.body.push(',');
            }
            match cell {
                Cell::Num(x) => self.body.push_str(&fmt_f64(*x)),
                Cell::Int(i) => write!(self.body, "{i}").unwrap(),
                Cell::Text(s) => self.body.push_str(&quote(s)),
            }
        }
        self.body.push('\n');
        self.rows += 1;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            writeln!(out, "# {k}={v}").unwrap();
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        out.push_str(&self.body);
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.5, 1e-300, 123456.789] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn renders_meta_header_and_rows() {
        let mut t = CsvTable::new(&["a", "b", "c"]);
        t.meta("config_hash", "abc");
        t.push(vec![1.0.into(), 2usize.into(), "x,y".into()]);
        assert_eq!(
            t.render(),
            "# config_hash=abc\na,b,c\n1.0000000000000000e0,2,\"x,y\"\n"
        );
    }
}
