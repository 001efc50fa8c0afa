//! CSV curves with a versioned schema comment, and pretty JSON result sets.

use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// CSV text: `# syk-replica <schema> v<version>`, the column line, rows.
#[derive(Clone, Debug)]
pub struct Csv {
    schema: &'static str,
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(schema: &'static str, columns: &[&'static str]) -> Self {
        Self { schema, columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# syk-replica {} v{}", self.schema, SCHEMA_VERSION);
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render())?;
        Ok(())
    }
}

/// Full-precision float formatting that round-trips.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

/// Reads `(x, y)` pairs from the first two columns of a CSV, skipping
/// comments and a non-numeric header line.
pub fn read_pairs(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split(',').map(str::trim);
        let (a, b) = (it.next().unwrap_or(""), it.next().unwrap_or(""));
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(x), Ok(y)) => out.push((x, y)),
            _ if out.is_empty() => continue,
            _ => {
                return Err(crate::error::Error::Config { line: i + 1, msg: format!("bad data line `{line}`") });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout_and_pairs() {
        let mut c = Csv::new("test", &["beta", "value"]);
        c.push(vec![num(20.0), num(0.1)]);
        c.push(vec![num(40.0), num(1.0 / 3.0)]);
        let text = c.render();
        assert!(text.starts_with("# syk-replica test v1\nbeta,value\n20.0,0.1\n"));
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        c.write(&p).unwrap();
        assert_eq!(read_pairs(&p).unwrap(), vec![(20.0, 0.1), (40.0, 1.0 / 3.0)]);
    }
}
