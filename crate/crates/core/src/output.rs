//! Delimited-text tables and dense matrices with metadata headers.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// Column table written as tab-separated text. Metadata lines start with `# `.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { meta: Vec::new(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_meta(mut self, meta: &[(String, String)]) -> Self {
        self.meta.extend_from_slice(meta);
        self
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            for (i, line) in v.lines().enumerate() {
                if i == 0 {
                    let _ = writeln!(s, "# {k}: {line}");
                } else {
                    let _ = writeln!(s, "#   {line}");
                }
            }
        }
        let _ = writeln!(s, "{}", self.columns.join("\t"));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| format!("{v:.10e}")).collect();
            let _ = writeln!(s, "{}", cells.join("\t"));
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::File::create(path)?.write_all(self.render().as_bytes())?;
        Ok(())
    }

    /// Parses text produced by [`Table::render`].
    pub fn parse(text: &str) -> Option<Table> {
        let mut t = Table::default();
        let mut lines = text.lines().peekable();
        while let Some(l) = lines.peek() {
            if let Some(rest) = l.strip_prefix("# ") {
                if let Some((k, v)) = rest.split_once(": ") {
                    t.meta.push((k.to_string(), v.to_string()));
                }
                lines.next();
            } else if l.starts_with('#') {
                lines.next();
            } else {
                break;
            }
        }
        t.columns = lines.next()?.split('\t').map(str::to_string).collect();
        for l in lines {
            let row: Option<Vec<f64>> = l.split('\t').map(|c| c.parse().ok()).collect();
            t.rows.push(row?);
        }
        Some(t)
    }
}

/// Row-major dense matrix with axis labels, written as text.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Matrix {
    pub meta: Vec<(String, String)>,
    pub row_axis: (String, Vec<f64>),
    pub col_axis: (String, Vec<f64>),
    pub values: Vec<f64>,
}

impl Matrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.col_axis.1.len() + j]
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(s, "# {k}: {v}");
        }
        let _ = writeln!(s, "# rows: {} ({} values)", self.row_axis.0, self.row_axis.1.len());
        let _ = writeln!(s, "# cols: {} ({} values)", self.col_axis.0, self.col_axis.1.len());
        let head: Vec<String> = self.col_axis.1.iter().map(|v| format!("{v:.8e}")).collect();
        let _ = writeln!(s, "{}\\{}\t{}", self.row_axis.0, self.col_axis.0, head.join("\t"));
        let nc = self.col_axis.1.len();
        for (i, r) in self.row_axis.1.iter().enumerate() {
            let cells: Vec<String> = self.values[i * nc..(i + 1) * nc].iter().map(|v| format!("{v:.10e}")).collect();
            let _ = writeln!(s, "{r:.8e}\t{}", cells.join("\t"));
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::File::create(path)?.write_all(self.render().as_bytes())?;
        Ok(())
    }
}
