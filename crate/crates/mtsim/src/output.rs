//! CSV tables and the run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Self::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Self::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Self::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Self::Text(x.to_string())
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            // Debug for f64 is the shortest string that round-trips, with an
            // exponent for very large or small magnitudes.
            Self::Num(x) => write!(f, "{x:?}"),
            Self::Int(i) => write!(f, "{i}"),
            Self::Bool(b) => write!(f, "{b}"),
            Self::Text(s) => f.write_str(&quote(s)),
        }
    }
}

/// One curve; column names carry their unit in brackets.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width of table {}",
            self.name
        );
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let head: Vec<String> = self.columns.iter().map(|c| quote(c)).collect();
        s.push_str(&head.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::to_string).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        self.rows
            .iter()
            .map(|r| match r[k] {
                Cell::Num(x) => Some(x),
                Cell::Int(i) => Some(i as f64),
                _ => None,
            })
            .collect()
    }
}

/// Writes every table and `manifest.json` into `dir`; returns the paths.
pub fn write_outputs(
    dir: &Path,
    tables: &[CsvTable],
    manifest: &Value,
) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for t in tables {
        let p = dir.join(t.file_name());
        std::fs::write(&p, t.render())?;
        paths.push(p);
    }
    let p = dir.join("manifest.json");
    let text =
        serde_json::to_string_pretty(manifest).map_err(|e| CliError::Numerical(e.to_string()))?;
    std::fs::write(&p, text + "\n")?;
    paths.push(p);
    Ok(paths)
}

pub fn manifest(
    cfg: &crate::RunConfig,
    tables: &[CsvTable],
    diagnostics: &Value,
    wall_time_s: f64,
    status: &str,
) -> Value {
    json!({
        "experiment": cfg.experiment,
        "mtsim_version": env!("CARGO_PKG_VERSION"),
        "library_version": quasicharge::VERSION,
        "units": { "energy": "ueV", "time": "ns (t_ns = t * hbar, hbar = 0.6582119569 ueV ns)" },
        "config": cfg.resolved(),
        "config_origin": cfg.origins(),
        "files": tables.iter().map(CsvTable::file_name).collect::<Vec<_>>(),
        "diagnostics": diagnostics,
        "wall_time_s": wall_time_s,
        "status": status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02e23, -1e-300, 0.0] {
            let s = Cell::Num(x).to_string();
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap();
            let digits = mantissa
                .trim_start_matches(['-', '0', '.'])
                .chars()
                .filter(|c| c.is_ascii_digit())
                .count();
            assert!(digits <= 17, "{s}");
        }
    }

    #[test]
    fn render_quotes_and_counts() {
        let mut t = CsvTable::new("x", &["a [ns]", "b"]);
        t.push(vec![1.5.into(), "p,q".into()]);
        assert_eq!(t.render(), "a [ns],b\n1.5,\"p,q\"\n");
        assert_eq!(t.column("a [ns]"), Some(vec![1.5]));
    }
}
