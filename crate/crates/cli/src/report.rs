use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// One rate fit: exponent, goodness of fit and the sweep it came from.
#[derive(Debug, Clone, Serialize)]
pub struct RateFit {
    pub name: String,
    pub exponent: f64,
    pub r2: f64,
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub kind: String,
    pub profile: String,
    pub seed: u64,
    #[serde(skip)]
    pub header: Vec<String>,
    #[serde(skip)]
    pub rows: Vec<Vec<String>>,
    pub fits: Vec<RateFit>,
    pub checks: Vec<Check>,
    pub summary: serde_json::Map<String, serde_json::Value>,
    pub pass: bool,
}

impl Report {
    pub fn new(kind: &str, header: &[&str]) -> Self {
        Self {
            kind: kind.to_string(),
            profile: String::new(),
            seed: 0,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            fits: Vec::new(),
            checks: Vec::new(),
            summary: serde_json::Map::new(),
            pass: true,
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: String) {
        self.pass &= pass;
        self.checks.push(Check { name: name.into(), pass, detail });
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(key.into(), serde_json::to_value(value).unwrap_or(serde_json::Value::Null));
    }

    /// Writes `<base>.csv` and `<base>.json` under `dir`.
    pub fn write(&self, dir: &Path, base: &str) -> Result<(PathBuf, PathBuf), CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(e.to_string()))?;
        let csv_path = dir.join(format!("{base}.csv"));
        let json_path = dir.join(format!("{base}.json"));
        let mut w = csv::Writer::from_path(&csv_path).map_err(|e| CliError::Io(e.to_string()))?;
        w.write_record(&self.header).map_err(|e| CliError::Io(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))?;
        std::fs::write(&json_path, text + "\n").map_err(|e| CliError::Io(e.to_string()))?;
        Ok((csv_path, json_path))
    }
}

/// Shortest round-trip float formatting keeps the CSV byte-stable.
pub fn f(x: f64) -> String {
    format!("{x:e}")
}
