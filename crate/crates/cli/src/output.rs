//! CSV tables, `key = value` reports and gnuplot scripts.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::config::ExperimentConfig;

/// Column-oriented table written with shortest round-trip number formatting.
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Formats a value for a CSV cell. `f64` Display is the shortest round-trip form.
pub fn cell(v: impl Display) -> String {
    v.to_string()
}

/// Report file: the resolved config followed by `result.*` lines.
pub struct Report {
    config: String,
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self {
            config: config.to_text(),
            lines: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Display) {
        self.lines.push((format!("result.{key}"), value.to_string()));
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut s = self.config.clone();
        for (k, v) in &self.lines {
            s.push_str(&format!("{k} = {v}\n"));
        }
        fs::write(path, s).with_context(|| format!("writing {}", path.display()))
    }
}

/// Gnuplot script plotting columns of a CSV against its first column.
pub fn gnuplot(csv_name: &str, title: &str, xlabel: &str, series: &[(usize, &str)], logscale: &str) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str(&format!("set title '{title}'\nset xlabel '{xlabel}'\n"));
    if !logscale.is_empty() {
        s.push_str(&format!("set logscale {logscale}\n"));
    }
    let plots: Vec<String> = series
        .iter()
        .map(|(col, style)| format!("'{csv_name}' using 1:{col} with {style}"))
        .collect();
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    s
}

pub fn ensure_dir(dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    Ok(dir.to_path_buf())
}
