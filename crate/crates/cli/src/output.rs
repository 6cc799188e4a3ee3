use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use lpfz_core::KernelSpec;
use serde::Serialize;

use crate::config::RunConfig;

/// Shortest round-trip scientific notation, so equal inputs give equal bytes.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Consistent,
    Falsified,
}

#[derive(Serialize)]
pub struct Report<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub kernels: &'a [KernelSpec],
    pub status: Status,
    pub findings: &'a [String],
    pub result: serde_json::Value,
}

/// Files written into the output directory.
pub struct Artifacts {
    dir: PathBuf,
}

impl Artifacts {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Artifacts { dir: dir.to_path_buf() })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
    }

    pub fn table(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("cannot write {}", path.display()))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush().with_context(|| format!("cannot write {}", path.display()))
    }

    /// Two-column `(x, y)` series for plotting.
    pub fn series(&self, name: &str, header: [&str; 2], points: &[(f64, f64)]) -> Result<()> {
        let rows: Vec<Vec<String>> = points.iter().map(|(x, y)| vec![num(*x), num(*y)]).collect();
        self.table(name, &header, &rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for x in [0.0, 1.0, -2.5, 3.453464128, 1e-300, 6.02e23, f64::MIN_POSITIVE] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(0.1), "1e-1");
        assert_eq!(num(1.5), "1.5e0");
    }
}
