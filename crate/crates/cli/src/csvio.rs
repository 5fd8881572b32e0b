//! Minimal CSV helpers: vectors as one value per line, tables with a header
//! row. Numeric formatting is fixed so identical inputs produce identical
//! bytes.

use crate::error::{CliError, Result};
use std::io::Write;
use std::path::Path;

pub fn format_value(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        "fail".to_string()
    } else {
        format!("{v:.12e}")
    }
}

pub fn write_vector(path: &Path, values: &[f64]) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    for v in values {
        writeln!(f, "{}", format_value(*v))?;
    }
    Ok(())
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Config(format!("bad number {l:?}: {e}")))
        })
        .collect()
}

/// Table with a header row.
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: vec![] }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_string(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_string())?;
        Ok(())
    }
}

/// Reads a samples × flattened-features table (no header) together with a
/// JSON sidecar `{"mode_sizes": […], "targets": optional}` describing how
/// each row folds.
pub fn read_dataset(path: &Path) -> Result<(Vec<Vec<f64>>, Vec<usize>, Option<Vec<f64>>)> {
    let text = std::fs::read_to_string(path)?;
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<f64>()
                        .map_err(|e| CliError::Config(format!("bad number {tok:?}: {e}")))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let sidecar_path = path.with_extension("json");
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&sidecar_path).map_err(|e| {
            CliError::Config(format!(
                "missing dataset sidecar {}: {e}",
                sidecar_path.display()
            ))
        })?)?;
    let mode_sizes: Vec<usize> = sidecar
        .get("mode_sizes")
        .and_then(|v| v.as_array())
        .ok_or_else(|| CliError::Config("sidecar lacks mode_sizes".into()))?
        .iter()
        .map(|v| v.as_u64().unwrap_or(0) as usize)
        .collect();
    let targets = sidecar.get("targets").and_then(|v| v.as_array()).map(|arr| {
        arr.iter().map(|v| v.as_f64().unwrap_or(f64::NAN)).collect::<Vec<f64>>()
    });
    Ok((rows, mode_sizes, targets))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_roundtrip() {
        let dir = std::env::temp_dir().join("ttkit_csv_test");
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("v.csv");
        let v = vec![1.5, -2.25e-3, 0.0];
        write_vector(&p, &v).unwrap();
        let back = read_vector(&p).unwrap();
        assert_eq!(v, back);
    }
}
