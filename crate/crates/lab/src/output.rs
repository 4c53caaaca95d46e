//! CSV writers. Column order is fixed by the row structs; see the README
//! for the schemas.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::experiments::{LdosReport, SweepRow};

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

/// Writes `rows` to `dir/name`, creating `dir` if needed.
pub fn write_csv<T: Serialize>(dir: &Path, name: &str, rows: &[T]) -> Result<PathBuf, OutputError> {
    fs::create_dir_all(dir).map_err(|source| OutputError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(name);
    let csv_err = |source| OutputError::Csv {
        path: path.clone(),
        source,
    };
    let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|source| OutputError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

#[derive(Debug, Serialize)]
struct TimingRow {
    n: usize,
    chi: f64,
    seconds: f64,
}

/// Wall-clock seconds per sweep point. Kept apart from the results so those
/// stay byte-identical between runs.
pub fn write_timing(dir: &Path, name: &str, rows: &[SweepRow]) -> Result<PathBuf, OutputError> {
    let timing: Vec<TimingRow> = rows
        .iter()
        .map(|r| TimingRow {
            n: r.n,
            chi: r.chi,
            seconds: r.seconds,
        })
        .collect();
    write_csv(dir, name, &timing)
}

#[derive(Debug, Serialize)]
struct HistogramRow {
    omega_bin_center: f64,
    density: f64,
    fit_density: f64,
}

pub fn write_histogram(
    dir: &Path,
    name: &str,
    report: &LdosReport,
) -> Result<PathBuf, OutputError> {
    let rows: Vec<HistogramRow> = report
        .histogram
        .centers
        .iter()
        .zip(&report.histogram.density)
        .zip(&report.fit_density)
        .map(|((&c, &d), &f)| HistogramRow {
            omega_bin_center: c,
            density: d,
            fit_density: f,
        })
        .collect();
    write_csv(dir, name, &rows)
}
