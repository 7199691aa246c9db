//! JSON and CSV emission with atomic file replacement.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::config::Format;
use crate::run::RunReport;

/// CSV header, in column order.
pub const CSV_COLUMNS: [&str; 6] = ["analysis", "epsilon", "n", "count", "density", "density_approx"];

/// Exceedance profiles as CSV. `density` is the exact `count/base`,
/// `density_approx` its decimal value.
pub fn render_csv(report: &RunReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for row in report.rows() {
        let approx = if row.base == 0 {
            0.0
        } else {
            row.count as f64 / row.base as f64
        };
        w.write_record([
            row.analysis.clone(),
            row.epsilon.to_string(),
            row.n.to_string(),
            row.count.to_string(),
            format!("{}/{}", row.count, row.base),
            approx.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Writes `<stem>.json` and/or `<stem>.csv` under `dir`.
pub fn write_outputs(
    report: &RunReport,
    dir: &Path,
    stem: &str,
    format: Format,
    canonical: bool,
) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if format.json() {
        let path = dir.join(format!("{stem}.json"));
        write_atomic(&path, report.to_json(canonical).as_bytes())?;
        written.push(path);
    }
    if format.csv() {
        let path = dir.join(format!("{stem}.csv"));
        write_atomic(&path, render_csv(report).as_bytes())?;
        written.push(path);
    }
    Ok(written)
}
