//! File formats. Numbers are written as `{:.16e}`, which parses back to
//! the same `f64`. Files appear atomically: each is written to a temporary
//! file in the target directory and renamed into place.

use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::SimError;

pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn atomic<F>(path: &Path, body: F) -> Result<(), SimError>
where
    F: FnOnce(&mut BufWriter<&mut tempfile::NamedTempFile>) -> std::io::Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e| SimError::io(path, e);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    {
        let mut w = BufWriter::new(&mut tmp);
        body(&mut w).map_err(io)?;
        w.flush().map_err(io)?;
    }
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Writes a numeric table under `header`.
pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<(), SimError>
where
    I: IntoIterator,
    I::Item: AsRef<[f64]>,
{
    atomic(path, |w| {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(header)?;
        for row in rows {
            out.write_record(row.as_ref().iter().map(|&v| format_f64(v)))?;
        }
        out.flush()
    })
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), SimError> {
    atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        w.write_all(b"\n")
    })
}

/// Header and rows of a numeric CSV table.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), SimError> {
    let bad = |e: &dyn std::fmt::Display| SimError::Config(format!("{}: {e}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| bad(&e))?;
    let header = rdr.headers().map_err(|e| bad(&e))?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(&e))?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| bad(&e)))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

pub fn ensure_dir(dir: &Path) -> Result<PathBuf, SimError> {
    std::fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))?;
    Ok(dir.to_path_buf())
}
