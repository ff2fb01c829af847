use super::batch::{BatchResult, BoundCurve, Row};
use crate::error::{Error, Result};
use std::io::Write;
use std::path::Path;

pub const CSV_HEADER: [&str; 7] = ["t", "regret_mean", "regret_min", "regret_max", "bound", "m_t_mean", "collisions_mean"];

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let kind = e.kind();
    let source = match kind {
        csv::ErrorKind::Io(io) => std::io::Error::new(io.kind(), io.to_string()),
        _ => std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string()),
    };
    Error::Io { path: path.to_path_buf(), source }
}

/// Writes the aggregate as CSV.
pub fn write_csv<W: Write>(rows: &[Row], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.t.to_string(),
            r.regret_mean.to_string(),
            r.regret_min.to_string(),
            r.regret_max.to_string(),
            r.bound.to_string(),
            r.m_t_mean.to_string(),
            r.collisions_mean.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn create(path: &Path) -> Result<std::fs::File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(path))?;
    }
    std::fs::File::create(path).map_err(io_err(path))
}

pub fn emit_csv(result: &BatchResult, path: &Path) -> Result<()> {
    let f = create(path)?;
    write_csv(&result.rows, std::io::BufWriter::new(f)).map_err(|e| csv_err(path, e))
}

/// Reads a CSV written by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<Row>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let header: Vec<String> = r.headers().map_err(|e| csv_err(path, e))?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidData, format!("unexpected header {header:?}")),
        });
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let bad = |k: usize| Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidData, format!("bad value in column {}", CSV_HEADER[k])),
        };
        let f = |k: usize| rec[k].parse::<f64>().map_err(|_| bad(k));
        rows.push(Row {
            t: rec[0].parse().map_err(|_| bad(0))?,
            regret_mean: f(1)?,
            regret_min: f(2)?,
            regret_max: f(3)?,
            bound: f(4)?,
            m_t_mean: f(5)?,
            collisions_mean: f(6)?,
        });
    }
    Ok(rows)
}

/// Writes a bound curve as `t,bound`.
pub fn write_bound_csv<W: Write>(curve: &BoundCurve, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["t", "bound"])?;
    for (t, b) in curve.times.iter().zip(&curve.values) {
        w.write_record([t.to_string(), b.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_bound_csv(curve: &BoundCurve, path: &Path) -> Result<()> {
    let f = create(path)?;
    write_bound_csv(curve, std::io::BufWriter::new(f)).map_err(|e| csv_err(path, e))
}
