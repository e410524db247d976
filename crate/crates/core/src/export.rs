//! CSV and JSON writers for surfaces and experiment reports.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::ambiguity::AmbiguitySurface;
use crate::error::{Error, Result};

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

#[derive(Serialize)]
struct SurfaceRow {
    k: usize,
    l: usize,
    mag: f64,
    phase: f64,
}

/// `k,l,mag,phase`, row-major in `k` then `l`, phase in radians.
pub fn write_surface_csv(path: &Path, surface: &AmbiguitySurface) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    for ((k, l), v) in surface.iter() {
        w.serialize(SurfaceRow { k, l, mag: v.norm(), phase: v.arg() }).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// One header row from the record field names, then one row per record.
pub fn write_records_csv<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value).map_err(|e| Error::Config(format!("json: {e}")))?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}
