//! On-disk formats.
//!
//! Snapshots are little-endian binary: the magic `SQGF`, `n` as `u32`, the
//! time as `f64`, then `n²` values of `f64` in row-major order (`x₁` fastest).
//! Diagnostics are CSV with one header row, flushed after every record.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::spectral::{Grid, RealField};

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"SQGF";

pub fn write_snapshot(path: &Path, time: f64, field: &RealField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_all(&(field.grid().n() as u32).to_le_bytes())?;
    w.write_all(&time.to_le_bytes())?;
    for v in field.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<(f64, RealField)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(Error::Config(format!("{} is not a snapshot file", path.display())));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let grid = Grid::new(u32::from_le_bytes(b4) as usize)?;
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let time = f64::from_le_bytes(b8);
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        r.read_exact(&mut b8)?;
        values.push(f64::from_le_bytes(b8));
    }
    if r.read(&mut b8)? != 0 {
        return Err(Error::Config(format!("{} has trailing bytes", path.display())));
    }
    Ok((time, RealField::new(grid, values)?))
}

/// Diagnostics CSV writer; every row reaches the file before `push` returns.
pub struct DiagnosticsWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl DiagnosticsWriter<File> {
    pub fn create(path: &Path) -> Result<Self> {
        Self::new(File::create(path)?)
    }
}

impl<W: Write> DiagnosticsWriter<W> {
    pub fn new(sink: W) -> Result<Self> {
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
        inner.write_record(DiagnosticsRecord::HEADER)?;
        inner.flush()?;
        Ok(Self { inner })
    }

    pub fn push(&mut self, rec: &DiagnosticsRecord) -> Result<()> {
        let row = [
            rec.time,
            rec.linf,
            rec.l2,
            rec.grad_linf,
            rec.blowup_integral,
            rec.moc_ratio,
            rec.total_dissipation,
        ]
        .map(format_value);
        self.inner.write_record(&row)?;
        self.inner.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> Result<W> {
        self.inner
            .into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }
}

/// Shortest round-trip representation.
fn format_value(v: f64) -> String {
    format!("{v:e}")
}

pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != DiagnosticsRecord::HEADER {
        return Err(Error::Config(format!("unexpected diagnostics header {header:?}")));
    }
    let mut out = Vec::new();
    for row in r.records() {
        let row = row?;
        let v: Vec<f64> = row
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| Error::Config(format!("bad value '{s}': {e}")))
            })
            .collect::<Result<_>>()?;
        if v.len() != 7 {
            return Err(Error::Config(format!("diagnostics row has {} columns", v.len())));
        }
        out.push(DiagnosticsRecord {
            time: v[0],
            linf: v[1],
            l2: v[2],
            grad_linf: v[3],
            blowup_integral: v[4],
            moc_ratio: v[5],
            total_dissipation: v[6],
        });
    }
    Ok(out)
}
