//! Field and report CSV files.
//!
//! Field files have the header `t,x,phi1,phi2,rho,u,lambda1,lambda2` and one
//! row per node, time outermost. Floats are written with 17 significant
//! digits, so reading a file back reproduces every value bit for bit and
//! identical inputs give byte-identical files.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::PeriodicField;
use crate::ibvp::{node_x, IbvpState};
use crate::model::{from_riemann, GasParams, Perturbation, SpeedModel};

pub const FIELD_HEADER: [&str; 8] = ["t", "x", "phi1", "phi2", "rho", "u", "lambda1", "lambda2"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRow {
    pub t: f64,
    pub x: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub rho: f64,
    pub u: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl FieldRow {
    /// Derived columns of `phi` at `(t, x)`. Refuses states that are not
    /// strictly subsonic.
    pub fn new(t: f64, x: f64, phi: Perturbation, p: &GasParams) -> Result<Self> {
        let s = from_riemann(phi.to_riemann(p), p)?;
        let (lambda1, lambda2) = SpeedModel::new(p).lambdas(phi);
        if !(lambda1 < 0.0 && lambda2 > 0.0) {
            return Err(Error::Regime(format!(
                "refusing to write a non-subsonic node at (t = {t}, x = {x}): lambda1 = {lambda1}, lambda2 = {lambda2}"
            )));
        }
        Ok(Self {
            t,
            x,
            phi1: phi.phi1,
            phi2: phi.phi2,
            rho: s.rho,
            u: s.u,
            lambda1,
            lambda2,
        })
    }

    fn values(&self) -> [f64; 8] {
        [self.t, self.x, self.phi1, self.phi2, self.rho, self.u, self.lambda1, self.lambda2]
    }
}

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let kind = match e.kind() {
        csv::ErrorKind::Io(io) => io.kind(),
        _ => std::io::ErrorKind::InvalidData,
    };
    io_err(path, std::io::Error::new(kind, e.to_string()))
}

/// Writes a table of floats with the given header.
pub fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(row.iter().map(|v| fmt_f64(*v))).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn field_rows(f: &PeriodicField, p: &GasParams) -> Result<Vec<FieldRow>> {
    let mut rows = Vec::with_capacity(f.nt() * f.nx());
    for j in 0..f.nt() {
        for k in 0..f.nx() {
            rows.push(FieldRow::new(f.t(j), f.x(k), f.at(j, k), p)?);
        }
    }
    Ok(rows)
}

pub fn snapshot_rows(snapshots: &[IbvpState], p: &GasParams) -> Result<Vec<FieldRow>> {
    let mut rows = Vec::new();
    for s in snapshots {
        let nx = s.nx();
        for (k, v) in s.values.iter().enumerate() {
            rows.push(FieldRow::new(s.t, node_x(k, nx, p.length), *v, p)?);
        }
    }
    Ok(rows)
}

pub fn write_rows(rows: &[FieldRow], path: &Path) -> Result<()> {
    write_table(path, &FIELD_HEADER, rows.iter().map(|r| r.values().to_vec()))
}

/// The periodic field on its grid, `t_j` for `j = 0..nt`.
pub fn write_field_csv(f: &PeriodicField, p: &GasParams, path: &Path) -> Result<()> {
    write_rows(&field_rows(f, p)?, path)
}

/// Snapshots of an upwind run, one block of rows per snapshot.
pub fn write_snapshots_csv(snapshots: &[IbvpState], p: &GasParams, path: &Path) -> Result<()> {
    write_rows(&snapshot_rows(snapshots, p)?, path)
}

pub fn read_field_csv(path: &Path) -> Result<Vec<FieldRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let header = r.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.iter().ne(FIELD_HEADER.iter().copied()) {
        return Err(io_err(
            path,
            std::io::Error::new(std::io::ErrorKind::InvalidData, format!("unexpected header {header:?}")),
        ));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let mut v = [0.0; 8];
        for (slot, field) in v.iter_mut().zip(rec.iter()) {
            *slot = field.parse().map_err(|_| {
                io_err(
                    path,
                    std::io::Error::new(std::io::ErrorKind::InvalidData, format!("bad number `{field}`")),
                )
            })?;
        }
        rows.push(FieldRow {
            t: v[0],
            x: v[1],
            phi1: v[2],
            phi2: v[3],
            rho: v[4],
            u: v[5],
            lambda1: v[6],
            lambda2: v[7],
        });
    }
    Ok(rows)
}

/// Writes plain text, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let mut f = File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| io_err(path, e))
}
