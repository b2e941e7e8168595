//! Flat binary and CSV layouts for fields and kernels, norm series as CSV, and
//! field-series directories with a JSON-friendly manifest.
//!
//! Binary layout, little-endian: 4-byte magic (`JFKF` field, `JFKK` kernel),
//! scalar width in bytes (`u8`, 4 or 8), `d` (`u32`), `L` (`f64`), `N` (`u64`),
//! then `N^d` values of the stated width in row-major order.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Field, Grid, SignedKernel};
use crate::scalar::Scalar;
use crate::series::{FieldSeries, NormRecord};

const FIELD_MAGIC: &[u8; 4] = b"JFKF";
const KERNEL_MAGIC: &[u8; 4] = b"JFKK";

fn width<T>() -> u8 {
    std::mem::size_of::<T>() as u8
}

fn write_binary<T: Scalar, W: Write>(out: &mut W, magic: &[u8; 4], grid: &Grid<T>, values: &[T]) -> Result<()> {
    out.write_all(magic)?;
    out.write_all(&[width::<T>()])?;
    out.write_all(&(grid.dim() as u32).to_le_bytes())?;
    out.write_all(&grid.extent().as_f64().to_le_bytes())?;
    out.write_all(&(grid.points() as u64).to_le_bytes())?;
    for v in values {
        match width::<T>() {
            4 => out.write_all(&(v.as_f64() as f32).to_le_bytes())?,
            _ => out.write_all(&v.as_f64().to_le_bytes())?,
        }
    }
    Ok(())
}

fn read_exact<R: Read, const K: usize>(input: &mut R) -> Result<[u8; K]> {
    let mut buf = [0u8; K];
    input
        .read_exact(&mut buf)
        .map_err(|e| Error::Format(format!("truncated input: {e}")))?;
    Ok(buf)
}

fn read_binary<T: Scalar, R: Read>(input: &mut R, magic: &[u8; 4]) -> Result<(Grid<T>, Vec<T>)> {
    let found: [u8; 4] = read_exact(input)?;
    if &found != magic {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&found),
            String::from_utf8_lossy(magic)
        )));
    }
    let [w] = read_exact::<_, 1>(input)?;
    if w != 4 && w != 8 {
        return Err(Error::Format(format!("unsupported scalar width {w}")));
    }
    if w > width::<T>() {
        return Err(Error::Format(format!(
            "file holds {w}-byte scalars, cannot read them losslessly into {} bytes",
            width::<T>()
        )));
    }
    let dim = u32::from_le_bytes(read_exact(input)?) as usize;
    let extent = f64::from_le_bytes(read_exact(input)?);
    let points = u64::from_le_bytes(read_exact(input)?) as usize;
    let grid = Grid::new(dim, T::of(extent), points)?;
    let values = (0..grid.len())
        .map(|_| {
            Ok(match w {
                4 => T::of(f32::from_le_bytes(read_exact(input)?) as f64),
                _ => T::of(f64::from_le_bytes(read_exact(input)?)),
            })
        })
        .collect::<Result<Vec<T>>>()?;
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after values".into()));
    }
    Ok((grid, values))
}

pub fn write_field_binary<T: Scalar, W: Write>(out: &mut W, field: &Field<T>) -> Result<()> {
    write_binary(out, FIELD_MAGIC, field.grid(), field.values())
}

pub fn read_field_binary<T: Scalar, R: Read>(input: &mut R) -> Result<Field<T>> {
    let (grid, values) = read_binary(input, FIELD_MAGIC)?;
    Field::new(&grid, values)
}

pub fn write_kernel_binary<T: Scalar, W: Write>(out: &mut W, kernel: &SignedKernel<T>) -> Result<()> {
    write_binary(out, KERNEL_MAGIC, kernel.grid(), kernel.values())
}

pub fn read_kernel_binary<T: Scalar, R: Read>(input: &mut R) -> Result<SignedKernel<T>> {
    let (grid, values) = read_binary(input, KERNEL_MAGIC)?;
    SignedKernel::new(&grid, values)
}

/// `d,L,N` header line, the grid values, then one value per line.
pub fn write_values_csv<T: Scalar, W: Write>(out: &mut W, grid: &Grid<T>, values: &[T]) -> Result<()> {
    writeln!(out, "d,L,N")?;
    writeln!(out, "{},{},{}", grid.dim(), grid.extent(), grid.points())?;
    for v in values {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

pub fn read_values_csv<T: Scalar, R: Read>(input: R) -> Result<(Grid<T>, Vec<T>)> {
    let mut lines = BufReader::new(input).lines();
    let mut next = || -> Result<Option<String>> { lines.next().transpose().map_err(Error::from) };
    let bad = |what: &str| Error::Format(format!("csv: {what}"));
    if next()?.as_deref().map(str::trim) != Some("d,L,N") {
        return Err(bad("missing d,L,N header"));
    }
    let header = next()?.ok_or_else(|| bad("missing grid line"))?;
    let parts: Vec<&str> = header.trim().split(',').collect();
    if parts.len() != 3 {
        return Err(bad("grid line needs three entries"));
    }
    let dim: usize = parts[0].parse().map_err(|_| bad("bad d"))?;
    let extent: f64 = parts[1].parse().map_err(|_| bad("bad L"))?;
    let points: usize = parts[2].parse().map_err(|_| bad("bad N"))?;
    let grid = Grid::new(dim, T::of(extent), points)?;
    let mut values = Vec::with_capacity(grid.len());
    while let Some(line) = next()? {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| bad(&format!("bad value {line:?}")))?;
        values.push(T::of(v));
    }
    if values.len() != grid.len() {
        return Err(bad(&format!("{} values for {} sites", values.len(), grid.len())));
    }
    Ok((grid, values))
}

pub fn read_field_csv<T: Scalar, R: Read>(input: R) -> Result<Field<T>> {
    let (grid, values) = read_values_csv(input)?;
    Field::new(&grid, values)
}

/// Columns `t,sup_norm,mean`.
pub fn write_norms_csv<T: Scalar, W: Write>(out: &mut W, norms: &[NormRecord<T>]) -> Result<()> {
    writeln!(out, "t,sup_norm,mean")?;
    for r in norms {
        writeln!(out, "{},{},{}", r.t, r.sup_norm, r.mean)?;
    }
    Ok(())
}

/// Index of a stored field series: snapshot files and their times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesManifest {
    pub dim: usize,
    pub extent: f64,
    pub points: usize,
    pub dt: f64,
    pub times: Vec<f64>,
    pub files: Vec<String>,
}

/// Writes `field_00000.bin`, ... into `dir` (created if needed) and returns the manifest.
/// The caller decides where to serialize the manifest.
pub fn write_series_dir<T: Scalar>(dir: &Path, series: &FieldSeries<T>) -> Result<SeriesManifest> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(series.len());
    for (k, f) in series.fields().iter().enumerate() {
        let name = format!("field_{k:05}.bin");
        let mut out = std::io::BufWriter::new(fs::File::create(dir.join(&name))?);
        write_field_binary(&mut out, f)?;
        out.flush()?;
        files.push(name);
    }
    let grid = series.grid();
    Ok(SeriesManifest {
        dim: grid.dim(),
        extent: grid.extent().as_f64(),
        points: grid.points(),
        dt: series.dt().as_f64(),
        times: series.times().iter().map(|t| t.as_f64()).collect(),
        files,
    })
}

/// Reads back the snapshots named in a manifest.
pub fn read_series_dir<T: Scalar>(dir: &Path, manifest: &SeriesManifest) -> Result<FieldSeries<T>> {
    let fields = manifest
        .files
        .iter()
        .map(|name| {
            let path: PathBuf = dir.join(name);
            let mut input = BufReader::new(fs::File::open(&path)?);
            read_field_binary(&mut input)
        })
        .collect::<Result<Vec<_>>>()?;
    FieldSeries::new(T::of(manifest.dt), fields)
}
