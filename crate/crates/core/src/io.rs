//! Binary field files (`.sfld`).
//!
//! Fixed little-endian layout, version 1:
//!
//! ```text
//! magic   6 bytes  b"SFLD1\0"
//! n       u8       spatial dimension (1..=3)
//! rank    u8       0 scalar, 1 vector, 2 matrix
//! N       u32      points per axis
//! L       f64      torus period
//! dtype   u8       0 = f64 physical samples, 1 = complex128 coefficients
//! payload          row-major lattice, components outermost
//! ```
//!
//! Spectral payloads (`dtype = 1`) round-trip coefficients bit-for-bit.
//! Physical payloads (`dtype = 0`) store real samples; reading one performs
//! the forward transform.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Rank, SpectralField};
use crate::grid::Grid;

const MAGIC: &[u8; 6] = b"SFLD1\0";

/// Payload encoding selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Payload {
    /// Real physical samples (`f64`).
    Physical,
    /// Complex spectral coefficients (`complex128`), exact round-trip.
    Spectral,
}

/// Write a field to `path`.
pub fn write_field(f: &SpectralField, path: &Path, payload: Payload) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let grid = f.grid();
    w.write_all(MAGIC)?;
    w.write_u8(grid.dim() as u8)?;
    w.write_u8(f.rank().code())?;
    w.write_u32::<LittleEndian>(grid.points_per_axis() as u32)?;
    w.write_f64::<LittleEndian>(grid.period())?;
    match payload {
        Payload::Physical => {
            w.write_u8(0)?;
            for v in f.to_real_samples() {
                w.write_f64::<LittleEndian>(v)?;
            }
        }
        Payload::Spectral => {
            w.write_u8(1)?;
            for v in f.raw() {
                w.write_f64::<LittleEndian>(v.re)?;
                w.write_f64::<LittleEndian>(v.im)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Read a field from `path`.
pub fn read_field(path: &Path) -> Result<SpectralField> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic).map_err(|_| Error::FieldFile("truncated header".into()))?;
    if &magic != MAGIC {
        return Err(Error::FieldFile("bad magic".into()));
    }
    let n = r.read_u8()? as usize;
    let rank_code = r.read_u8()?;
    let n_points = r.read_u32::<LittleEndian>()? as usize;
    let length = r.read_f64::<LittleEndian>()?;
    let dtype = r.read_u8()?;
    let rank = Rank::from_code(rank_code)
        .ok_or_else(|| Error::FieldFile(format!("unknown rank code {rank_code}")))?;
    let grid = Grid::new(n, n_points, length)
        .map_err(|e| Error::FieldFile(format!("header describes an unusable grid: {e}")))?;
    let comps = rank.components(n);
    let count = comps * grid.len();
    match dtype {
        0 => {
            let mut samples = vec![0.0f64; count];
            r.read_f64_into::<LittleEndian>(&mut samples)
                .map_err(|_| Error::FieldFile("truncated physical payload".into()))?;
            expect_eof(&mut r)?;
            SpectralField::from_real_samples(grid, rank, &samples)
        }
        1 => {
            let mut raw = vec![0.0f64; 2 * count];
            r.read_f64_into::<LittleEndian>(&mut raw)
                .map_err(|_| Error::FieldFile("truncated spectral payload".into()))?;
            expect_eof(&mut r)?;
            let data: Vec<Complex64> =
                raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
            Ok(SpectralField::from_raw(grid, rank, data))
        }
        other => Err(Error::FieldFile(format!("unknown dtype code {other}"))),
    }
}

/// Read a field and require it to live on `expected`; errors name the
/// mismatching header field.
pub fn read_field_on(path: &Path, expected: Grid) -> Result<SpectralField> {
    let f = read_field(path)?;
    let g = f.grid();
    if g != expected {
        return Err(Error::FieldFile(format!(
            "grid mismatch: file has n = {}, N = {}, L = {:.12}; expected n = {}, N = {}, L = {:.12}",
            g.dim(),
            g.points_per_axis(),
            g.period(),
            expected.dim(),
            expected.points_per_axis(),
            expected.period()
        )));
    }
    Ok(f)
}

fn expect_eof(r: &mut impl Read) -> Result<()> {
    let mut probe = [0u8; 1];
    match r.read(&mut probe)? {
        0 => Ok(()),
        _ => Err(Error::FieldFile("trailing bytes after payload".into())),
    }
}
