//! Portable dump formats: 8-bit PGM images and flat binary f64 fields with a
//! 24-byte header (magic `SCBM`, nx and ny as little-endian u32, 4 reserved
//! bytes, grid spacing h as little-endian f64).

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::{BitMask, Grid, GridDomain};
use crate::scalar::Real;

pub const FIELD_MAGIC: &[u8; 4] = b"SCBM";

/// Writes an inside mask as binary PGM (P5): 0 outside, 255 inside.
pub fn write_mask_pgm<T: Real>(path: &Path, d: &GridDomain<T>) -> Result<()> {
    let (nx, ny) = (d.grid.nx, d.grid.ny);
    let mut bytes = vec![0u8; nx * ny];
    for (i, j) in d.inside.iter_set() {
        // PGM rows go top to bottom; flip so +y points up in the image
        bytes[(ny - 1 - j) * nx + i] = 255;
    }
    write_pgm(path, nx, ny, &bytes)
}

/// Writes a scalar field as PGM, linearly rescaled to 0..=255.
pub fn write_field_pgm<T: Real>(path: &Path, f: &ScalarField<T>) -> Result<()> {
    let (nx, ny) = (f.grid.nx, f.grid.ny);
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for &v in &f.data {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let span = if hi > lo { hi - lo } else { T::one() };
    let mut bytes = vec![0u8; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let v = (f.data[f.grid.idx(i, j)] - lo) / span * T::of(255.0);
            bytes[(ny - 1 - j) * nx + i] = v.round().as_f64().clamp(0.0, 255.0) as u8;
        }
    }
    write_pgm(path, nx, ny, &bytes)
}

fn write_pgm(path: &Path, nx: usize, ny: usize, bytes: &[u8]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{nx} {ny}\n255\n")?;
    w.write_all(bytes)?;
    Ok(())
}

fn write_header<W: Write, T: Real>(w: &mut W, grid: &Grid<T>) -> Result<()> {
    w.write_all(FIELD_MAGIC)?;
    w.write_all(&(grid.nx as u32).to_le_bytes())?;
    w.write_all(&(grid.ny as u32).to_le_bytes())?;
    w.write_all(&[0u8; 4])?;
    w.write_all(&grid.h.as_f64().to_le_bytes())?;
    Ok(())
}

/// Writes a scalar field in the flat binary format (row-major f64 samples).
pub fn write_field_bin<T: Real>(path: &Path, f: &ScalarField<T>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_header(&mut w, &f.grid)?;
    for &v in &f.data {
        w.write_all(&v.as_f64().to_le_bytes())?;
    }
    Ok(())
}

/// Writes a per-cell 2-vector map (two interleaved f64 per cell) with the
/// same binary header.
pub fn write_vec2_bin<T: Real>(path: &Path, grid: &Grid<T>, data: &[[T; 2]]) -> Result<()> {
    assert_eq!(data.len(), grid.len());
    let mut w = BufWriter::new(File::create(path)?);
    write_header(&mut w, grid)?;
    for v in data {
        w.write_all(&v[0].as_f64().to_le_bytes())?;
        w.write_all(&v[1].as_f64().to_le_bytes())?;
    }
    Ok(())
}

/// Reads a flat binary field back; returns `(nx, ny, h, samples)`.
pub fn read_field_bin(path: &Path) -> Result<(usize, usize, f64, Vec<f64>)> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 24 || &bytes[0..4] != FIELD_MAGIC {
        return Err(Error::InvalidParameter("not a field dump (bad header)".into()));
    }
    let nx = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let ny = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let h = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
    let want = 24 + nx * ny * 8;
    if bytes.len() != want {
        return Err(Error::InvalidParameter(format!(
            "field dump truncated: {} bytes, expected {want}",
            bytes.len()
        )));
    }
    let data = bytes[24..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((nx, ny, h, data))
}

/// Writes a mask as PGM from a raw bitmask (used by intermediate dumps).
pub fn write_bitmask_pgm(path: &Path, mask: &BitMask) -> Result<()> {
    let (nx, ny) = (mask.nx(), mask.ny());
    let mut bytes = vec![0u8; nx * ny];
    for (i, j) in mask.iter_set() {
        bytes[(ny - 1 - j) * nx + i] = 255;
    }
    write_pgm(path, nx, ny, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_roundtrip() {
        let dir = std::env::temp_dir().join("bmeig_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("f.bin");
        let g = Grid::new([0.0, 0.0], 0.25, 3, 2).unwrap();
        let f = ScalarField::from_fn(g, |p| p[0] + 10.0 * p[1]);
        write_field_bin(&path, &f).unwrap();
        let (nx, ny, h, data) = read_field_bin(&path).unwrap();
        assert_eq!((nx, ny), (3, 2));
        assert_eq!(h, 0.25);
        assert_eq!(data, f.data);
        // header is exactly 24 bytes
        let len = std::fs::metadata(&path).unwrap().len();
        assert_eq!(len, 24 + 6 * 8);
    }

    #[test]
    fn pgm_header() {
        let dir = std::env::temp_dir().join("bmeig_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("m.pgm");
        let g = Grid::new([0.0, 0.0], 1.0, 4, 3).unwrap();
        let f = ScalarField::from_fn(g, |p| p[0]);
        write_field_pgm(&path, &f).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"P5\n4 3\n255\n"));
        assert_eq!(bytes.len(), b"P5\n4 3\n255\n".len() + 12);
    }
}
