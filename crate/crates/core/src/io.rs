//! The `SPNS` field file format.
//!
//! Layout (all little-endian):
//! magic `b"SPNS"`, version `u32`, dimension `u32`, `d` axis sample counts
//! (`u32` each), box side `f64`, component count `u32`, then
//! `components * n^d` `f64` samples, row-major per component.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use std::io::{Read, Write};
use std::path::Path;

pub const MAGIC: &[u8; 4] = b"SPNS";
pub const VERSION: u32 = 1;

pub fn write_field<W: Write>(w: &mut W, f: &Field) -> Result<()> {
    let grid = f.grid();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    for _ in 0..grid.dim() {
        w.write_all(&(grid.samples_per_axis() as u32).to_le_bytes())?;
    }
    w.write_all(&grid.length().to_le_bytes())?;
    w.write_all(&(f.components() as u32).to_le_bytes())?;
    for v in f.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_field<R: Read>(r: &mut R) -> Result<Field> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}, expected SPNS")));
    }
    let version = read_u32(r)?;
    if version != VERSION {
        return Err(Error::Format(format!(
            "unsupported version {version}, expected {VERSION}"
        )));
    }
    let d = read_u32(r)? as usize;
    if !(1..=3).contains(&d) {
        return Err(Error::Format(format!("bad dimension {d}")));
    }
    let mut n = 0usize;
    for axis in 0..d {
        let na = read_u32(r)? as usize;
        if axis == 0 {
            n = na;
        } else if na != n {
            return Err(Error::Format(format!(
                "non-cubic grids are not supported: axis sizes {n} vs {na}"
            )));
        }
    }
    let length = read_f64(r)?;
    let components = read_u32(r)? as usize;
    if components == 0 || components > 3 {
        return Err(Error::Format(format!("bad component count {components}")));
    }
    let grid = Grid::new(d, n, length)?;
    let expected = components * grid.points();
    let mut values = Vec::with_capacity(expected);
    let mut buf = [0u8; 8];
    for _ in 0..expected {
        r.read_exact(&mut buf).map_err(|_| {
            Error::Format(format!("payload shorter than {expected} samples"))
        })?;
        values.push(f64::from_le_bytes(buf));
    }
    // Reject trailing bytes: payload length must match the header exactly.
    let mut extra = [0u8; 1];
    match r.read(&mut extra)? {
        0 => {}
        _ => {
            return Err(Error::Format(
                "payload longer than header declares".to_string(),
            ))
        }
    }
    Field::from_values(grid, components, values)
}

pub fn save_field(path: &Path, f: &Field) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_field(&mut file, f)
}

pub fn load_field(path: &Path) -> Result<Field> {
    let mut file = std::io::BufReader::new(std::fs::File::open(path)?);
    read_field(&mut file)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_field() -> Field {
        let g = Grid::new(2, 8, 2.0).unwrap();
        Field::vector_from_fn(g, |x| vec![x[0] + 2.0 * x[1], x[0] * x[1]])
    }

    #[test]
    fn roundtrip_preserves_bits() {
        let f = sample_field();
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        let g = read_field(&mut buf.as_slice()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let f = sample_field();
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        buf.truncate(buf.len() - 8);
        assert!(matches!(
            read_field(&mut buf.as_slice()),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn oversized_payload_is_rejected() {
        let f = sample_field();
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        buf.extend_from_slice(&1.0f64.to_le_bytes());
        assert!(matches!(
            read_field(&mut buf.as_slice()),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn bad_magic_is_rejected() {
        let mut buf = b"SPQR".to_vec();
        buf.extend_from_slice(&[0u8; 64]);
        assert!(matches!(
            read_field(&mut buf.as_slice()),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn non_finite_payload_is_rejected() {
        let f = sample_field();
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        let off = buf.len() - 8;
        buf[off..].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(read_field(&mut buf.as_slice()).is_err());
    }
}
