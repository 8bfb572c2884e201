//! Field snapshot format (all integers and floats little-endian):
//!
//! ```text
//! magic     8 bytes  "STSNAP01"
//! dim       u32
//! n         u32      modes per axis
//! ncomp     u32
//! coeffs    ncomp × n^dim × (re: f64, im: f64)
//! ```
//!
//! Coefficients are written component by component, each in row-major
//! wavevector-index order (axis 0 slowest, FFT ordering along every axis).

use std::path::Path;

use rustfft::num_complex::Complex64;

use super::field::SpectralField;
use super::grid::TorusGrid;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"STSNAP01";

pub fn snapshot_to_bytes(f: &SpectralField) -> Vec<u8> {
    let g = f.grid();
    let mut out = Vec::with_capacity(20 + 16 * g.len() * f.components());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(g.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(g.n() as u32).to_le_bytes());
    out.extend_from_slice(&(f.components() as u32).to_le_bytes());
    for c in f.comps() {
        for v in c {
            out.extend_from_slice(&v.re.to_le_bytes());
            out.extend_from_slice(&v.im.to_le_bytes());
        }
    }
    out
}

pub fn snapshot_from_bytes(bytes: &[u8]) -> Result<SpectralField> {
    if bytes.len() < 20 || &bytes[..8] != MAGIC {
        return Err(Error::Parse("not a field snapshot".into()));
    }
    let word = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
    let grid = TorusGrid::new(word(8), word(12))?;
    let ncomp = word(16);
    let body = &bytes[20..];
    if ncomp == 0 || body.len() != 16 * ncomp * grid.len() {
        return Err(Error::Parse(format!(
            "snapshot body has {} bytes, expected {}",
            body.len(),
            16 * ncomp * grid.len()
        )));
    }
    let vals: Vec<Complex64> = body
        .chunks_exact(16)
        .map(|ch| {
            Complex64::new(
                f64::from_le_bytes(ch[..8].try_into().unwrap()),
                f64::from_le_bytes(ch[8..].try_into().unwrap()),
            )
        })
        .collect();
    let comps = vals.chunks_exact(grid.len()).map(|c| c.to_vec()).collect();
    SpectralField::from_coeffs(grid, comps)
}

pub fn write_snapshot(path: &Path, f: &SpectralField) -> Result<()> {
    std::fs::write(path, snapshot_to_bytes(f)).map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<SpectralField> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    snapshot_from_bytes(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random_field;

    #[test]
    fn roundtrip_bit_exact() {
        let g = TorusGrid::new(3, 8).unwrap();
        let f = random_field(g, 3, 2.0, 1.3, 5);
        let back = snapshot_from_bytes(&snapshot_to_bytes(&f)).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_truncated() {
        let g = TorusGrid::new(1, 8).unwrap();
        let mut b = snapshot_to_bytes(&random_field(g, 1, 2.0, 1.0, 1));
        b.pop();
        assert!(snapshot_from_bytes(&b).is_err());
    }
}
