use serde::{Deserialize, Serialize};

use super::field::SpectralField;
use crate::error::{Error, Result};
use rustfft::num_complex::Complex64;

/// Keeps the modes with `|k|_∞ ≤ cutoff`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GalerkinProjector {
    pub cutoff: usize,
}

impl GalerkinProjector {
    pub fn new(cutoff: usize) -> Self {
        GalerkinProjector { cutoff }
    }
}

fn truncate(f: &SpectralField, cutoff: u64) -> SpectralField {
    let g = f.grid();
    let mut out = f.clone();
    out.map_modes(|i| {
        if g.kmax(i) > cutoff {
            Complex64::default()
        } else {
            Complex64::new(1.0, 0.0)
        }
    });
    out
}

pub fn galerkin_project(f: &SpectralField, p: GalerkinProjector) -> Result<SpectralField> {
    let nyq = f.grid().n() / 2;
    if p.cutoff > nyq {
        return Err(Error::Config(format!(
            "cutoff {} exceeds the Nyquist limit {} of the grid",
            p.cutoff, nyq
        )));
    }
    Ok(truncate(f, p.cutoff as u64))
}

/// Zero every mode with `|k|_∞ > ⌊n/3⌋`.
pub fn dealias(f: &SpectralField) -> SpectralField {
    truncate(f, (f.grid().n() / 3) as u64)
}

/// Smallest power-of-two resolution `n > 3·cutoff` (and `n ≥ 4`), so that
/// quadratic products of fields with `|k|_∞ ≤ cutoff` are alias-free.
pub fn galerkin_grid_for(cutoff: usize) -> usize {
    (3 * cutoff + 1).next_power_of_two().max(4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;

    #[test]
    fn grid_sizes() {
        assert_eq!(galerkin_grid_for(8), 32);
        assert_eq!(galerkin_grid_for(16), 64);
        assert_eq!(galerkin_grid_for(32), 128);
        assert_eq!(galerkin_grid_for(64), 256);
        assert_eq!(galerkin_grid_for(341), 1024);
    }

    #[test]
    fn band_limited_is_fixed() {
        let g = TorusGrid::new(1, 16).unwrap();
        let raw = SpectralField::from_fn(g, 1, |x| vec![x[0].sin() + (3.0 * x[0]).cos()]);
        let f = galerkin_project(&raw, GalerkinProjector::new(3)).unwrap();
        assert_eq!(galerkin_project(&f, GalerkinProjector::new(3)).unwrap(), f);
        let p = galerkin_project(&f, GalerkinProjector::new(2)).unwrap();
        assert!(p.coeff(&[3], 0).unwrap().norm() == 0.0);
        assert!(galerkin_project(&f, GalerkinProjector::new(9)).is_err());
    }

    #[test]
    fn product_of_dealiased_modes_is_exact() {
        // cos(5x) * cos(4x) on n=16 (cutoff 5): 1/2 cos(x) + 1/2 cos(9x),
        // and the 9x part aliases to 7x, which lies outside the retained band.
        let g = TorusGrid::new(1, 16).unwrap();
        let a = SpectralField::from_fn(g, 1, |x| vec![(5.0 * x[0]).cos()]);
        let b = SpectralField::from_fn(g, 1, |x| vec![(4.0 * x[0]).cos()]);
        let (pa, pb) = (a.to_physical(), b.to_physical());
        let prod: Vec<f64> = pa[0].iter().zip(&pb[0]).map(|(x, y)| x * y).collect();
        let c = dealias(&SpectralField::from_physical(g, &[prod]).unwrap());
        for k in -5i64..=5 {
            let want = if k.abs() == 1 { 0.25 } else { 0.0 };
            let v = c.coeff(&[k], 0).unwrap();
            assert!((v.re - want).abs() < 1e-15 && v.im.abs() < 1e-15, "k={k}");
        }
    }
}
