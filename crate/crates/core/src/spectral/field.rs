use rustfft::num_complex::Complex64;

use super::grid::TorusGrid;
use super::transform::{fft_forward, fft_inverse};
use crate::error::{Error, Result};

/// A real, possibly vector-valued field stored as a full Hermitian-symmetric
/// set of Fourier coefficients per component.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    comps: Vec<Vec<Complex64>>,
}

impl SpectralField {
    pub fn zeros(grid: TorusGrid, components: usize) -> Self {
        SpectralField {
            grid,
            comps: vec![vec![Complex64::default(); grid.len()]; components],
        }
    }

    pub fn from_coeffs(grid: TorusGrid, comps: Vec<Vec<Complex64>>) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::Shape("field needs at least one component".into()));
        }
        if comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::Shape(format!(
                "coefficient arrays must have length {}",
                grid.len()
            )));
        }
        Ok(SpectralField { grid, comps })
    }

    /// Build from physical samples, one vector of `n^dim` values per component.
    pub fn from_physical(grid: TorusGrid, values: &[Vec<f64>]) -> Result<Self> {
        if values.iter().any(|v| v.len() != grid.len()) || values.is_empty() {
            return Err(Error::Shape("physical arrays must match the grid".into()));
        }
        let comps = values.iter().map(|v| fft_forward(v, grid)).collect();
        let mut f = SpectralField { grid, comps };
        f.enforce_hermitian();
        Ok(f)
    }

    /// Sample a function of position on the grid. `f` returns one value per
    /// component.
    pub fn from_fn(grid: TorusGrid, components: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        let mut vals = vec![vec![0.0; grid.len()]; components];
        for idx in 0..grid.len() {
            let p = grid.point(idx);
            let v = f(&p[..grid.dim()]);
            for (c, x) in v.into_iter().take(components).enumerate() {
                vals[c][idx] = x;
            }
        }
        SpectralField::from_physical(grid, &vals).expect("shape is consistent by construction")
    }

    pub fn to_physical(&self) -> Vec<Vec<f64>> {
        self.comps.iter().map(|c| fft_inverse(c, self.grid)).collect()
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn components(&self) -> usize {
        self.comps.len()
    }

    pub fn comp(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.comps[c]
    }

    pub fn comps(&self) -> &[Vec<Complex64>] {
        &self.comps
    }

    /// Coefficient of wavevector `k` in component `c`.
    pub fn coeff(&self, k: &[i64], c: usize) -> Option<Complex64> {
        self.grid.index_of_wavevector(k).map(|i| self.comps[c][i])
    }

    pub fn set_coeff(&mut self, k: &[i64], c: usize, v: Complex64) -> Result<()> {
        let i = self
            .grid
            .index_of_wavevector(k)
            .ok_or_else(|| Error::Shape(format!("wavevector {k:?} not on grid")))?;
        self.comps[c][i] = v;
        Ok(())
    }

    /// Extract one component as a scalar field.
    pub fn component_field(&self, c: usize) -> SpectralField {
        SpectralField {
            grid: self.grid,
            comps: vec![self.comps[c].clone()],
        }
    }

    /// Stack scalar or vector fields on the same grid into one field.
    pub fn stack(parts: &[&SpectralField]) -> Result<Self> {
        let grid = parts
            .first()
            .ok_or_else(|| Error::Shape("nothing to stack".into()))?
            .grid;
        let mut comps = Vec::new();
        for p in parts {
            if p.grid != grid {
                return Err(Error::Shape("grid mismatch in stack".into()));
            }
            comps.extend(p.comps.iter().cloned());
        }
        Ok(SpectralField { grid, comps })
    }

    pub fn same_shape(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid || self.comps.len() != other.comps.len() {
            return Err(Error::Shape(format!(
                "fields differ: {:?}x{} vs {:?}x{}",
                self.grid,
                self.comps.len(),
                other.grid,
                other.comps.len()
            )));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
    }

    pub fn is_zero(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|v| v.re == 0.0 && v.im == 0.0))
    }

    pub fn scaled(&self, a: f64) -> SpectralField {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    pub fn scale(&mut self, a: f64) {
        for c in self.comps.iter_mut() {
            for v in c.iter_mut() {
                *v *= a;
            }
        }
    }

    /// `self += a * other`. Shapes must agree.
    pub fn axpy(&mut self, a: f64, other: &SpectralField) {
        debug_assert!(self.same_shape(other).is_ok());
        for (c, o) in self.comps.iter_mut().zip(&other.comps) {
            for (v, w) in c.iter_mut().zip(o) {
                *v += *w * a;
            }
        }
    }

    pub fn add(&self, other: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Apply a per-mode multiplier `m(idx)` to every component.
    pub fn map_modes(&mut self, m: impl Fn(usize) -> Complex64) {
        for c in self.comps.iter_mut() {
            for (i, v) in c.iter_mut().enumerate() {
                *v *= m(i);
            }
        }
    }

    /// Spectral derivative along `axis`. The Nyquist mode is dropped since
    /// its odd derivative is not real.
    pub fn derivative(&self, axis: usize) -> SpectralField {
        let g = self.grid;
        let mut out = self.clone();
        out.map_modes(|i| {
            let ax = g.axis_indices(i);
            if ax[axis] == g.n() / 2 {
                Complex64::default()
            } else {
                Complex64::new(0.0, g.wavevector(i)[axis] as f64)
            }
        });
        out
    }

    pub fn laplacian(&self) -> SpectralField {
        let g = self.grid;
        let mut out = self.clone();
        out.map_modes(|i| Complex64::new(-g.ksq(i), 0.0));
        out
    }

    /// Mean value of component `c` (the `k = 0` coefficient).
    pub fn mean(&self, c: usize) -> f64 {
        self.comps[c][0].re
    }

    /// Replace `c[k]` by `(c[k] + conj(c[-k]))/2` so the field is exactly real.
    pub fn enforce_hermitian(&mut self) {
        let g = self.grid;
        for c in self.comps.iter_mut() {
            for i in 0..g.len() {
                let j = g.neg_index(i);
                if j < i {
                    continue;
                }
                if j == i {
                    c[i].im = 0.0;
                    continue;
                }
                let avg = (c[i] + c[j].conj()) * 0.5;
                c[i] = avg;
                c[j] = avg.conj();
            }
        }
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        let g = self.grid;
        let mut worst: f64 = 0.0;
        for c in &self.comps {
            for i in 0..g.len() {
                let j = g.neg_index(i);
                worst = worst.max((c[i] - c[j].conj()).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_coefficients() {
        let g = TorusGrid::new(1, 16).unwrap();
        let f = SpectralField::from_fn(g, 1, |x| vec![x[0].sin()]);
        let c1 = f.coeff(&[1], 0).unwrap();
        let cm1 = f.coeff(&[-1], 0).unwrap();
        assert!((c1 - Complex64::new(0.0, -0.5)).norm() < 1e-15);
        assert!((cm1 - Complex64::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn derivative_of_sin() {
        let g = TorusGrid::new(2, 16).unwrap();
        let f = SpectralField::from_fn(g, 1, |x| vec![(x[0] + 3.0 * x[1]).sin()]);
        let dy = f.derivative(1).to_physical();
        for idx in 0..g.len() {
            let p = g.point(idx);
            assert!((dy[0][idx] - 3.0 * (p[0] + 3.0 * p[1]).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn hermitian_projection_is_real_part() {
        let g = TorusGrid::new(1, 8).unwrap();
        let mut f = SpectralField::zeros(g, 1);
        f.set_coeff(&[2], 0, Complex64::new(1.0, 1.0)).unwrap();
        f.enforce_hermitian();
        assert_eq!(f.coeff(&[-2], 0).unwrap(), Complex64::new(0.5, -0.5));
        assert_eq!(f.hermitian_defect(), 0.0);
    }
}
