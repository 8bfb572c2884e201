use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid on `[0, 2π)^dim` with `n` points (and modes) per axis.
///
/// Linear indices are row-major with axis 0 varying slowest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusGrid {
    dim: usize,
    n: usize,
}

impl TorusGrid {
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Config(format!("dim must be 1, 2 or 3, got {dim}")));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::Config(format!(
                "n_per_axis must be a power of two and at least 4, got {n}"
            )));
        }
        Ok(TorusGrid { dim, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of modes, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Signed wavenumber of array index `i` along one axis. The Nyquist index
    /// maps to `-n/2`.
    #[inline]
    pub fn freq(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    #[inline]
    pub fn axis_indices(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        match self.dim {
            1 => [idx, 0, 0],
            2 => [idx / n, idx % n, 0],
            _ => [idx / (n * n), (idx / n) % n, idx % n],
        }
    }

    #[inline]
    pub fn index_of(&self, ax: [usize; 3]) -> usize {
        let n = self.n;
        match self.dim {
            1 => ax[0],
            2 => ax[0] * n + ax[1],
            _ => (ax[0] * n + ax[1]) * n + ax[2],
        }
    }

    /// Wavevector of linear index `idx`; unused axes are zero.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [i64; 3] {
        let ax = self.axis_indices(idx);
        let mut k = [0i64; 3];
        for a in 0..self.dim {
            k[a] = self.freq(ax[a]);
        }
        k
    }

    /// Linear index holding wavevector `k`, if it is representable.
    pub fn index_of_wavevector(&self, k: &[i64]) -> Option<usize> {
        if k.len() != self.dim {
            return None;
        }
        let half = (self.n / 2) as i64;
        let mut ax = [0usize; 3];
        for a in 0..self.dim {
            if k[a] < -half || k[a] >= half {
                // +n/2 is stored at the Nyquist index as well
                if k[a] != half {
                    return None;
                }
            }
            ax[a] = k[a].rem_euclid(self.n as i64) as usize;
        }
        Some(self.index_of(ax))
    }

    /// Index of `-k` for the mode at `idx`.
    #[inline]
    pub fn neg_index(&self, idx: usize) -> usize {
        let ax = self.axis_indices(idx);
        let mut out = [0usize; 3];
        for a in 0..self.dim {
            out[a] = (self.n - ax[a]) % self.n;
        }
        self.index_of(out)
    }

    #[inline]
    pub fn ksq(&self, idx: usize) -> f64 {
        let k = self.wavevector(idx);
        (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64
    }

    /// `|k|_∞` of the mode at `idx`.
    #[inline]
    pub fn kmax(&self, idx: usize) -> u64 {
        let k = self.wavevector(idx);
        k.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0)
    }

    /// True if the index sits on a Nyquist plane of some axis.
    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let ax = self.axis_indices(idx);
        (0..self.dim).any(|a| ax[a] == self.n / 2)
    }

    /// Physical coordinates of grid point `idx`.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let ax = self.axis_indices(idx);
        let h = std::f64::consts::TAU / self.n as f64;
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = h * ax[a] as f64;
        }
        x
    }

    /// Sobolev weights `(1+|k|²)^s`, cached per thread.
    pub fn weights(&self, s: f64) -> Arc<Vec<f64>> {
        thread_local! {
            static CACHE: RefCell<HashMap<(usize, usize, u64), Arc<Vec<f64>>>> =
                RefCell::new(HashMap::new());
        }
        CACHE.with(|c| {
            let mut c = c.borrow_mut();
            c.entry((self.dim, self.n, s.to_bits()))
                .or_insert_with(|| {
                    Arc::new(
                        (0..self.len())
                            .map(|i| {
                                if s == 0.0 {
                                    1.0
                                } else {
                                    (1.0 + self.ksq(i)).powf(s)
                                }
                            })
                            .collect(),
                    )
                })
                .clone()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(TorusGrid::new(0, 8).is_err());
        assert!(TorusGrid::new(4, 8).is_err());
        assert!(TorusGrid::new(1, 2).is_err());
        assert!(TorusGrid::new(1, 12).is_err());
        assert_eq!(TorusGrid::new(3, 8).unwrap().len(), 512);
    }

    #[test]
    fn wavevector_roundtrip() {
        let g = TorusGrid::new(2, 8).unwrap();
        for idx in 0..g.len() {
            let k = g.wavevector(idx);
            assert_eq!(g.index_of_wavevector(&k[..2]), Some(idx));
            let nk = g.wavevector(g.neg_index(idx));
            for a in 0..2 {
                if !g.is_nyquist(idx) {
                    assert_eq!(nk[a], -k[a]);
                }
            }
        }
        assert_eq!(g.index_of_wavevector(&[4, 0]), g.index_of_wavevector(&[-4, 0]));
        assert_eq!(g.index_of_wavevector(&[5, 0]), None);
    }
}
