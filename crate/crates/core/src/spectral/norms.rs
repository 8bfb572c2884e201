use serde::{Deserialize, Serialize};

use super::field::SpectralField;
use crate::error::{Error, Result};

/// Rungs of the space ladder `𝒟 ⊂ 𝓕₁ ⊂ 𝓕₀ ⊂ 𝒢`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    G,
    F0,
    F1,
    D,
}

/// Sobolev exponents of the four spaces of a model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceLadder {
    pub s_g: f64,
    pub s_f0: f64,
    pub s_f1: f64,
    pub s_d: f64,
    #[serde(default = "one")]
    pub c_interp: f64,
}

fn one() -> f64 {
    1.0
}

impl SpaceLadder {
    pub fn new(s_g: f64, s_f0: f64, s_f1: f64, s_d: f64) -> Result<Self> {
        let l = SpaceLadder {
            s_g,
            s_f0,
            s_f1,
            s_d,
            c_interp: 1.0,
        };
        l.validate()?;
        Ok(l)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.s_g, self.s_f0, self.s_f1, self.s_d];
        if all.iter().any(|s| !s.is_finite()) {
            return Err(Error::Config("ladder exponents must be finite".into()));
        }
        if !(self.s_g < self.s_f0 && self.s_f0 < self.s_f1 && self.s_f1 < self.s_d) {
            return Err(Error::Config(format!(
                "ladder must satisfy s_G < s_F0 < s_F1 < s_D, got {all:?}"
            )));
        }
        if !(self.c_interp > 0.0) {
            return Err(Error::Config("c_interp must be positive".into()));
        }
        Ok(())
    }

    /// Interpolation exponent `m` with `s_F0 = m s_F1 + (1-m) s_G`.
    pub fn m(&self) -> f64 {
        (self.s_f0 - self.s_g) / (self.s_f1 - self.s_g)
    }

    pub fn exponent(&self, space: Space) -> f64 {
        match space {
            Space::G => self.s_g,
            Space::F0 => self.s_f0,
            Space::F1 => self.s_f1,
            Space::D => self.s_d,
        }
    }

    pub fn norm(&self, f: &SpectralField, space: Space) -> Result<f64> {
        sobolev_norm(f, self.exponent(space))
    }

    /// All four norms `(G, F0, F1, D)` in one pass over the coefficients.
    pub fn norms(&self, f: &SpectralField) -> Result<[f64; 4]> {
        let g = f.grid();
        let ws = [
            g.weights(self.s_g),
            g.weights(self.s_f0),
            g.weights(self.s_f1),
            g.weights(self.s_d),
        ];
        let mut acc = [0.0f64; 4];
        for c in f.comps() {
            for (i, v) in c.iter().enumerate() {
                let a = v.norm_sqr();
                for j in 0..4 {
                    acc[j] += ws[j][i] * a;
                }
            }
        }
        if acc.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("sobolev norm"));
        }
        Ok(acc.map(f64::sqrt))
    }
}

/// `Σ_k (1+|k|²)^s |f̂_k|²` summed over components.
pub fn sobolev_norm_sq(f: &SpectralField, s: f64) -> Result<f64> {
    let w = f.grid().weights(s);
    let mut acc = 0.0;
    for c in f.comps() {
        for (wi, v) in w.iter().zip(c) {
            acc += wi * v.norm_sqr();
        }
    }
    if !acc.is_finite() {
        return Err(Error::NonFinite("sobolev norm"));
    }
    Ok(acc)
}

pub fn sobolev_norm(f: &SpectralField, s: f64) -> Result<f64> {
    sobolev_norm_sq(f, s).map(f64::sqrt)
}

/// `Σ_k (1+|k|²)^s Re(â_k conj(b̂_k))` summed over components.
pub fn inner_product(a: &SpectralField, b: &SpectralField, s: f64) -> Result<f64> {
    a.same_shape(b)?;
    let w = a.grid().weights(s);
    let mut acc = 0.0;
    for (ca, cb) in a.comps().iter().zip(b.comps()) {
        for ((wi, x), y) in w.iter().zip(ca).zip(cb) {
            acc += wi * (x.re * y.re + x.im * y.im);
        }
    }
    if !acc.is_finite() {
        return Err(Error::NonFinite("inner product"));
    }
    Ok(acc)
}

/// The `(𝒟, 𝒢)` duality pairing, realised as the `𝓕ᵢ` inner product with
/// exponent `s`.
pub fn duality_pairing(a: &SpectralField, b: &SpectralField, s: f64) -> Result<f64> {
    inner_product(a, b, s)
}

/// Returns `(‖f‖_F0, C ‖f‖_F1^m ‖f‖_G^{1-m})`.
pub fn interpolation_check(f: &SpectralField, ladder: &SpaceLadder) -> Result<(f64, f64)> {
    let m = ladder.m();
    let lhs = ladder.norm(f, Space::F0)?;
    let f1 = ladder.norm(f, Space::F1)?;
    let g = ladder.norm(f, Space::G)?;
    let rhs = if f1 == 0.0 || g == 0.0 {
        0.0
    } else {
        ladder.c_interp * f1.powf(m) * g.powf(1.0 - m)
    };
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Complex64, TorusGrid};

    fn sin1d() -> SpectralField {
        let g = TorusGrid::new(1, 16).unwrap();
        SpectralField::from_fn(g, 1, |x| vec![x[0].sin()])
    }

    #[test]
    fn sin_norms() {
        let f = sin1d();
        assert!((sobolev_norm(&f, 0.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((sobolev_norm(&f, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((inner_product(&f, &f, 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_pair_at_k2() {
        let g = TorusGrid::new(1, 16).unwrap();
        let mut f = SpectralField::zeros(g, 1);
        let a = Complex64::new(0.5f64.sqrt(), 0.0);
        f.set_coeff(&[2], 0, a).unwrap();
        f.set_coeff(&[-2], 0, a).unwrap();
        assert!((sobolev_norm_sq(&f, 2.0).unwrap() - 25.0).abs() < 1e-12);
    }

    #[test]
    fn zero_field() {
        let f = SpectralField::zeros(TorusGrid::new(2, 8).unwrap(), 2);
        assert_eq!(sobolev_norm(&f, 3.0).unwrap(), 0.0);
        let l = SpaceLadder::new(0.0, 1.0, 2.0, 3.0).unwrap();
        assert_eq!(interpolation_check(&f, &l).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn interpolation_equality_for_one_mode() {
        let l = SpaceLadder::new(0.0, 1.0, 2.0, 3.0).unwrap();
        assert_eq!(l.m(), 0.5);
        let (lhs, rhs) = interpolation_check(&sin1d(), &l).unwrap();
        assert!((lhs - 1.0).abs() < 1e-15);
        assert!((rhs - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_finite_is_reported() {
        let mut f = sin1d();
        f.comp_mut(0)[3] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(sobolev_norm(&f, 0.0), Err(Error::NonFinite(_))));
    }

    #[test]
    fn ladder_order_enforced() {
        assert!(SpaceLadder::new(0.0, 2.0, 1.0, 3.0).is_err());
        assert!(SpaceLadder::new(0.0, 1.0, 1.0, 3.0).is_err());
    }

    #[test]
    fn shape_mismatch() {
        let a = sin1d();
        let b = SpectralField::zeros(TorusGrid::new(1, 32).unwrap(), 1);
        assert!(matches!(inner_product(&a, &b, 0.0), Err(Error::Shape(_))));
    }
}
