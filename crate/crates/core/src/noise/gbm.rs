use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometric Brownian motion `df = a f dt + b f dW`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbmSpec {
    pub a: f64,
    pub b: f64,
    pub f0: f64,
}

impl GbmSpec {
    pub fn new(a: f64, b: f64, f0: f64) -> Result<Self> {
        if !(f0 > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Parameter("GBM needs finite a, b and f0 > 0".into()));
        }
        Ok(GbmSpec { a, b, f0 })
    }

    /// Mean log-slope `a - b²/2`.
    pub fn log_drift(&self) -> f64 {
        self.a - 0.5 * self.b * self.b
    }
}

/// `f0 exp((a - b²/2) t + b W_t)`.
pub fn gbm_exact(spec: &GbmSpec, w_t: f64, t: f64) -> f64 {
    spec.f0 * (spec.log_drift() * t + spec.b * w_t).exp()
}

/// `b² > 2a`, strict. Ties within a few ulps count as equality, so that
/// `b = √2, a = 1` is on the boundary as it is in exact arithmetic.
pub fn gbm_decay_criterion(spec: &GbmSpec) -> bool {
    let (l, r) = (spec.b * spec.b, 2.0 * spec.a);
    l - r > 8.0 * f64::EPSILON * l.abs().max(r.abs())
}

/// Exact samples of `f_T`, path `i` seeded with `seed + i`.
pub fn sample_gbm_terminal(spec: &GbmSpec, t: f64, n: usize, seed: u64) -> Vec<f64> {
    (0..n as u64)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
            let z: f64 = StandardNormal.sample(&mut rng);
            gbm_exact(spec, t.sqrt() * z, t)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        let s = GbmSpec::new(1.0, 2.0, 3.0).unwrap();
        assert_eq!(gbm_exact(&s, 0.0, 0.0), 3.0);
        assert!((gbm_exact(&s, 0.3, 1.0) - 3.0 * (-0.4f64).exp()).abs() < 1e-15);
        let d = GbmSpec::new(0.5, 0.0, 2.0).unwrap();
        assert!((gbm_exact(&d, 1.0, 2.0) - 2.0 * 1f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn criterion() {
        assert!(gbm_decay_criterion(&GbmSpec::new(1.0, 2.0, 1.0).unwrap()));
        assert!(!gbm_decay_criterion(&GbmSpec::new(1.0, 1.0, 1.0).unwrap()));
        let tie = GbmSpec::new(2.0, 2.0, 1.0).unwrap();
        assert!(!gbm_decay_criterion(&tie));
        assert!(!gbm_decay_criterion(&GbmSpec::new(1.0, 2f64.sqrt(), 1.0).unwrap()));
    }
}
