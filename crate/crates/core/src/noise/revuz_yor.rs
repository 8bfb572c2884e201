use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// `exp(-x²/(2y))`, the bound on `P(sup_{t} M_t ≥ x, ⟨M⟩_∞ ≤ y)` for a
/// continuous local martingale vanishing at zero.
pub fn revuz_yor_bound(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::Parameter(format!("need x, y > 0, got ({x}, {y})")));
    }
    Ok((-x * x / (2.0 * y)).exp())
}

/// `P(sup_{t≤y} W_t ≥ x) = 2(1 - Φ(x/√y))` by reflection.
pub fn brownian_sup_exact(x: f64, y: f64) -> f64 {
    let n = Normal::standard();
    2.0 * (1.0 - n.cdf(x / y.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        assert!((revuz_yor_bound(1.0, 1.0).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
        assert!((revuz_yor_bound(1e-9, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((brownian_sup_exact(1.0, 1.0) - 0.31731050786291415).abs() < 1e-9);
        assert!(brownian_sup_exact(1.0, 1.0) <= revuz_yor_bound(1.0, 1.0).unwrap());
        assert!(revuz_yor_bound(0.0, 1.0).is_err());
    }

    #[test]
    fn monotone() {
        let a = revuz_yor_bound(1.0, 2.0).unwrap();
        assert!(revuz_yor_bound(1.5, 2.0).unwrap() < a);
        assert!(revuz_yor_bound(1.0, 3.0).unwrap() > a);
    }
}
