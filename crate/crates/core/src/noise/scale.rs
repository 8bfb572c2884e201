use std::cell::Cell;
use std::sync::Arc;

use quadrature::double_exponential;

use crate::error::{Error, Result};

type Coef = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One-dimensional diffusion `dx = μ(x) dt + σ(x) dW` with reference point `c`.
#[derive(Clone)]
pub struct ScaleFunctionSpec {
    pub mu: Coef,
    pub sigma: Coef,
    pub c: f64,
    /// Relative tolerance of the outer integral.
    pub rel_tol: f64,
}

impl std::fmt::Debug for ScaleFunctionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScaleFunctionSpec")
            .field("c", &self.c)
            .field("rel_tol", &self.rel_tol)
            .finish_non_exhaustive()
    }
}

impl ScaleFunctionSpec {
    pub fn new(
        mu: impl Fn(f64) -> f64 + Send + Sync + 'static,
        sigma: impl Fn(f64) -> f64 + Send + Sync + 'static,
        c: f64,
    ) -> Self {
        ScaleFunctionSpec {
            mu: Arc::new(mu),
            sigma: Arc::new(sigma),
            c,
            rel_tol: 1e-8,
        }
    }

    /// Geometric Brownian motion `μ = a x`, `σ = b x`.
    pub fn gbm(a: f64, b: f64, c: f64) -> Self {
        Self::new(move |x| a * x, move |x| b * x, c)
    }

    /// Closed form for GBM with `p = 2a/b²`: `∫_c^x (y/c)^{-p} dy`.
    pub fn gbm_closed_form(a: f64, b: f64, c: f64, x: f64) -> f64 {
        let p = 2.0 * a / (b * b);
        if (p - 1.0).abs() < 1e-15 {
            c * (x / c).ln()
        } else {
            c.powf(p) * (x.powf(1.0 - p) - c.powf(1.0 - p)) / (1.0 - p)
        }
    }
}

/// `s(x) = ∫_c^x exp(-∫_c^y 2μ(z)/σ²(z) dz) dy`, by nested double-exponential
/// quadrature.
pub fn scale_function(spec: &ScaleFunctionSpec, x: f64) -> Result<f64> {
    let c = spec.c;
    if !x.is_finite() || !c.is_finite() {
        return Err(Error::Domain("scale function needs finite x and c".into()));
    }
    if x == c {
        return Ok(0.0);
    }
    let bad = Cell::new(false);
    let sign = (spec.sigma)(c).signum();
    // σ is continuous, so a sign change anywhere means it vanishes in between
    let check = |z: f64| {
        let s = (spec.sigma)(z);
        if !(s.is_finite() && s != 0.0 && s.signum() == sign) {
            bad.set(true);
        }
        s
    };
    check(c);
    check(x);
    if bad.get() {
        return Err(Error::Domain(format!("σ vanishes between {c} and {x}")));
    }
    let inner = |y: f64| {
        if y == c {
            return 0.0;
        }
        let g = |z: f64| {
            let s = check(z);
            2.0 * (spec.mu)(z) / (s * s)
        };
        let tol = 1e-14 * (1.0 + (y - c).abs());
        double_exponential::integrate(g, c, y, tol).integral
    };
    let density = |y: f64| (-inner(y)).exp();
    // scale the absolute target by a first estimate of the magnitude
    let rough = double_exponential::integrate(density, c, x, 1e-6 * (x - c).abs()).integral;
    let target = spec.rel_tol * 1e-2 * rough.abs().max(f64::MIN_POSITIVE);
    let out = double_exponential::integrate(density, c, x, target);
    if bad.get() {
        return Err(Error::Domain(format!("σ vanishes between {c} and {x}")));
    }
    if !out.integral.is_finite() {
        return Err(Error::NonFinite("scale function"));
    }
    Ok(out.integral)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_scale() {
        let s = ScaleFunctionSpec::new(|_| 0.0, |_| 1.0, 0.5);
        assert!((scale_function(&s, 2.0).unwrap() - 1.5).abs() < 1e-12);
        assert!((scale_function(&s, -1.0).unwrap() + 1.5).abs() < 1e-12);
        assert_eq!(scale_function(&s, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn gbm_square_root() {
        let s = ScaleFunctionSpec::gbm(1.0, 2.0, 1.0);
        for x in [0.1f64, 0.5, 2.0, 9.0] {
            let want = 2.0 * (x.sqrt() - 1.0);
            let got = scale_function(&s, x).unwrap();
            assert!((got - want).abs() <= 1e-8 * want.abs(), "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn vanishing_sigma() {
        let s = ScaleFunctionSpec::gbm(1.0, 2.0, 1.0);
        assert!(matches!(scale_function(&s, -1.0), Err(Error::Domain(_))));
        let s = ScaleFunctionSpec::new(|_| 0.0, |z| z - 1.5, 1.0);
        assert!(matches!(scale_function(&s, 2.0), Err(Error::Domain(_))));
    }
}
