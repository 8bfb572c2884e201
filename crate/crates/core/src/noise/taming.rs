use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{sobolev_norm, Space, SpaceLadder, SpectralField};

/// Which ladder norm enters the noise amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormSpace {
    F0,
    F1,
}

/// Taming regime. I: data in 𝓕₀, noise norm 𝓕₀. II: data in 𝒟, noise norm
/// 𝓕₁. III: data in 𝓕₁, noise norm 𝓕₀.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseLabel {
    I,
    II,
    III,
}

impl CaseLabel {
    /// Space the initial condition must belong to.
    pub fn initial_space(self) -> Space {
        match self {
            CaseLabel::I => Space::F0,
            CaseLabel::II => Space::D,
            CaseLabel::III => Space::F1,
        }
    }

    pub fn norm_space(self) -> NormSpace {
        match self {
            CaseLabel::II => NormSpace::F1,
            _ => NormSpace::F0,
        }
    }

    /// Space of the log-norm envelope `log(C + ‖X‖²)` tracked by the
    /// martingale diagnostics.
    pub fn envelope_space(self) -> Space {
        match self {
            CaseLabel::III => Space::F1,
            _ => Space::F0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub theta: f64,
    pub alpha: f64,
    pub norm_space: NormSpace,
    pub case: CaseLabel,
}

impl NoiseSpec {
    pub fn new(theta: f64, alpha: f64, case: CaseLabel) -> Result<Self> {
        let s = NoiseSpec {
            theta,
            alpha,
            norm_space: case.norm_space(),
            case,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return Err(Error::Parameter(format!("theta must be ≥ 0, got {}", self.theta)));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::Parameter(format!("alpha must be ≥ 0, got {}", self.alpha)));
        }
        if self.norm_space != self.case.norm_space() {
            return Err(Error::Config(format!(
                "case {:?} uses the {:?} norm in the noise, not {:?}",
                self.case,
                self.case.norm_space(),
                self.norm_space
            )));
        }
        Ok(())
    }

    pub fn norm_exponent(&self, ladder: &SpaceLadder) -> f64 {
        match self.norm_space {
            NormSpace::F0 => ladder.s_f0,
            NormSpace::F1 => ladder.s_f1,
        }
    }
}

/// `θ ‖X‖^α`, measured in the norm of the noise case.
pub fn noise_factor(x: &SpectralField, spec: &NoiseSpec, ladder: &SpaceLadder) -> Result<f64> {
    if spec.theta == 0.0 {
        return Ok(0.0);
    }
    let n = sobolev_norm(x, spec.norm_exponent(ladder))?;
    Ok(spec.theta * n.powf(spec.alpha))
}

/// `B(X) = θ ‖X‖^α X`.
pub fn noise_coefficient(
    x: &SpectralField,
    spec: &NoiseSpec,
    ladder: &SpaceLadder,
) -> Result<SpectralField> {
    if !x.is_finite() {
        return Err(Error::NonFinite("noise input"));
    }
    Ok(x.scaled(noise_factor(x, spec, ladder)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{random_field, TorusGrid};

    fn ladder() -> SpaceLadder {
        SpaceLadder::new(0.0, 1.0, 3.0, 4.0).unwrap()
    }

    #[test]
    fn theta_zero_gives_zero() {
        let g = TorusGrid::new(1, 16).unwrap();
        let x = random_field(g, 1, 3.0, 1.0, 1);
        let s = NoiseSpec::new(0.0, 2.0, CaseLabel::I).unwrap();
        assert!(noise_coefficient(&x, &s, &ladder()).unwrap().is_zero());
    }

    #[test]
    fn unit_norm_and_scaled() {
        let g = TorusGrid::new(1, 16).unwrap();
        let x = SpectralField::from_fn(g, 1, |p| vec![p[0].sin()]);
        let s = NoiseSpec::new(0.7, 3.0, CaseLabel::I).unwrap();
        let b = noise_coefficient(&x, &s, &ladder()).unwrap();
        assert_eq!(b, x.scaled(0.7));
        let x2 = x.scaled(2.0);
        let s = NoiseSpec::new(0.5, 1.0, CaseLabel::I).unwrap();
        assert_eq!(noise_coefficient(&x2, &s, &ladder()).unwrap(), x2);
    }

    #[test]
    fn case_norm_consistency() {
        assert_eq!(NoiseSpec::new(1.0, 1.0, CaseLabel::II).unwrap().norm_space, NormSpace::F1);
        let bad = NoiseSpec {
            theta: 1.0,
            alpha: 1.0,
            norm_space: NormSpace::F1,
            case: CaseLabel::I,
        };
        assert!(bad.validate().is_err());
        assert!(NoiseSpec::new(-1.0, 1.0, CaseLabel::I).is_err());
    }
}
