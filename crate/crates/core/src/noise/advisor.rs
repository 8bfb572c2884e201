use serde::{Deserialize, Serialize};

use super::CaseLabel;
use crate::error::{Error, Result};
use crate::models::AssumptionConstants;

/// Suggested noise parameters and the inequality they satisfy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Advice {
    pub case: CaseLabel,
    pub theta: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub inequality: String,
}

/// [`theta_advisor_with_margin`] with a 5% margin.
pub fn theta_advisor(case: CaseLabel, k: &AssumptionConstants, epsilon: f64) -> Result<Advice> {
    theta_advisor_with_margin(case, k, epsilon, 0.05)
}

/// Smallest θ and α meeting each case's sufficient condition.
///
/// - I: `2α > γ₁` and `(1-2ε)θ² > 2C₁`, the latter balancing the leading
///   Itô term against the drift bound at unit norm.
/// - II: `θ = 2C₁/(1/2-ε)` exactly and `2α > γ₁ - 2`.
/// - III: `2C₁ - 2(1-ε)θ² < 0` with `C₁` of the 𝓕₁ inequality, and
///   `α = γ₁₃/2`.
///
/// Strict inequalities are met with a multiplicative `margin` on θ and an
/// additive one on α. `C₁ = 0` gives `θ = 0`.
pub fn theta_advisor_with_margin(
    case: CaseLabel,
    k: &AssumptionConstants,
    epsilon: f64,
    margin: f64,
) -> Result<Advice> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::Parameter(format!("epsilon must lie in (0, 1/2), got {epsilon}")));
    }
    if !(margin >= 0.0) {
        return Err(Error::Parameter("margin must be non-negative".into()));
    }
    let pos = |c: f64| c.max(0.0);
    let (theta, alpha, inequality) = match case {
        CaseLabel::I => {
            let c1 = pos(k.c1);
            let th = (2.0 * c1 / (1.0 - 2.0 * epsilon)).sqrt() * (1.0 + margin);
            let al = 0.5 * k.gamma1 + margin;
            (th, al, format!("(1-2ε)θ² > 2C₁ = {:.6}; 2α > γ₁ = {:.4}", 2.0 * c1, k.gamma1))
        }
        CaseLabel::II => {
            let c1 = pos(k.c1);
            let th = 2.0 * c1 / (0.5 - epsilon);
            let al = (0.5 * (k.gamma1 - 2.0)).max(0.0) + margin;
            (th, al, format!("θ = 2C₁/(1/2-ε) with C₁ = {c1:.6}; 2α > γ₁ - 2 = {:.4}", k.gamma1 - 2.0))
        }
        CaseLabel::III => {
            let c1 = pos(k.c1_a3);
            let th = (c1 / (1.0 - epsilon)).sqrt() * (1.0 + margin);
            let al = 0.5 * k.gamma13;
            (th, al, format!("2C₁ - 2(1-ε)θ² < 0 with C₁ = {c1:.6}; α = γ₁₃/2"))
        }
    };
    Ok(Advice {
        case,
        theta,
        alpha,
        epsilon,
        inequality,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(c1: f64) -> AssumptionConstants {
        AssumptionConstants {
            c1,
            c1_a3: c1,
            gamma1: 3.0,
            gamma13: 1.0,
            ..Default::default()
        }
    }

    #[test]
    fn case_ii_formula() {
        let a = theta_advisor(CaseLabel::II, &k(1.0), 0.25).unwrap();
        assert!((a.theta - 8.0).abs() < 1e-12);
    }

    #[test]
    fn case_iii_inequality() {
        let a = theta_advisor_with_margin(CaseLabel::III, &k(1.0), 0.25, 0.0).unwrap();
        assert!((a.theta * a.theta - 4.0 / 3.0).abs() < 1e-12);
        let a = theta_advisor(CaseLabel::III, &k(1.0), 0.25).unwrap();
        assert!(2.0 - 2.0 * 0.75 * a.theta * a.theta < 0.0);
        assert_eq!(a.alpha, 0.5);
    }

    #[test]
    fn zero_constant() {
        for c in [CaseLabel::I, CaseLabel::II, CaseLabel::III] {
            assert_eq!(theta_advisor(c, &k(0.0), 0.25).unwrap().theta, 0.0);
        }
    }

    #[test]
    fn epsilon_range() {
        assert!(theta_advisor(CaseLabel::II, &k(1.0), 0.5).is_err());
        assert!(theta_advisor(CaseLabel::II, &k(1.0), 0.0).is_err());
    }

    #[test]
    fn case_i_exponent() {
        let a = theta_advisor(CaseLabel::I, &k(1.0), 0.25).unwrap();
        assert!(2.0 * a.alpha > 3.0);
        assert!((1.0 - 0.5) * a.theta * a.theta > 2.0);
    }
}
