use serde::{Deserialize, Serialize};

use super::DriftOperator;
use crate::error::Result;
use crate::spectral::{inner_product, Space};

/// Pairings and norms entering the structural assumptions, for one sample.
///
/// The `ratio_*` fields use the exponents a quadratic drift scales with
/// (`⟨a,A(a)⟩ ~ |a|³`); the audit fits the exponents separately.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub norm_g: f64,
    pub norm_f0: f64,
    pub norm_f1: f64,
    pub norm_d: f64,
    pub pair_g: f64,
    pub pair_f0: f64,
    pub pair_f1: f64,
    pub pair_d: f64,
    pub drift_norm_g: f64,
    /// `⟨a,A(a)⟩_F0 / ‖a‖_F0³`
    pub ratio_a1: f64,
    /// `⟨a,A(a)⟩_D / (‖a‖_F1 ‖a‖_D²)`
    pub ratio_a2: f64,
    /// `⟨a,A(a)⟩_F1 / (‖a‖_F0 ‖a‖_F1²)`
    pub ratio_a3: f64,
    /// `‖A(a)‖_G / ‖a‖_F1²`
    pub ratio_tight: f64,
}

fn q(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn drift_pairing_report(
    a: &crate::spectral::SpectralField,
    op: &DriftOperator,
) -> Result<AssumptionReport> {
    let l = &op.ladder;
    let aa = op.eval(a)?;
    let [ng, n0, n1, nd] = l.norms(a)?;
    let pair = |s: Space| inner_product(a, &aa, l.exponent(s));
    let r = AssumptionReport {
        norm_g: ng,
        norm_f0: n0,
        norm_f1: n1,
        norm_d: nd,
        pair_g: pair(Space::G)?,
        pair_f0: pair(Space::F0)?,
        pair_f1: pair(Space::F1)?,
        pair_d: pair(Space::D)?,
        drift_norm_g: l.norm(&aa, Space::G)?,
        ..Default::default()
    };
    Ok(AssumptionReport {
        ratio_a1: q(r.pair_f0, n0.powi(3)),
        ratio_a2: q(r.pair_d, n1 * nd * nd),
        ratio_a3: q(r.pair_f1, n0 * n1 * n1),
        ratio_tight: q(r.drift_norm_g, n1 * n1),
        ..r
    })
}

/// Fitted constants of the structural assumptions.
///
/// `c1, gamma1, c2` belong to the `𝓕₀` energy inequality
/// `⟨a,A(a)⟩_F0 ≤ C₁‖a‖_F0^γ₁ − C₂‖a‖_F1²`; `c1_a2` to the `𝒟` inequality
/// with exponents `(gamma_sup1, gamma_sup2)` on `(‖a‖_F1, ‖a‖_D)`; `c1_a3`
/// and `gamma13` to the `𝓕₁` inequality; `c3` is the Lipschitz constant and
/// `(alpha_emb, beta_emb)` the interpolation exponents `(m, 1-m)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AssumptionConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma_sup1: f64,
    pub gamma_sup2: f64,
    pub gamma13: f64,
    pub alpha_emb: f64,
    pub beta_emb: f64,
    pub c1_a2: f64,
    pub c1_a3: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ModelKind, ModelParams};
    use crate::spectral::{SpectralField, TorusGrid};

    #[test]
    fn zero_sample() {
        let op = DriftOperator::new(ModelKind::Burgers1d, ModelParams::default()).unwrap();
        let f = SpectralField::zeros(TorusGrid::new(1, 16).unwrap(), 1);
        let r = drift_pairing_report(&f, &op).unwrap();
        assert_eq!(r, AssumptionReport::default());
    }

    #[test]
    fn burgers_sine_energy() {
        let op = DriftOperator::new(ModelKind::Burgers1d, ModelParams::default()).unwrap();
        let f = SpectralField::from_fn(TorusGrid::new(1, 32).unwrap(), 1, |x| vec![x[0].sin()]);
        let r = drift_pairing_report(&f, &op).unwrap();
        assert!(r.pair_g.abs() < 1e-16);
        // sin x · (-½ sin 2x) is orthogonal in every H^s
        assert!(r.pair_f0.abs() < 1e-15);
    }
}
