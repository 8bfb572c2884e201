//! Drift operators `A` of the application models.
//!
//! Every quadratic product is evaluated pseudo-spectrally with the 2/3 rule:
//! inputs and outputs are truncated to `|k|_∞ ≤ ⌊n/3⌋`, which makes the
//! retained modes of a product exact.

mod burgers;
mod report;
mod rsw;
mod vorticity;

pub use burgers::burgers_drift;
pub use report::{drift_pairing_report, AssumptionConstants, AssumptionReport};
pub use rsw::{geostrophic_state, rsw_drift};
pub use vorticity::{biot_savart, curl, divergence, leray_project, vorticity_drift};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{dealias, SpaceLadder, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Burgers1d,
    Burgers2d,
    RswViscous,
    RswInviscid,
    Vorticity2d,
    Vorticity3d,
    /// `A(X) = rate·X`, the scalar test problem.
    Linear,
    /// `A(X) = nu·ΔX`.
    Heat,
    Zero,
}

impl ModelKind {
    /// Required spatial dimension, `None` if any.
    pub fn dim(self) -> Option<usize> {
        match self {
            ModelKind::Burgers1d => Some(1),
            ModelKind::Burgers2d
            | ModelKind::RswViscous
            | ModelKind::RswInviscid
            | ModelKind::Vorticity2d => Some(2),
            ModelKind::Vorticity3d => Some(3),
            _ => None,
        }
    }

    /// Component count, `None` if any.
    pub fn components(self) -> Option<usize> {
        match self {
            ModelKind::Burgers1d | ModelKind::Vorticity2d => Some(1),
            ModelKind::Burgers2d => Some(2),
            ModelKind::RswViscous | ModelKind::RswInviscid | ModelKind::Vorticity3d => Some(3),
            _ => None,
        }
    }

    pub fn is_inviscid(self) -> bool {
        matches!(self, ModelKind::RswInviscid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelParams {
    /// Viscosity (γ for the shallow-water momentum equation).
    pub nu: f64,
    /// Height diffusion η of the viscous shallow-water model.
    pub eta: f64,
    pub f_coriolis: f64,
    pub rossby: f64,
    pub froude: f64,
    /// Euler ladder exponent `3/2 + epsilon_sobolev`.
    pub epsilon_sobolev: f64,
    /// Rate of the linear test drift.
    pub rate: f64,
    #[serde(skip)]
    pub topography: Option<SpectralField>,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            nu: 0.0,
            eta: 0.0,
            f_coriolis: 1.0,
            rossby: 1.0,
            froude: 1.0,
            epsilon_sobolev: 0.1,
            rate: 1.0,
            topography: None,
        }
    }
}

/// A model kind with parameters and its space ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftOperator {
    pub kind: ModelKind,
    pub params: ModelParams,
    pub ladder: SpaceLadder,
}

/// Ladder used when none is configured.
pub fn default_ladder(kind: ModelKind, params: &ModelParams) -> SpaceLadder {
    let l = |a, b, c, d| SpaceLadder::new(a, b, c, d).expect("default ladders are ordered");
    let euler = |p: &ModelParams| l(0.0, 1.5 + p.epsilon_sobolev, 3.0, 4.0);
    match kind {
        ModelKind::Burgers1d | ModelKind::Burgers2d | ModelKind::RswInviscid => l(0.0, 1.0, 3.0, 4.0),
        ModelKind::RswViscous => l(0.0, 1.0, 2.0, 3.0),
        ModelKind::Vorticity2d | ModelKind::Vorticity3d => {
            if params.nu > 0.0 {
                l(0.0, 2.0, 3.0, 4.0)
            } else {
                euler(params)
            }
        }
        ModelKind::Linear | ModelKind::Heat | ModelKind::Zero => l(0.0, 1.0, 2.0, 3.0),
    }
}

impl DriftOperator {
    pub fn new(kind: ModelKind, params: ModelParams) -> Result<Self> {
        let ladder = default_ladder(kind, &params);
        Self::with_ladder(kind, params, ladder)
    }

    pub fn with_ladder(kind: ModelKind, params: ModelParams, ladder: SpaceLadder) -> Result<Self> {
        ladder.validate()?;
        let p = &params;
        if !(p.nu >= 0.0 && p.eta >= 0.0) {
            return Err(Error::Parameter("viscosities must be non-negative".into()));
        }
        if kind == ModelKind::RswInviscid && (p.nu != 0.0 || p.eta != 0.0) {
            return Err(Error::Parameter(
                "inviscid shallow water requires nu = eta = 0".into(),
            ));
        }
        if !(p.rossby > 0.0 && p.froude > 0.0) {
            return Err(Error::Parameter("rossby and froude must be positive".into()));
        }
        if !(p.epsilon_sobolev > 0.0) {
            return Err(Error::Parameter("epsilon_sobolev must be positive".into()));
        }
        if ![p.nu, p.eta, p.f_coriolis, p.rate].iter().all(|v| v.is_finite()) {
            return Err(Error::Parameter("model parameters must be finite".into()));
        }
        Ok(DriftOperator {
            kind,
            params,
            ladder,
        })
    }

    pub fn check_field(&self, x: &SpectralField) -> Result<()> {
        if let Some(d) = self.kind.dim() {
            if x.grid().dim() != d {
                return Err(Error::Shape(format!(
                    "{:?} needs a {}-dimensional grid, got {}",
                    self.kind,
                    d,
                    x.grid().dim()
                )));
            }
        }
        if let Some(c) = self.kind.components() {
            if x.components() != c {
                return Err(Error::Shape(format!(
                    "{:?} needs {} components, got {}",
                    self.kind,
                    c,
                    x.components()
                )));
            }
        }
        if let Some(b) = &self.params.topography {
            if b.grid() != x.grid() || b.components() != 1 {
                return Err(Error::Shape("topography must be scalar on the state grid".into()));
            }
        }
        Ok(())
    }

    /// Evaluate `A(x)`. The result is dealiased and exactly Hermitian.
    pub fn eval(&self, x: &SpectralField) -> Result<SpectralField> {
        self.check_field(x)?;
        let p = &self.params;
        let mut out = match self.kind {
            ModelKind::Burgers1d | ModelKind::Burgers2d => burgers_drift(x, p.nu)?,
            ModelKind::Vorticity2d | ModelKind::Vorticity3d => vorticity_drift(x, p.nu)?,
            ModelKind::RswViscous => rsw_drift(x, p, true)?,
            ModelKind::RswInviscid => rsw_drift(x, p, false)?,
            ModelKind::Linear => x.scaled(p.rate),
            ModelKind::Heat => x.laplacian().scaled(p.nu),
            ModelKind::Zero => SpectralField::zeros(x.grid(), x.components()),
        };
        if !matches!(self.kind, ModelKind::Linear | ModelKind::Heat | ModelKind::Zero) {
            out = dealias(&out);
        }
        out.enforce_hermitian();
        if !out.is_finite() {
            return Err(Error::NonFinite("drift"));
        }
        Ok(out)
    }

    /// True if the shallow-water height is non-positive somewhere on the grid.
    pub fn positivity_violated(&self, x: &SpectralField) -> bool {
        match self.kind {
            ModelKind::RswViscous | ModelKind::RswInviscid => {
                let h = x.component_field(2).to_physical();
                h[0].iter().any(|&v| v <= 0.0)
            }
            _ => false,
        }
    }
}

/// Pointwise product of physical arrays.
pub(crate) fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// `acc += a*b` pointwise.
pub(crate) fn fma_into(acc: &mut [f64], a: &[f64], b: &[f64]) {
    for ((r, x), y) in acc.iter_mut().zip(a).zip(b) {
        *r += x * y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;

    #[test]
    fn ladders() {
        let p = ModelParams::default();
        let e = default_ladder(ModelKind::Vorticity3d, &p);
        assert!((e.s_f0 - 1.6).abs() < 1e-15);
        let ns = default_ladder(
            ModelKind::Vorticity3d,
            &ModelParams {
                nu: 0.1,
                ..p.clone()
            },
        );
        assert_eq!((ns.s_g, ns.s_f0, ns.s_f1, ns.s_d), (0.0, 2.0, 3.0, 4.0));
        assert_eq!(default_ladder(ModelKind::Burgers1d, &p).s_f1, 3.0);
    }

    #[test]
    fn parameter_checks() {
        let p = ModelParams {
            nu: 0.1,
            ..Default::default()
        };
        assert!(DriftOperator::new(ModelKind::RswInviscid, p).is_err());
        let p = ModelParams {
            rossby: 0.0,
            ..Default::default()
        };
        assert!(DriftOperator::new(ModelKind::RswViscous, p).is_err());
    }

    #[test]
    fn shape_checks() {
        let op = DriftOperator::new(ModelKind::Vorticity2d, ModelParams::default()).unwrap();
        let f = SpectralField::zeros(TorusGrid::new(1, 8).unwrap(), 1);
        assert!(matches!(op.eval(&f), Err(Error::Shape(_))));
    }

    #[test]
    fn heat_and_linear() {
        let g = TorusGrid::new(1, 16).unwrap();
        let f = SpectralField::from_fn(g, 1, |x| vec![(2.0 * x[0]).sin()]);
        let heat = DriftOperator::new(
            ModelKind::Heat,
            ModelParams {
                nu: 0.5,
                ..Default::default()
            },
        )
        .unwrap();
        let d = heat.eval(&f).unwrap();
        assert!(d.sub(&f.scaled(-2.0)).comps()[0].iter().all(|v| v.norm() < 1e-13));
        let lin = DriftOperator::new(ModelKind::Linear, ModelParams::default()).unwrap();
        assert_eq!(lin.eval(&f).unwrap(), f);
    }
}
