use super::config::Scheme;
use crate::error::{Error, Result};
use crate::models::DriftOperator;
use crate::noise::{noise_factor, NoiseSpec};
use crate::spectral::{galerkin_project, sobolev_norm, GalerkinProjector, Space, SpectralField};

/// Drift and noise of the Galerkin system on `|k|_∞ ≤ cutoff`.
#[derive(Debug, Clone)]
pub struct ProjectedSde {
    pub op: DriftOperator,
    pub noise: Option<NoiseSpec>,
    pub projector: GalerkinProjector,
}

impl ProjectedSde {
    pub fn new(op: DriftOperator, noise: Option<NoiseSpec>, cutoff: usize) -> Self {
        ProjectedSde {
            op,
            noise,
            projector: GalerkinProjector::new(cutoff),
        }
    }

    /// `T_d A(x)`.
    pub fn drift(&self, x: &SpectralField) -> Result<SpectralField> {
        galerkin_project(&self.op.eval(x)?, self.projector)
    }

    /// Scalar `θ‖x‖^α` with `B(x) = factor·x`; zero without noise.
    pub fn noise_factor(&self, x: &SpectralField) -> Result<f64> {
        match &self.noise {
            Some(s) => noise_factor(x, s, &self.op.ladder),
            None => Ok(0.0),
        }
    }

    pub fn has_noise(&self) -> bool {
        self.noise.map(|s| s.theta > 0.0).unwrap_or(false)
    }

    pub fn project(&self, x: &SpectralField) -> Result<SpectralField> {
        galerkin_project(x, self.projector)
    }

    fn g_norm(&self, x: &SpectralField) -> Result<f64> {
        self.op.ladder.norm(x, Space::G)
    }
}

fn finish(sys: &ProjectedSde, mut x: SpectralField) -> Result<SpectralField> {
    x.enforce_hermitian();
    let x = sys.project(&x)?;
    if !x.is_finite() {
        return Err(Error::NonFinite("step"));
    }
    Ok(x)
}

/// `X + T_d A(X) dt + B(X) dW`.
pub fn em_step(x: &SpectralField, sys: &ProjectedSde, dw: f64, dt: f64) -> Result<SpectralField> {
    let mut out = x.clone();
    out.axpy(dt, &sys.drift(x)?);
    let b = sys.noise_factor(x)?;
    if b != 0.0 {
        out.axpy(b * dw, x);
    }
    finish(sys, out)
}

/// `X + dt A/(1 + dt‖A‖_G) + dW B/(1 + dt‖B‖²_G)`.
pub fn tamed_em_step(
    x: &SpectralField,
    sys: &ProjectedSde,
    dw: f64,
    dt: f64,
) -> Result<SpectralField> {
    let a = sys.drift(x)?;
    let an = sys.g_norm(&a)?;
    let mut out = x.clone();
    out.axpy(dt / (1.0 + dt * an), &a);
    add_tamed_noise(&mut out, x, sys, dw, dt)?;
    finish(sys, out)
}

fn add_tamed_noise(
    out: &mut SpectralField,
    x: &SpectralField,
    sys: &ProjectedSde,
    dw: f64,
    dt: f64,
) -> Result<()> {
    let b = sys.noise_factor(x)?;
    if b != 0.0 {
        let bn = b * sys.g_norm(x)?;
        out.axpy(b * dw / (1.0 + dt * bn * bn), x);
    }
    Ok(())
}

fn rk4_increment(x: &SpectralField, sys: &ProjectedSde, dt: f64) -> Result<SpectralField> {
    let k1 = sys.drift(x)?;
    let mut y = x.clone();
    y.axpy(0.5 * dt, &k1);
    let k2 = sys.drift(&y)?;
    let mut y = x.clone();
    y.axpy(0.5 * dt, &k2);
    let k3 = sys.drift(&y)?;
    let mut y = x.clone();
    y.axpy(dt, &k3);
    let k4 = sys.drift(&y)?;
    let mut inc = k1;
    inc.axpy(2.0, &k2);
    inc.axpy(2.0, &k3);
    inc.axpy(1.0, &k4);
    inc.scale(dt / 6.0);
    Ok(inc)
}

/// Classical RK4 on `dX = T_d A(X) dt`.
pub fn rk4_deterministic_step(
    x: &SpectralField,
    sys: &ProjectedSde,
    dt: f64,
) -> Result<SpectralField> {
    let mut out = x.clone();
    out.axpy(1.0, &rk4_increment(x, sys, dt)?);
    finish(sys, out)
}

/// `X + Δ/(1 + ‖Δ‖_G) + dW B/(1 + dt‖B‖²_G)` with `Δ` the RK4 drift
/// increment.
pub fn tamed_rk4_step(
    x: &SpectralField,
    sys: &ProjectedSde,
    dw: f64,
    dt: f64,
) -> Result<SpectralField> {
    let inc = rk4_increment(x, sys, dt)?;
    let n = sys.g_norm(&inc)?;
    let mut out = x.clone();
    out.axpy(1.0 / (1.0 + n), &inc);
    add_tamed_noise(&mut out, x, sys, dw, dt)?;
    finish(sys, out)
}

/// Euler–Maruyama plus `½(1+α)θ²‖X‖^{2α} X (dW² - dt)`, the Milstein term of
/// `B(X) = θ‖X‖^α X`.
pub fn milstein_step(
    x: &SpectralField,
    sys: &ProjectedSde,
    dw: f64,
    dt: f64,
) -> Result<SpectralField> {
    let mut out = x.clone();
    out.axpy(dt, &sys.drift(x)?);
    if let Some(s) = &sys.noise {
        let b = sys.noise_factor(x)?;
        if b != 0.0 {
            let corr = 0.5 * (1.0 + s.alpha) * b * b * (dw * dw - dt);
            out.axpy(b * dw + corr, x);
        }
    }
    finish(sys, out)
}

/// Dispatch on the scheme.
pub fn step(
    scheme: Scheme,
    x: &SpectralField,
    sys: &ProjectedSde,
    dw: f64,
    dt: f64,
) -> Result<SpectralField> {
    match scheme {
        Scheme::EulerMaruyama => em_step(x, sys, dw, dt),
        Scheme::TamedEulerMaruyama => tamed_em_step(x, sys, dw, dt),
        Scheme::TamedRk4Maruyama => tamed_rk4_step(x, sys, dw, dt),
        Scheme::Milstein => milstein_step(x, sys, dw, dt),
        Scheme::Rk4Deterministic => rk4_deterministic_step(x, sys, dt),
    }
}

/// Norm used in the noise of `sys`, for diagnostics.
pub(crate) fn envelope_norm_sq(x: &SpectralField, sys: &ProjectedSde, space: Space) -> Result<f64> {
    let n = sobolev_norm(x, sys.op.ladder.exponent(space))?;
    Ok(n * n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ModelKind, ModelParams};
    use crate::noise::CaseLabel;
    use crate::spectral::{galerkin_grid_for, random_field, TorusGrid};

    fn sys(kind: ModelKind, params: ModelParams, noise: Option<NoiseSpec>, cutoff: usize) -> ProjectedSde {
        ProjectedSde::new(DriftOperator::new(kind, params).unwrap(), noise, cutoff)
    }

    fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
        a.sub(b).comps().iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn trivial_fixed_points() {
        let g = TorusGrid::new(1, 16).unwrap();
        let x = galerkin_project(&random_field(g, 1, 2.0, 1.0, 1), GalerkinProjector::new(5)).unwrap();
        let s = sys(ModelKind::Zero, ModelParams::default(), None, 5);
        assert_eq!(em_step(&x, &s, 0.3, 0.1).unwrap(), x);
        let z = SpectralField::zeros(g, 1);
        let b = sys(ModelKind::Burgers1d, ModelParams::default(), NoiseSpec::new(2.0, 1.0, CaseLabel::I).ok(), 5);
        for sch in [Scheme::EulerMaruyama, Scheme::TamedEulerMaruyama, Scheme::TamedRk4Maruyama, Scheme::Milstein, Scheme::Rk4Deterministic] {
            assert!(step(sch, &z, &b, 0.4, 0.01).unwrap().is_zero());
        }
    }

    #[test]
    fn linear_em() {
        let g = TorusGrid::new(1, 16).unwrap();
        let x = SpectralField::from_fn(g, 1, |p| vec![p[0].cos()]);
        let x = galerkin_project(&x, GalerkinProjector::new(5)).unwrap();
        let s = sys(ModelKind::Linear, ModelParams::default(), None, 5);
        let y = em_step(&x, &s, 0.0, 0.01).unwrap();
        assert!(max_diff(&y, &x.scaled(1.01)) < 1e-16);
    }

    #[test]
    fn tamed_matches_em_for_small_steps() {
        let n = galerkin_grid_for(10);
        let g = TorusGrid::new(1, n).unwrap();
        let x = galerkin_project(&random_field(g, 1, 3.0, 0.5, 2), GalerkinProjector::new(10)).unwrap();
        let s = sys(ModelKind::Burgers1d, ModelParams::default(), None, 10);
        let dt = 1e-3;
        let a = em_step(&x, &s, 0.0, dt).unwrap();
        let b = tamed_em_step(&x, &s, 0.0, dt).unwrap();
        let an = s.g_norm(&s.drift(&x).unwrap()).unwrap();
        assert!(s.g_norm(&a.sub(&b)).unwrap() <= dt * dt * an * an * (1.0 + 1e-9));
    }

    #[test]
    fn huge_noise_increment_is_bounded() {
        let g = TorusGrid::new(1, 16).unwrap();
        let x = SpectralField::from_fn(g, 1, |p| vec![p[0].sin()]);
        let x = galerkin_project(&x, GalerkinProjector::new(5)).unwrap();
        let s = sys(ModelKind::Zero, ModelParams::default(), NoiseSpec::new(1e6, 0.0, CaseLabel::I).ok(), 5);
        let (dw, dt) = (0.1, 0.01);
        let y = tamed_em_step(&x, &s, dw, dt).unwrap();
        let inc = s.g_norm(&y.sub(&x)).unwrap();
        let bn = 1e6 * s.g_norm(&x).unwrap();
        assert!(inc <= dw / (dt * bn) * (1.0 + 1e-12));
    }

    #[test]
    fn rk4_heat_mode() {
        let g = TorusGrid::new(1, 16).unwrap();
        let x = SpectralField::from_fn(g, 1, |p| vec![(2.0 * p[0]).sin()]);
        let x = galerkin_project(&x, GalerkinProjector::new(5)).unwrap();
        let s = sys(ModelKind::Heat, ModelParams { nu: 1.0, ..Default::default() }, None, 5);
        let err = |dt: f64| {
            let y = rk4_deterministic_step(&x, &s, dt).unwrap();
            max_diff(&y, &x.scaled((-4.0 * dt).exp()))
        };
        let (e1, e2) = (err(0.02), err(0.01));
        // local error O(dt^5)
        assert!((e1 / e2).log2() > 4.7, "{e1} {e2}");
    }

    #[test]
    fn steady_euler_state() {
        let g = TorusGrid::new(2, 32).unwrap();
        let w = SpectralField::from_fn(g, 1, |p| vec![p[0].cos() + p[1].cos()]);
        let w = galerkin_project(&w, GalerkinProjector::new(10)).unwrap();
        let s = sys(ModelKind::Vorticity2d, ModelParams::default(), None, 10);
        let mut y = w.clone();
        for _ in 0..1000 {
            y = rk4_deterministic_step(&y, &s, 0.01).unwrap();
        }
        assert!(max_diff(&y, &w) < 1e-10);
    }
}
