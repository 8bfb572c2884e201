use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    EulerMaruyama,
    TamedEulerMaruyama,
    /// Classical RK4 drift increment, tamed, plus the tamed noise increment.
    TamedRk4Maruyama,
    /// Euler–Maruyama plus the closed-form Milstein term of the rank-one
    /// noise.
    Milstein,
    Rk4Deterministic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StepperConfig {
    pub scheme: Scheme,
    pub dt: f64,
    /// Defaults to `dt·2^-20`.
    pub dt_min: Option<f64>,
    pub adapt: bool,
    /// Relative growth of `‖X‖_F0` over one step that triggers halving.
    pub growth_trigger: f64,
    /// Defaults to `1e8·(1 + ‖X0‖_F0)`.
    pub blowup_threshold: Option<f64>,
    pub t_end: f64,
    /// Save a row every this many base steps.
    pub save_every: usize,
    /// Flag loss of resolution once this share of `‖X‖²_F0` sits in the
    /// outer third of the retained band (`|k|_∞ > 2d/3`).
    pub resolution_tail: Option<f64>,
    /// Keep the state at every saved row.
    pub keep_snapshots: bool,
}

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig {
            scheme: Scheme::TamedEulerMaruyama,
            dt: 1e-3,
            dt_min: None,
            adapt: true,
            growth_trigger: 0.1,
            blowup_threshold: None,
            t_end: 1.0,
            save_every: 10,
            resolution_tail: None,
            keep_snapshots: false,
        }
    }
}

impl StepperConfig {
    pub fn dt_min(&self) -> f64 {
        self.dt_min.unwrap_or(self.dt * 2f64.powi(-20))
    }

    pub fn threshold(&self, initial_f0: f64) -> f64 {
        self.blowup_threshold.unwrap_or(1e8 * (1.0 + initial_f0))
    }

    pub fn validate(&self, initial_f0: f64) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        let m = self.dt_min();
        if !(m > 0.0 && m < self.dt) {
            return Err(Error::Config(format!("need 0 < dt_min < dt, got {m}")));
        }
        if self.dt / m > (super::super::noise::TICKS_PER_STEP as f64) {
            return Err(Error::Config("dt_min is finer than the Wiener path resolution".into()));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config("t_end must be finite and non-negative".into()));
        }
        if !(self.threshold(initial_f0) > initial_f0) {
            return Err(Error::Config(format!(
                "blowup_threshold {} must exceed the initial norm {initial_f0}",
                self.threshold(initial_f0)
            )));
        }
        if self.save_every == 0 {
            return Err(Error::Config("save_every must be at least 1".into()));
        }
        if !(self.growth_trigger > 0.0) {
            return Err(Error::Config("growth_trigger must be positive".into()));
        }
        if let Some(r) = self.resolution_tail {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::Config("resolution_tail must lie in (0, 1)".into()));
            }
        }
        Ok(())
    }
}
