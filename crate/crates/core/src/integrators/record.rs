use serde::{Deserialize, Serialize};

use crate::spectral::SpectralField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Deterministic,
    Stochastic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlowupReason {
    /// `‖X‖_F0` reached the threshold.
    Threshold,
    /// Step halving reached `dt_min`.
    DtMin,
    /// The spectrum piled up at the cutoff.
    ResolutionLoss,
    NonFinite,
}

impl BlowupReason {
    pub fn as_str(self) -> &'static str {
        match self {
            BlowupReason::Threshold => "threshold",
            BlowupReason::DtMin => "dt_min",
            BlowupReason::ResolutionLoss => "resolution_loss",
            BlowupReason::NonFinite => "non_finite",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Tau,
    Rho,
    /// The control level `K` was doubled during a stochastic phase.
    Escalate,
}

/// A regime switch of the control strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub index: usize,
    pub time: f64,
    pub norm: f64,
    /// Target level (`L_hi` for tau, `L_lo` for rho, new `K` for escalations).
    pub level: f64,
}

/// One saved time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    #[serde(rename = "norm_G")]
    pub norm_g: f64,
    #[serde(rename = "norm_F0")]
    pub norm_f0: f64,
    #[serde(rename = "norm_F1")]
    pub norm_f1: f64,
    #[serde(rename = "norm_D")]
    pub norm_d: f64,
    #[serde(rename = "int_F1sq")]
    pub int_f1sq: f64,
    pub regime: Regime,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "QV")]
    pub qv: f64,
    pub flags: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub rows: Vec<TrajectoryRow>,
    pub blowup: Option<(f64, BlowupReason)>,
    pub seed: Option<u64>,
    pub config_hash: String,
    pub events: Vec<Event>,
    /// Suprema over every accepted step, not just saved rows.
    pub sup_f0sq: f64,
    pub sup_dsq: f64,
    pub min_f0: f64,
    pub int_f1sq: f64,
    /// `E(ε)` record of the martingale diagnostics.
    pub e_record: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub positivity_warnings: usize,
    /// Largest logged residual of the stochastic-phase envelope check.
    pub envelope_residual: f64,
    #[serde(skip)]
    pub snapshots: Vec<(f64, SpectralField)>,
}

impl TrajectoryRecord {
    pub fn t_final(&self) -> f64 {
        self.rows.last().map(|r| r.t).unwrap_or(0.0)
    }

    pub fn blew_up(&self) -> bool {
        self.blowup.is_some()
    }

    pub fn final_row(&self) -> Option<&TrajectoryRow> {
        self.rows.last()
    }

    /// Events of one kind, in order.
    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.kind == kind)
    }
}
