//! Time stepping for the projected equation
//! `dX = T_d A(X) dt + θ‖X‖^α X dW` and for the deterministic PDE.

mod config;
mod path;
mod record;
mod steppers;

pub use config::{Scheme, StepperConfig};
pub use path::{integrate_path, resolution_tail_share, Advance, PathRunner, ENVELOPE_OFFSET};
pub use record::{BlowupReason, Event, EventKind, Regime, TrajectoryRecord, TrajectoryRow};
pub use steppers::{
    em_step, milstein_step, rk4_deterministic_step, step, tamed_em_step, tamed_rk4_step,
    ProjectedSde,
};
