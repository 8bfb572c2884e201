//! Monte Carlo studies and statistical checks.

mod stats;

pub use stats::{kolmogorov_q, ks_test, mann_kendall, median, wilson_interval, z_for, Counts, KsResult, MannKendall};
mod studies;

pub use studies::{
    exp_law_study, gbm_study, revuz_yor_study, strong_order_study, ExpLawReport, GbmRow, RevuzYorRow,
    StrongOrderReport,
};
mod audit;

pub use audit::{ascend_energy_ratio, assumption_audit, AuditConfig, AuditReport, AuditSample};
mod ensemble;
mod initial;

pub use ensemble::{
    aldous_stats, aldous_table, d_space_control_report, run_ensemble, uniform_control_report, AldousConfig,
    AldousRow, AldousTable, ControlRow, EnsembleConfig, EnsembleOutput, PathSummary, SummaryStats,
    ThresholdReport, UniformControlReport,
};
pub use initial::InitialCondition;
