//! Run configuration files and output serialization.

mod config;
mod output;

pub use config::{
    load_config, parse_config, AdvisorKeyword, EnsembleSection, Format, InitialSection, ModelSection,
    NoiseSection, OutputSection, RunConfig, ThetaChoice, Topography,
};
pub use output::{
    read_csv_rows, read_trajectory, resolve_seed, write_aldous_csv, write_control_csv, write_json,
    write_key_values, write_trajectory, Provenance, TrajectorySummary, ALDOUS_HEADER, CONTROL_HEADER,
    SEED_ENV, TRAJECTORY_COLUMNS,
};
