//! Configuration, persistence, run drivers, convergence studies and the
//! acceptance suite.

pub mod acceptance;
pub mod config;
pub mod mms;
pub mod oracles;
pub mod run;
pub mod series;
pub mod sweep;

pub use acceptance::{
    acceptance_suite, AcceptanceOptions, AcceptanceReport, CriterionResult, SuiteLimits, CRITERIA,
};
pub use config::{load_config, parse_config, write_config, GridSpec, Outputs, RunConfig, KEYS};
pub use mms::{
    mms_convergence, mms_convergence_with, mms_solve, MmsLevel, MmsReport, MmsSettings, MmsStudy,
};
pub use run::{
    property, run_simulation, run_simulation_with, PropertyVerdict, RunExtremes, RunReport,
    Simulation, Thresholds,
};
pub use series::{read_series, read_snapshot, write_series, write_snapshot, SeriesWriter};
pub use sweep::{
    config_for_beta, keyed_path, run_many, sweep, SweepEntry, SweepReport, DEFAULT_BETAS,
    THREADS_ENV,
};
