//! Experiment runner for the `superabsorb` simulator: resolves a
//! configuration, runs the simulations and writes CSV data plus a JSON
//! summary per experiment.

pub mod config;
mod error;
pub mod experiments;
pub mod output;

pub use config::{ConfigFile, ExperimentKind, ExperimentSpec, Overrides, Preset, Sweep};
pub use error::{CliError, EXIT_CONFIG, EXIT_NUMERICAL};
pub use experiments::{run_experiment, RunOutput};

/// Environment variable capping the number of worker threads.
pub const WORKERS_ENV: &str = "SUPERABSORB_WORKERS";

/// Worker cap from [`WORKERS_ENV`], if set.
pub fn workers_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}
