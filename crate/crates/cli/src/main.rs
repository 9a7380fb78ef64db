use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use superabsorb::ErgotropyReference;
use superabsorb_cli::{
    run_experiment, workers_from_env, CliError, ConfigFile, ExperimentKind, ExperimentSpec, Overrides, Preset,
};

/// Superabsorption quantum battery experiments.
#[derive(Parser)]
#[command(name = "superabsorb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON configuration; unset fields keep the preset values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (created if missing).
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Number of time samples per trajectory.
    #[arg(long, global = true, value_name = "N")]
    samples: Option<usize>,

    #[arg(long, global = true, value_enum, default_value = "paper-defaults")]
    preset: PresetArg,

    /// Reference for the 80% ergotropy charging threshold.
    #[arg(long, global = true, value_enum)]
    ergotropy_reference: Option<ReferenceArg>,

    /// Extend the charging sweep to larger N until charging fails.
    #[arg(long, global = true)]
    breakdown_probe: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// P01 of the exact and effective models for several ω_A.
    CompareOmega,
    /// P01 of the exact and effective models for several δ/(gN).
    CompareDelta,
    /// All four battery populations of the exact model.
    Populations,
    /// Charging time against N with a log-log scaling fit.
    ChargingSweep,
    /// Separable and single-charger reference curves.
    Baselines,
    /// Validity-condition diagnostics.
    Validity,
}

#[derive(ValueEnum, Clone, Copy)]
enum PresetArg {
    PaperDefaults,
}

#[derive(ValueEnum, Clone, Copy)]
enum ReferenceArg {
    Stored,
    Trajectory,
}

impl From<Command> for ExperimentKind {
    fn from(c: Command) -> Self {
        match c {
            Command::CompareOmega => ExperimentKind::CompareOmega,
            Command::CompareDelta => ExperimentKind::CompareDelta,
            Command::Populations => ExperimentKind::Populations,
            Command::ChargingSweep => ExperimentKind::ChargingSweep,
            Command::Baselines => ExperimentKind::Baselines,
            Command::Validity => ExperimentKind::Validity,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(workers) = workers_from_env()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let config = match &cli.config {
        Some(path) => ConfigFile::from_path(path)?,
        None => ConfigFile::default(),
    };
    let preset = match cli.preset {
        PresetArg::PaperDefaults => Preset::PaperDefaults,
    };
    let overrides = Overrides {
        samples: cli.samples,
        ergotropy_reference: cli.ergotropy_reference.map(|r| match r {
            ReferenceArg::Stored => ErgotropyReference::Stored,
            ReferenceArg::Trajectory => ErgotropyReference::Trajectory,
        }),
        breakdown_probe: cli.breakdown_probe,
    };
    let spec = ExperimentSpec::resolve(cli.command.into(), preset, &config, &overrides)?;
    let output = run_experiment(&spec, &cli.out)?;
    for file in output.files {
        println!("{}", file.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
