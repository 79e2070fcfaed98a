use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use monrisk::axioms::default_profile;
use monrisk_cli::commands::{self, AxiomRun, Outcome};
use monrisk_cli::config::{load_profile, DEFAULT_SEED};
use monrisk_cli::{ingest, CliResult, OutputFormat, ReportConfig, ScenarioFormat, ScenarioTable};

/// Risk measures over scenario tables.
#[derive(Parser)]
#[command(name = "risk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every configured measure on every position
    Report {
        /// Scenario file (.csv, or .json)
        file: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Run the randomized axiom suites against an expected-property profile
    CheckAxioms {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Trials for the acceptance-set checks [default: min(trials, 1000)]
        #[arg(long)]
        acceptance_trials: Option<usize>,
        /// Profile file; the built-in catalogue profile when omitted
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Compare primal values with the dual representation
    DualCheck {
        file: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's dual tolerance
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Stochastic dominance verdicts between two positions
    Dominance {
        file: PathBuf,
        #[arg(long = "x")]
        x: String,
        #[arg(long = "y")]
        y: String,
        /// Optional config for the α-grid sweep and dominance slack
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn scenarios(path: &Path) -> CliResult<ScenarioTable> {
    ingest(path, ScenarioFormat::from_path(path))
}

fn run(cli: Cli) -> CliResult<Outcome> {
    match cli.command {
        Command::Report {
            file,
            config,
            format,
        } => {
            let table = scenarios(&file)?;
            let config = ReportConfig::load(&config)?;
            Ok(commands::report_cmd(&table, &config, format))
        }
        Command::CheckAxioms {
            seed,
            trials,
            acceptance_trials,
            profile,
        } => {
            let profile = match profile {
                Some(p) => load_profile(&p)?,
                None => default_profile(),
            };
            let run = AxiomRun {
                seed,
                trials,
                acceptance_trials: acceptance_trials.unwrap_or(trials.min(1000)),
            };
            commands::check_axioms_cmd(&profile, run)
        }
        Command::DualCheck { file, config, tol } => {
            let table = scenarios(&file)?;
            let config = ReportConfig::load(&config)?;
            let tol = tol.unwrap_or(config.tolerances.dual);
            commands::dual_check_cmd(&table, &config, tol)
        }
        Command::Dominance { file, x, y, config } => {
            let table = scenarios(&file)?;
            let config = match config {
                Some(c) => ReportConfig::load(&c)?,
                None => ReportConfig::default(),
            };
            commands::dominance_cmd(&table, &x, &y, &config)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            print!("{}", outcome.output);
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
