//! `oamsim` — scenario runner CLI.
//!
//! Exit codes: 0 success, 1 validation error (bad config or flags),
//! 2 runtime error (simulation, reconstruction, or I/O failure).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use oamsim_cli::config::{ExperimentConfig, Mode, Scenario};
use oamsim_cli::error::CliError;
use oamsim_cli::report::{emit_csv, emit_json};
use oamsim_cli::scenario::run_scenario;

#[derive(Parser)]
#[command(
    name = "oamsim",
    about = "Simulate OAM-entanglement frequency up-conversion experiments",
    disable_version_flag = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config and write its report.
    Run {
        /// Path to the JSON scenario config.
        config: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's mode.
        #[arg(long)]
        mode: Option<Mode>,
        /// Output directory (default: $OAMSIM_OUT or the current directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report format.
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
    },
    /// Parse and validate a scenario config without running it.
    Validate {
        /// Path to the JSON scenario config.
        config: PathBuf,
    },
    /// List the available scenarios.
    ListScenarios,
    /// Print the toolkit version.
    Version,
}

fn read_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ExperimentConfig::from_json(&text)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("OAMSIM_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run {
            config,
            seed,
            mode,
            out,
            format,
        } => {
            let mut cfg = read_config(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(mode) = mode {
                cfg.mode = mode;
            }
            let report = run_scenario(&cfg)?;
            let dir = out_dir(out);
            if !dir.exists() {
                fs::create_dir_all(&dir).map_err(|source| CliError::Io {
                    path: dir.display().to_string(),
                    source,
                })?;
            }
            match format {
                OutputFormat::Json => {
                    let path = dir.join("report.json");
                    write_file(&path, &emit_json(&report))?;
                    println!("wrote {}", path.display());
                }
                OutputFormat::Csv => {
                    for (name, contents) in emit_csv(&report) {
                        let path = dir.join(name);
                        write_file(&path, &contents)?;
                        println!("wrote {}", path.display());
                    }
                }
            }
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = read_config(&config)?;
            cfg.validate()?;
            println!("ok: {} scenario `{}`", config.display(), cfg.scenario);
            Ok(())
        }
        Command::ListScenarios => {
            for scenario in Scenario::all() {
                println!("{:<20} {}", scenario.name(), scenario.blurb());
            }
            Ok(())
        }
        Command::Version => {
            println!("oamsim {}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
