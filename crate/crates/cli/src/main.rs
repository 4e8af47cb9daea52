//! `lilaw-lab`: runs noisy-label weighting experiments from a TOML config.

mod config;
mod experiment;
mod summary;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::{diagnose, parse, LoadedConfig};

#[derive(Parser)]
#[command(name = "lilaw-lab", version, about = "Train baseline and LiLAW-weighted models on noisy labels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a config, then train every condition and write CSV artifacts.
    Run { config: PathBuf },
    /// Report every problem in a config without training.
    Validate { config: PathBuf },
    /// Rebuild summary.csv from the runlogs in a directory.
    Summarize { dir: PathBuf },
}

/// Loads and validates `path`, printing diagnostics to stderr. `None` means
/// at least one problem was found.
fn load(path: &Path) -> Result<Option<LoadedConfig>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let loaded = match parse(&text, base) {
        Ok(l) => l,
        Err(d) => {
            eprintln!("{}", d.render(path));
            return Ok(None);
        }
    };
    let diags = diagnose(&loaded);
    for d in &diags {
        eprintln!("{}", d.render(path));
    }
    Ok(diags.is_empty().then_some(loaded))
}

fn main_inner(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate { config } => Ok(match load(&config)? {
            Some(_) => {
                println!("{}: ok", config.display());
                ExitCode::SUCCESS
            }
            None => ExitCode::FAILURE,
        }),
        Command::Run { config } => match load(&config)? {
            Some(loaded) => {
                let summary = experiment::run(&loaded)?;
                println!("{}", summary.display());
                Ok(ExitCode::SUCCESS)
            }
            None => Ok(ExitCode::FAILURE),
        },
        Command::Summarize { dir } => {
            let rows = summary::from_runlogs(&summary::runlogs_in(&dir)?)?;
            let path = dir.join(summary::FILE_NAME);
            std::fs::write(&path, summary::to_csv(&rows)).with_context(|| format!("writing {}", path.display()))?;
            println!("{}", path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
