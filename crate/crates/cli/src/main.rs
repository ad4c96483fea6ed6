//! `coulomb-edge`: runs the kernel experiments from JSON configs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use coulomb_edge_cli::{commands, load, CliError};

#[derive(Parser)]
#[command(name = "coulomb-edge", version, about = "Edge kernel experiments for planar Coulomb gases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Io {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a limit kernel on a grid.
    Limits(Io),
    /// Rescaled finite-n kernels against their limit over a list of n.
    Converge(Io),
    /// Trial-kernel diagnostics: local comparison, masses, lower bound.
    Trial(Io),
    /// Exact samples and empirical densities.
    Sample(Io),
    /// Isometry and reproducing-kernel residuals of the limit spaces.
    Spaces(Io),
}

fn run(cli: Cli) -> Result<commands::Outcome, CliError> {
    let (io, cmd) = match &cli.command {
        Command::Limits(io) => (io, "limits"),
        Command::Converge(io) => (io, "converge"),
        Command::Trial(io) => (io, "trial"),
        Command::Sample(io) => (io, "sample"),
        Command::Spaces(io) => (io, "spaces"),
    };
    commands::ensure_dir(&io.out)?;
    match cmd {
        "limits" => commands::limits(&load(&io.config)?, &io.out),
        "converge" => commands::converge(&load(&io.config)?, &io.out),
        "trial" => commands::trial(&load(&io.config)?, &io.out),
        "sample" => commands::sample(&load(&io.config)?, &io.out),
        _ => commands::spaces(&load(&io.config)?, &io.out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(o) => {
            println!("{}", serde_json::to_string_pretty(&o.summary).unwrap_or_default());
            if o.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
