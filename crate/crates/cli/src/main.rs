mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Context;
use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "decohere",
    version,
    about = "Noisy monitored Clifford circuits and their replica model"
)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a config leaf, e.g. `--set sweep.p=[0.1,0.2]`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (overrides `threads`).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One trajectory, written as a time series.
    Simulate,
    /// Averages over a (L, p, q) grid plus a region map.
    Sweep,
    /// Scaling fits of a sweep table.
    Fit {
        /// Sweep CSV (overrides `fit.input`).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Partition functions and symmetry audit of the replica model.
    Statmech,
    /// Tableau engine against dense density matrices.
    OracleCheck,
}

fn run(cli: Cli) -> Result<String, CliError> {
    let mut config = config::load(cli.config.as_deref(), &cli.overrides)?;
    if let Some(t) = cli.threads {
        config.threads = t;
    }
    if config.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("threads: {e}")))?;
    }
    let out_dir = commands::out_dir(&config, cli.out.as_deref());
    let fit_input = match &cli.command {
        Command::Fit { input } => input.clone(),
        _ => None,
    };
    let ctx = Context {
        config,
        out_dir,
        fit_input,
    };
    match cli.command {
        Command::Simulate => commands::simulate(&ctx),
        Command::Sweep => commands::sweep(&ctx),
        Command::Fit { .. } => commands::fit(&ctx),
        Command::Statmech => commands::statmech(&ctx),
        Command::OracleCheck => commands::oracle_check(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
