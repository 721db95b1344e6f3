mod commands;
mod config;
mod error;
mod plot;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Parser)]
#[command(version, about = "Single-rebalance variance-optimal hedging of a perpetual American put")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: RunConfig,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Perpetual put price, delta, exercise boundary and characteristic roots
    Price,
    /// Optimal rebalancing boundaries for one holding or an h-grid (CSV)
    Boundaries,
    /// Optimal initial holding at --spot, or h*(x) over an x-grid (CSV)
    Optimize,
    /// Five-strategy tracking-error sweep over spot, sigma or b (CSV)
    Simulate,
    /// Half-line variants: --mode zero-mean or --mode superhedge
    Halfline,
    /// Boundary curves x1*(h), x2*(h) over the holding range (CSV)
    Curves,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = cli.config.resolve()?;
    if let Some(dir) = &cfg.out {
        cfg.save(dir)?;
    }
    match cli.command {
        Command::Price => commands::price(&cfg)?,
        Command::Boundaries => commands::boundaries(&cfg)?,
        Command::Optimize => commands::optimize(&cfg)?,
        Command::Simulate => commands::simulate(&cfg)?,
        Command::Halfline => commands::halfline(&cfg)?,
        Command::Curves => commands::curves(&cfg)?,
    }
    if cfg.emit_plot_data == Some(true) {
        plot::emit_all(&cfg)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
