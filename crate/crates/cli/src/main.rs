use std::path::PathBuf;

use anyhow::{anyhow, Result};
use clap::{Parser, Subcommand};

use ppbench_cli::commands::{cmd_example_fit, cmd_run, cmd_solve, parse_trace_kind};
use ppbench_cli::config::{apply_overrides, load_config, Overrides};

/// Surrogate-data benchmark of a lightly penalized lasso against composite
/// regression: reproducible replication grids, example fits, and a solver
/// inspector.
#[derive(Parser)]
#[command(name = "ppbench", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the replication grid and write results.csv, summary.json, and
    /// boxplot SVGs.
    Run {
        /// TOML config file; defaults reproduce the published grid.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Master seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Replications-per-cell override.
        #[arg(long)]
        reps: Option<usize>,
        /// Worker thread override (0 = one per CPU).
        #[arg(long)]
        workers: Option<usize>,
        /// Holdout scheme override: end, interior, or end,interior.
        #[arg(long)]
        holdout: Option<String>,
    },
    /// Write the fitted trajectory of one illustrative replication as CSV.
    ExampleFit {
        /// randomwalk-lasso or whitenoise-composite.
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output CSV path.
        #[arg(long, default_value = "example_fit.csv")]
        out: PathBuf,
    },
    /// Fit the lasso on a CSV design/response pair and print diagnostics.
    Solve {
        /// Design matrix CSV (one series per column, optional header).
        matrix: PathBuf,
        /// Response CSV (single column, optional header).
        response: PathBuf,
        /// Penalty as a fraction of lambda_max.
        #[arg(long, default_value_t = 0.05)]
        lambda_fraction: f64,
    },
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            reps,
            workers,
            holdout,
        } => {
            let mut run_config = load_config(config.as_deref())?;
            apply_overrides(
                &mut run_config,
                &Overrides {
                    seed,
                    reps,
                    workers,
                    holdout,
                },
            )?;
            cmd_run(&run_config, &out)
        }
        Command::ExampleFit { kind, seed, out } => {
            let trace_kind = parse_trace_kind(&kind).ok_or_else(|| {
                anyhow!("unknown kind '{kind}' (expected randomwalk-lasso or whitenoise-composite)")
            })?;
            cmd_example_fit(trace_kind, seed, &out)
        }
        Command::Solve {
            matrix,
            response,
            lambda_fraction,
        } => cmd_solve(&matrix, &response, lambda_fraction),
    }
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
