use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use camreid::commands::{self, EstimateArgs, EvaluateArgs, Outcome, SimulateArgs, StatsArgs};

/// Cross-camera re-identification with transition priors.
#[derive(Parser)]
#[command(name = "camreid", version)]
struct Cli {
    /// Overrides the seed of a simulation config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for similarity and ranking (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Additive smoothing for transition estimation.
    #[arg(long, global = true, default_value_t = 0.0)]
    alpha: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic world from a key = value config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Path of the full NDJSON dataset; siblings are written next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate the camera transition matrix from labeled training data.
    Estimate {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank, score and report CMC before/after the transition prior.
    Evaluate {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(
            long,
            required_unless_present = "appearance_only",
            conflicts_with = "appearance_only"
        )]
        transitions: Option<PathBuf>,
        #[arg(long)]
        appearance_only: bool,
        #[arg(long)]
        out_dir: PathBuf,
        /// Matches kept per query in ranking CSVs.
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Entry/exit and per-camera counts of labeled data.
    Stats {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> camreid::Result<Outcome> {
    match &cli.command {
        Command::Simulate { config, out } => commands::simulate(&SimulateArgs {
            config,
            out,
            seed: cli.seed,
            threads: cli.threads,
        }),
        Command::Estimate { graph, train, out } => commands::estimate(&EstimateArgs {
            graph,
            train,
            alpha: cli.alpha,
            out,
        }),
        Command::Evaluate {
            graph,
            test,
            transitions,
            appearance_only: _,
            out_dir,
            top,
        } => commands::evaluate(&EvaluateArgs {
            graph,
            test,
            transitions: transitions.as_deref(),
            out_dir,
            top: Some(*top),
            threads: cli.threads,
        }),
        Command::Stats { input, out } => commands::stats(&StatsArgs { input, out }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            for d in &outcome.diagnostics {
                eprintln!("warning: {d}");
            }
            for p in &outcome.outputs {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.kind().exit_code() as u8)
        }
    }
}
