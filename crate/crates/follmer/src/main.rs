//! Thin command-line front end; all logic lives in `follmer::runner`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use follmer::runner::{cmd_compare, cmd_constants, cmd_run, cmd_verify, CliOverrides};

#[derive(Parser)]
#[command(
    name = "follmer",
    version,
    about = "Schrödinger–Föllmer sampling experiments: batch runs, baselines, and theory checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the configured sampler batch; writes runs.csv, summary.json, manifest.json
    Run(CommonArgs),
    /// Run sampler and baseline at matched budgets; writes comparison.json and per-run CSVs
    Compare(CommonArgs),
    /// Run the configured theory checks; writes verification.json
    Verify(CommonArgs),
    /// Compute the theoretical constants report; writes constants.json
    Constants(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON experiment config
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's output_dir)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    workers: Option<usize>,
    /// Master seed (overrides the config's master_seed)
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (run, args): (fn(&std::path::Path, &CliOverrides) -> _, CommonArgs) = match cli.command {
        Command::Run(a) => (cmd_run, a),
        Command::Compare(a) => (cmd_compare, a),
        Command::Verify(a) => (cmd_verify, a),
        Command::Constants(a) => (cmd_constants, a),
    };
    let overrides = CliOverrides {
        out_dir: args.out,
        workers: args.workers,
        master_seed: args.seed,
    };
    match run(&args.config, &overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
