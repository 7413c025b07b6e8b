//! `smrc`: batch driver for dataset generation, reward-tree building,
//! search-based correction, and evaluation.

mod backend;
mod commands;
mod records;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "smrc",
    version,
    about = "Reward-guided tree search that corrects multi-step solutions while retaining correct steps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset in the MSEB record schema.
    Synth(commands::synth::SynthArgs),
    /// Build rollout trees per problem and export process-supervision records.
    BuildRewards(commands::build_rewards::BuildRewardsArgs),
    /// Correct every record with the chosen search algorithm.
    Correct(commands::correct::CorrectArgs),
    /// Score correction results against their dataset.
    Evaluate(commands::evaluate::EvaluateArgs),
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Synth(args) => commands::synth::run(args),
        Command::BuildRewards(args) => commands::build_rewards::run(args),
        Command::Correct(args) => commands::correct::run(args),
        Command::Evaluate(args) => commands::evaluate::run(args),
    };
    if let Err(error) = outcome {
        eprintln!("error: {error:#}");
        std::process::exit(1);
    }
}
