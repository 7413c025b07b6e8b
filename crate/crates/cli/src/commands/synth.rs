//! `smrc synth`: emit a deterministic synthetic dataset.

use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use smrc_core::eval::serialize_mseb;
use smrc_core::synth::synth_records;

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Number of problems to emit.
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Operations per problem (canonical solutions have this many steps).
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Generation seed; output is deterministic in (count, k, seed).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path (line-delimited JSON, MSEB schema).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: SynthArgs) -> anyhow::Result<()> {
    anyhow::ensure!(args.count > 0, "--count must be >= 1");
    let records = synth_records(args.count, args.k, args.seed)?;
    std::fs::write(&args.out, serialize_mseb(&records))
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "wrote {} records (k={}, seed={}) to {}",
        records.len(),
        args.k,
        args.seed,
        args.out.display()
    );
    Ok(())
}
