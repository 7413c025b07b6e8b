//! `smrc build-rewards`: rollout trees, leaf labels, propagated values,
//! and training-record export per problem.

use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use rayon::prelude::*;
use smrc_core::reward::{
    build_rollout_tree, export_training_records, label_leaves, propagate_rewards, TrainingRecord,
    TreeSnapshot, DEFAULT_NODE_CAP,
};

use crate::backend::{Backend, BackendKind, RemoteFlags};
use crate::records::{load_dataset, problem_for, record_id, Format};

#[derive(Args, Debug)]
pub struct BuildRewardsArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Mseb)]
    pub format: Format,
    #[arg(long, value_enum, default_value_t = BackendKind::Oracle)]
    pub backend: BackendKind,
    /// Children requested per node.
    #[arg(long, default_value_t = 2)]
    pub branching: usize,
    /// Maximum tree depth.
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    /// Hard cap on nodes per tree.
    #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
    pub node_cap: usize,
    /// Tree snapshots, one JSON document per line: {id, tree}.
    #[arg(long)]
    pub out_tree: PathBuf,
    /// Training records, one JSON object per line.
    #[arg(long)]
    pub out_records: PathBuf,
    /// Worker threads (default: logical cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Seed for any seeded component (remote retry jitter).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub remote: RemoteFlags,
}

pub fn run(args: BuildRewardsArgs) -> anyhow::Result<()> {
    let records = load_dataset(&args.dataset, args.format)?;
    let backend = Backend::build(args.backend, &args.remote, args.seed)?;

    let jobs = if backend.supports_concurrency() {
        args.jobs.unwrap_or(0)
    } else {
        1
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("worker pool")?;

    type TaskOutcome = (usize, anyhow::Result<(TreeSnapshot, Vec<TrainingRecord>)>);
    let outcomes: Vec<TaskOutcome> =
        pool.install(|| {
            records
                .par_iter()
                .enumerate()
                .map(|(index, record)| {
                    let outcome = (|| {
                        let problem = problem_for(record, index)?;
                        let tree = build_rollout_tree(
                            &problem,
                            &*backend.generator,
                            args.branching,
                            args.depth,
                            args.node_cap,
                        )?;
                        let tree = label_leaves(tree, &*backend.answer_judge, &problem)?;
                        let tree = propagate_rewards(tree)?;
                        let training = export_training_records(&tree, &problem)?;
                        Ok((tree.to_snapshot(), training))
                    })();
                    (index, outcome)
                })
                .collect()
        });

    let mut ordered = outcomes;
    ordered.sort_by_key(|(index, _)| *index);

    let mut tree_out = std::io::BufWriter::new(
        std::fs::File::create(&args.out_tree)
            .with_context(|| format!("creating {}", args.out_tree.display()))?,
    );
    let mut record_out = std::io::BufWriter::new(
        std::fs::File::create(&args.out_records)
            .with_context(|| format!("creating {}", args.out_records.display()))?,
    );

    let mut failures = 0usize;
    let mut nodes = 0usize;
    let mut exported = 0usize;
    for (index, outcome) in &ordered {
        match outcome {
            Ok((snapshot, training)) => {
                nodes += snapshot.nodes.len();
                exported += training.len();
                let line = serde_json::json!({
                    "id": record_id(*index),
                    "tree": snapshot,
                });
                serde_json::to_writer(&mut tree_out, &line)?;
                tree_out.write_all(b"\n")?;
                for record in training {
                    serde_json::to_writer(&mut record_out, record)?;
                    record_out.write_all(b"\n")?;
                }
            }
            Err(error) => {
                failures += 1;
                eprintln!("record {} failed: {error:#}", record_id(*index));
            }
        }
    }
    tree_out.flush()?;
    record_out.flush()?;

    println!(
        "built {}/{} trees ({nodes} nodes, {exported} training records) -> {}, {}",
        ordered.len() - failures,
        ordered.len(),
        args.out_tree.display(),
        args.out_records.display()
    );
    anyhow::ensure!(failures < ordered.len(), "all {} records failed", ordered.len());
    Ok(())
}
