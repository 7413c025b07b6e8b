//! `smrc correct`: run the chosen search over every record.

use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use rayon::prelude::*;
use smrc_core::domain::DecomposePolicy;
use smrc_core::search::{run_bfs, run_dfs, run_mcts, SearchConfig, SearchOutcome};

use crate::backend::{Backend, BackendKind, RemoteFlags};
use crate::records::{attempt_for, load_dataset, problem_for, record_id, Format, ResultLine};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SearchKind {
    Mcts,
    Bfs,
    Dfs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum DecomposeKind {
    /// One step per non-blank line.
    LineSplit,
    /// Split on `Steps N:` markers.
    NumberedMarkers,
    /// Run the decomposition prompt against the remote endpoint.
    External,
}

#[derive(Args, Debug)]
pub struct CorrectArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Mseb)]
    pub format: Format,
    #[arg(long, value_enum, default_value_t = BackendKind::Oracle)]
    pub backend: BackendKind,
    #[arg(long, value_enum, default_value_t = SearchKind::Mcts)]
    pub search: SearchKind,
    /// UCT exploration constant.
    #[arg(short = 'c', long, default_value_t = 0.4)]
    pub exploration: f64,
    /// Maximum search iterations (T).
    #[arg(long, default_value_t = 30)]
    pub max_iterations: u32,
    /// Reward threshold for early termination.
    #[arg(long, default_value_t = 0.95)]
    pub threshold: f64,
    /// Maximum feedback rounds per expansion.
    #[arg(long, default_value_t = 4)]
    pub feedback_max: u32,
    /// Full subset enumeration up to this many student steps.
    #[arg(long, default_value_t = 12)]
    pub enum_cap: usize,
    /// Per-layer beam width beyond the enumeration cap.
    #[arg(long, default_value_t = 64)]
    pub beam_width: usize,
    /// Start initialization nodes unvisited instead of seeding W=v, N=1.
    #[arg(long)]
    pub no_seed_visits: bool,
    /// How to split student answers into steps.
    #[arg(long, value_enum, default_value_t = DecomposeKind::LineSplit)]
    pub decompose: DecomposeKind,
    /// Results file (one JSON object per record per repeat).
    #[arg(long)]
    pub out: PathBuf,
    /// Optional search-trace file (line-delimited JSON events).
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Independent repetitions of the whole run.
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    /// Worker threads (default: logical cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Seed for any seeded component (remote retry jitter).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub remote: RemoteFlags,
}

impl CorrectArgs {
    fn search_config(&self) -> SearchConfig {
        SearchConfig {
            exploration: self.exploration,
            max_iterations: self.max_iterations,
            threshold: self.threshold,
            feedback_max: self.feedback_max,
            enum_cap: self.enum_cap,
            beam_width: self.beam_width,
            seed_visits: !self.no_seed_visits,
        }
    }

    fn decompose_policy(&self) -> anyhow::Result<DecomposePolicy> {
        Ok(match self.decompose {
            DecomposeKind::LineSplit => DecomposePolicy::LineSplit,
            DecomposeKind::NumberedMarkers => DecomposePolicy::NumberedMarkers,
            DecomposeKind::External => {
                anyhow::ensure!(
                    matches!(self.backend, BackendKind::Remote),
                    "--decompose external requires --backend remote"
                );
                let remote = crate::backend::build_remote(&self.remote, self.seed)?;
                DecomposePolicy::External(std::sync::Arc::new(remote))
            }
        })
    }
}

pub fn run(args: CorrectArgs) -> anyhow::Result<()> {
    anyhow::ensure!(args.repeats >= 1, "--repeats must be >= 1");
    let records = load_dataset(&args.dataset, args.format)?;
    let backend = Backend::build(args.backend, &args.remote, args.seed)?;
    let config = args.search_config();
    let policy = args.decompose_policy()?;

    let runner = match args.search {
        SearchKind::Mcts => run_mcts,
        SearchKind::Bfs => run_bfs,
        SearchKind::Dfs => run_dfs,
    };

    // A backend that does not tolerate concurrent calls is serialized by
    // running single-threaded.
    let jobs = if backend.supports_concurrency() {
        args.jobs.unwrap_or(0)
    } else {
        1
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("worker pool")?;

    let tasks: Vec<(usize, usize)> = (0..args.repeats)
        .flat_map(|repeat| (0..records.len()).map(move |index| (repeat, index)))
        .collect();

    type TaskOutcome = (usize, usize, anyhow::Result<(ResultLine, SearchOutcome)>);
    let outcomes: Vec<TaskOutcome> =
        pool.install(|| {
            tasks
                .par_iter()
                .map(|&(repeat, index)| {
                    let outcome = correct_one(
                        &records[index],
                        index,
                        repeat,
                        runner,
                        &backend,
                        &config,
                        &policy,
                    );
                    (repeat, index, outcome)
                })
                .collect()
        });

    let mut ordered = outcomes;
    ordered.sort_by_key(|(repeat, index, _)| (*repeat, *index));

    let mut out = std::io::BufWriter::new(
        std::fs::File::create(&args.out)
            .with_context(|| format!("creating {}", args.out.display()))?,
    );
    let mut trace_out = match &args.trace {
        Some(path) => Some(std::io::BufWriter::new(
            std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => None,
    };

    let total = ordered.len();
    let mut failures = 0usize;
    for (repeat, index, outcome) in ordered {
        match outcome {
            Ok((line, search)) => {
                serde_json::to_writer(&mut out, &line)?;
                out.write_all(b"\n")?;
                if let Some(trace_out) = trace_out.as_mut() {
                    for event in search.trace.events() {
                        let mut value = serde_json::to_value(event)?;
                        value["id"] = serde_json::Value::String(line.id.clone());
                        value["repeat"] = serde_json::Value::from(repeat);
                        serde_json::to_writer(&mut *trace_out, &value)?;
                        trace_out.write_all(b"\n")?;
                    }
                }
            }
            Err(error) => {
                failures += 1;
                eprintln!("record {} (repeat {repeat}) failed: {error:#}", record_id(index));
            }
        }
    }
    out.flush()?;
    if let Some(mut trace_out) = trace_out {
        trace_out.flush()?;
    }

    println!(
        "corrected {}/{total} runs ({} records x {} repeats) -> {}",
        total - failures,
        records.len(),
        args.repeats,
        args.out.display()
    );
    anyhow::ensure!(failures < total, "all {total} runs failed");
    Ok(())
}

type Runner = fn(
    &smrc_core::domain::Problem,
    &smrc_core::domain::StudentAttempt,
    &dyn smrc_core::domain::Generator,
    &dyn smrc_core::domain::Scorer,
    &SearchConfig,
) -> Result<SearchOutcome, smrc_core::search::SearchError>;

fn correct_one(
    record: &smrc_core::eval::DatasetRecord,
    index: usize,
    repeat: usize,
    runner: Runner,
    backend: &Backend,
    config: &SearchConfig,
    policy: &DecomposePolicy,
) -> anyhow::Result<(ResultLine, SearchOutcome)> {
    let problem = problem_for(record, index)?;
    let attempt = attempt_for(record, policy)?;
    let outcome = runner(
        &problem,
        &attempt,
        &*backend.generator,
        &*backend.scorer,
        config,
    )?;
    let result = &outcome.result;
    let line = ResultLine {
        id: problem.id.clone(),
        repeat,
        steps: result.best_path.texts().map(str::to_string).collect(),
        terminal: result.best_path.is_terminal(),
        value: result.best_value,
        terminated_by: result.terminated_by,
        iterations: result.iterations_used,
        retained_student_steps: result.retained_student_steps.clone(),
    };
    Ok((line, outcome))
}
