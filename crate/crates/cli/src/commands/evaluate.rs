//! `smrc evaluate`: join results to their dataset and compute ACC, CSRR,
//! and their harmonic mean.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use smrc_core::eval::{
    retained_fraction, EvalReport, RepeatSummary, ReportDocument, SampleOutcome,
};
use smrc_core::synth::{OracleAnswerJudge, OracleContainmentJudge};

use crate::backend::{build_remote, RemoteFlags};
use crate::records::{load_dataset, problem_for, read_result_lines, record_id, Format};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum AnswerJudgeKind {
    /// Exact comparison against the synthetic target.
    Oracle,
    /// LLM judging via the remote endpoint.
    Remote,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ContainmentJudgeKind {
    /// Normalized-verbatim text match (default).
    Verbatim,
    /// LLM judging via the remote endpoint.
    Remote,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Results file produced by `smrc correct`.
    #[arg(long)]
    pub results: PathBuf,
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Mseb)]
    pub format: Format,
    #[arg(long, value_enum, default_value_t = AnswerJudgeKind::Oracle)]
    pub judge: AnswerJudgeKind,
    #[arg(long, value_enum, default_value_t = ContainmentJudgeKind::Verbatim)]
    pub containment: ContainmentJudgeKind,
    /// Report output path (single JSON document).
    #[arg(long)]
    pub report: PathBuf,
    /// Seed for any seeded component (remote retry jitter).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub remote: RemoteFlags,
}

pub fn run(args: EvaluateArgs) -> anyhow::Result<()> {
    let records = load_dataset(&args.dataset, args.format)?;
    let lines = read_result_lines(&args.results)?;
    anyhow::ensure!(!lines.is_empty(), "results file is empty");

    let index_of = |id: &str| -> anyhow::Result<usize> {
        let index: usize = id
            .strip_prefix('r')
            .and_then(|rest| rest.parse().ok())
            .with_context(|| format!("result id {id:?} does not join to the dataset"))?;
        anyhow::ensure!(
            index < records.len() && record_id(index) == id,
            "result id {id:?} does not join to the dataset ({} records)",
            records.len()
        );
        Ok(index)
    };

    let answer_judge: Box<dyn smrc_core::domain::AnswerJudge> = match args.judge {
        AnswerJudgeKind::Oracle => Box::new(OracleAnswerJudge),
        AnswerJudgeKind::Remote => Box::new(build_remote(&args.remote, args.seed)?),
    };
    let containment_judge: Box<dyn smrc_core::domain::ContainmentJudge> = match args.containment {
        ContainmentJudgeKind::Verbatim => Box::new(OracleContainmentJudge),
        ContainmentJudgeKind::Remote => Box::new(build_remote(&args.remote, args.seed)?),
    };

    // Group by repeat, preserving record order within each group.
    let mut by_repeat: BTreeMap<usize, Vec<(usize, &crate::records::ResultLine)>> = BTreeMap::new();
    for line in &lines {
        let index = index_of(&line.id)?;
        by_repeat.entry(line.repeat).or_default().push((index, line));
    }

    let mut reports = Vec::new();
    let mut pooled_samples = Vec::new();
    let mut pooled_valid = 0usize;
    let mut pooled_retained = 0.0f64;
    let multiple_repeats = by_repeat.len() > 1;
    for (repeat, group) in &by_repeat {
        let mut valid_count = 0usize;
        let mut retained_total = 0.0f64;
        let mut per_sample = Vec::with_capacity(group.len());
        for (index, line) in group {
            let record = &records[*index];
            let problem = problem_for(record, *index)?;
            let path = line.to_path()?;
            let valid = answer_judge.judge(&problem, &path)?.valid;
            let retained = retained_fraction(&record.correct_step, &path, &*containment_judge)?;
            valid_count += usize::from(valid);
            retained_total += retained;
            let sample_id = if multiple_repeats {
                format!("{}@{repeat}", line.id)
            } else {
                line.id.clone()
            };
            per_sample.push(SampleOutcome {
                id: sample_id,
                valid,
                retained_fraction: retained,
            });
        }
        let acc = valid_count as f64 / group.len() as f64;
        let csrr = retained_total / group.len() as f64;
        pooled_valid += valid_count;
        pooled_retained += retained_total;
        pooled_samples.extend(per_sample.iter().cloned());
        reports.push(EvalReport::new(acc, csrr, per_sample));
    }

    let total = lines.len();
    let pooled = EvalReport::new(
        pooled_valid as f64 / total as f64,
        pooled_retained / total as f64,
        pooled_samples,
    );
    let summary = RepeatSummary::from_reports(&reports);
    let config = serde_json::json!({
        "results": args.results.display().to_string(),
        "dataset": args.dataset.display().to_string(),
        "judge": format!("{:?}", args.judge),
        "containment": format!("{:?}", args.containment),
    });
    let document = ReportDocument::new(pooled, summary, config);
    std::fs::write(&args.report, serde_json::to_string_pretty(&document)?)
        .with_context(|| format!("writing {}", args.report.display()))?;

    println!(
        "ACC={:.4} CSRR={:.4} HM={:.4} ({} samples{}) -> {}",
        document.report.acc,
        document.report.csrr,
        document.report.hm,
        total,
        document
            .repeats
            .as_ref()
            .map(|s| format!(", {} repeats", s.repeats))
            .unwrap_or_default(),
        args.report.display()
    );
    Ok(())
}
