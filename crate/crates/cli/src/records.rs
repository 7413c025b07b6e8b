//! Shared record plumbing: dataset loading, id assignment, attempt
//! construction, and the results-file schema.

use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use smrc_core::domain::{
    decompose_attempt, normalize_step, DecomposePolicy, Problem, ReasoningPath, ReasoningStep,
    StepOrigin, StudentAttempt,
};
use smrc_core::eval::{load_first_error_rows, load_mseb, DatasetRecord};
use smrc_core::search::TerminationCause;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// MSEB schema: {question, answer, student_answer, correct_step}.
    Mseb,
    /// Rows of {question, answer, steps, first_error_index}.
    FirstErrorRows,
    /// Synthetic datasets (same schema as mseb).
    Synth,
}

pub fn load_dataset(path: &Path, format: Format) -> anyhow::Result<Vec<DatasetRecord>> {
    let records = match format {
        Format::Mseb | Format::Synth => load_mseb(path),
        Format::FirstErrorRows => load_first_error_rows(path),
    }
    .with_context(|| format!("loading dataset {}", path.display()))?;
    anyhow::ensure!(!records.is_empty(), "dataset {} is empty", path.display());
    Ok(records)
}

/// Stable record id: position in the dataset file.
pub fn record_id(index: usize) -> String {
    format!("r{index:05}")
}

pub fn problem_for(record: &DatasetRecord, index: usize) -> anyhow::Result<Problem> {
    Problem::new(record_id(index), record.question.clone(), record.answer.clone())
        .context("record does not form a valid problem")
}

/// Decomposes the student answer and marks as known-correct the steps whose
/// normalized text matches an annotated correct step.
pub fn attempt_for(record: &DatasetRecord, policy: &DecomposePolicy) -> anyhow::Result<StudentAttempt> {
    let steps = decompose_attempt(&record.student_answer, policy)
        .context("student answer decomposition failed")?;
    let mut correct = Vec::new();
    for annotated in &record.correct_step {
        let needle = normalize_step(annotated);
        if let Some(step) = steps.iter().find(|s| normalize_step(&s.text) == needle) {
            correct.push(step.index);
        }
    }
    Ok(StudentAttempt::new(record.student_answer.clone(), steps, correct)?)
}

/// One correction result per line in the output file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResultLine {
    pub id: String,
    pub repeat: usize,
    pub steps: Vec<String>,
    pub terminal: bool,
    pub value: f64,
    pub terminated_by: TerminationCause,
    pub iterations: u32,
    pub retained_student_steps: Vec<usize>,
}

impl ResultLine {
    /// Rebuilds the corrected path (all steps generated-origin; the stored
    /// terminal flag applies to the last step).
    pub fn to_path(&self) -> anyhow::Result<ReasoningPath> {
        let mut path = ReasoningPath::empty();
        let count = self.steps.len();
        for (i, text) in self.steps.iter().enumerate() {
            path.push(
                ReasoningStep::new(i + 1, text.clone(), self.terminal && i + 1 == count)?,
                StepOrigin::Generated,
            )?;
        }
        Ok(path)
    }
}

pub fn read_result_lines(path: &Path) -> anyhow::Result<Vec<ResultLine>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading results {}", path.display()))?;
    text.lines()
        .filter(|line| !line.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            serde_json::from_str(line).with_context(|| format!("results line {i} is malformed"))
        })
        .collect()
}
