//! Reasoning accuracy, correct-step retention, and their harmonic mean.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{AnswerJudge, ContainmentJudge, JudgeError, Problem, ReasoningPath};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("empty dataset")]
    EmptyDataset,
    #[error(transparent)]
    Judge(#[from] JudgeError),
    #[error("record {index}: {reason}")]
    Schema { index: usize, reason: String },
    #[error("parse error at record {index}: {reason}")]
    Parse { index: usize, reason: String },
    #[error("first_error_index {index} out of range for {steps} steps")]
    IndexOutOfRange { index: usize, steps: usize },
    #[error("i/o error")]
    Io(#[from] std::io::Error),
}

/// Mean fraction of corrected paths the judge accepts.
pub fn acc(
    results: &[(Problem, ReasoningPath)],
    judge: &dyn AnswerJudge,
) -> Result<f64, EvalError> {
    if results.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    let mut valid = 0usize;
    for (problem, path) in results {
        if judge.judge(problem, path)?.valid {
            valid += 1;
        }
    }
    Ok(valid as f64 / results.len() as f64)
}

/// Mean over samples of the fraction of correct steps retained in the
/// corrected path. Samples with no annotated correct steps retain
/// vacuously and contribute 1.0.
pub fn csrr(
    samples: &[(Vec<String>, ReasoningPath)],
    judge: &dyn ContainmentJudge,
) -> Result<f64, EvalError> {
    if samples.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    let mut total = 0.0;
    for (correct_steps, corrected) in samples {
        total += retained_fraction(correct_steps, corrected, judge)?;
    }
    Ok(total / samples.len() as f64)
}

/// Per-sample retention fraction; 1.0 when `correct_steps` is empty.
pub fn retained_fraction(
    correct_steps: &[String],
    corrected: &ReasoningPath,
    judge: &dyn ContainmentJudge,
) -> Result<f64, EvalError> {
    if correct_steps.is_empty() {
        return Ok(1.0);
    }
    let mut retained = 0usize;
    for step in correct_steps {
        if judge.contains(step, corrected)?.valid {
            retained += 1;
        }
    }
    Ok(retained as f64 / correct_steps.len() as f64)
}

/// Harmonic mean of the two corpus-level metrics; 0 when both are 0.
pub fn hm(acc: f64, csrr: f64) -> f64 {
    if acc + csrr <= 0.0 {
        0.0
    } else {
        2.0 * acc * csrr / (acc + csrr)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleOutcome {
    pub id: String,
    pub valid: bool,
    pub retained_fraction: f64,
}

/// Corpus-level metrics with per-sample breakdowns. `hm` is always the
/// harmonic mean of `acc` and `csrr`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub acc: f64,
    pub csrr: f64,
    pub hm: f64,
    pub per_sample: Vec<SampleOutcome>,
}

impl EvalReport {
    pub fn new(acc: f64, csrr: f64, per_sample: Vec<SampleOutcome>) -> Self {
        Self {
            acc,
            csrr,
            hm: hm(acc, csrr),
            per_sample,
        }
    }
}

/// Mean and sample standard deviation of each metric over repeated runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepeatSummary {
    pub repeats: usize,
    pub acc_mean: f64,
    pub acc_std: f64,
    pub csrr_mean: f64,
    pub csrr_std: f64,
    pub hm_mean: f64,
    pub hm_std: f64,
}

impl RepeatSummary {
    pub fn from_reports(reports: &[EvalReport]) -> Option<Self> {
        if reports.len() < 2 {
            return None;
        }
        let stats = |values: Vec<f64>| {
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (mean, var.sqrt())
        };
        let (acc_mean, acc_std) = stats(reports.iter().map(|r| r.acc).collect());
        let (csrr_mean, csrr_std) = stats(reports.iter().map(|r| r.csrr).collect());
        let (hm_mean, hm_std) = stats(reports.iter().map(|r| r.hm).collect());
        Some(Self {
            repeats: reports.len(),
            acc_mean,
            acc_std,
            csrr_mean,
            csrr_std,
            hm_mean,
            hm_std,
        })
    }
}

/// The on-disk report: metrics plus run metadata.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportDocument {
    pub report: EvalReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repeats: Option<RepeatSummary>,
    pub generated_at: String,
    pub config: serde_json::Value,
}

impl ReportDocument {
    pub fn new(
        report: EvalReport,
        repeats: Option<RepeatSummary>,
        config: serde_json::Value,
    ) -> Self {
        Self {
            report,
            repeats,
            generated_at: chrono::Utc::now().to_rfc3339(),
            config,
        }
    }
}
