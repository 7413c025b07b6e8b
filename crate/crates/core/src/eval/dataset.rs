//! MSEB-schema dataset loading and the first-error-index conversion for
//! public-benchmark rows.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::metrics::EvalError;

/// One benchmark instance: the problem, its standard solution, a student's
/// attempt, and the steps of that attempt judged correct.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetRecord {
    pub question: String,
    pub answer: String,
    pub student_answer: String,
    pub correct_step: Vec<String>,
}

impl DatasetRecord {
    fn validate(&self, index: usize) -> Result<(), EvalError> {
        for (field, value) in [
            ("question", &self.question),
            ("answer", &self.answer),
            ("student_answer", &self.student_answer),
        ] {
            if value.trim().is_empty() {
                return Err(EvalError::Schema {
                    index,
                    reason: format!("field {field:?} is empty"),
                });
            }
        }
        Ok(())
    }
}

/// A public-benchmark row annotated with the position of the first
/// erroneous step (1-based; `len + 1` means no error).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstErrorRow {
    pub question: String,
    pub answer: String,
    pub steps: Vec<String>,
    pub first_error_index: usize,
}

/// Loads MSEB records from a JSON array or line-delimited JSON file
/// (auto-detected).
pub fn load_mseb(path: &Path) -> Result<Vec<DatasetRecord>, EvalError> {
    let text = fs::read_to_string(path)?;
    parse_mseb(&text)
}

/// Parses MSEB records from text holding a JSON array or one JSON object
/// per line. Malformed JSON is a `Parse` error; a well-formed object with
/// missing, extra, mistyped, or empty fields is a `Schema` error carrying
/// the record index.
pub fn parse_mseb(text: &str) -> Result<Vec<DatasetRecord>, EvalError> {
    let values = parse_json_values(text)?;
    let mut records = Vec::with_capacity(values.len());
    for (index, value) in values.into_iter().enumerate() {
        let record: DatasetRecord =
            serde_json::from_value(value).map_err(|e| EvalError::Schema {
                index,
                reason: e.to_string(),
            })?;
        record.validate(index)?;
        records.push(record);
    }
    Ok(records)
}

fn parse_json_values(text: &str) -> Result<Vec<serde_json::Value>, EvalError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        serde_json::from_str(trimmed).map_err(|e| EvalError::Parse {
            index: 0,
            reason: e.to_string(),
        })
    } else {
        trimmed
            .lines()
            .filter(|line| !line.trim().is_empty())
            .enumerate()
            .map(|(index, line)| {
                serde_json::from_str(line).map_err(|e| EvalError::Parse {
                    index,
                    reason: e.to_string(),
                })
            })
            .collect()
    }
}

/// Serializes records as line-delimited JSON, one record per line.
pub fn serialize_mseb(records: &[DatasetRecord]) -> String {
    let mut out = String::new();
    for record in records {
        out.push_str(&serde_json::to_string(record).expect("records always serialize"));
        out.push('\n');
    }
    out
}

/// Converts a first-error-annotated row into an MSEB record: every step
/// strictly before `first_error_index` is a correct step.
pub fn convert_first_error(
    question: &str,
    answer: &str,
    steps: &[String],
    first_error_index: usize,
) -> Result<DatasetRecord, EvalError> {
    if first_error_index == 0 || first_error_index > steps.len() + 1 {
        return Err(EvalError::IndexOutOfRange {
            index: first_error_index,
            steps: steps.len(),
        });
    }
    Ok(DatasetRecord {
        question: question.to_string(),
        answer: answer.to_string(),
        student_answer: steps.join("\n"),
        correct_step: steps[..first_error_index - 1].to_vec(),
    })
}

/// Loads first-error rows (JSON array or JSONL) and converts each to an
/// MSEB record.
pub fn load_first_error_rows(path: &Path) -> Result<Vec<DatasetRecord>, EvalError> {
    let text = fs::read_to_string(path)?;
    let values = parse_json_values(&text)?;
    values
        .into_iter()
        .enumerate()
        .map(|(index, value)| {
            let row: FirstErrorRow =
                serde_json::from_value(value).map_err(|e| EvalError::Schema {
                    index,
                    reason: e.to_string(),
                })?;
            convert_first_error(&row.question, &row.answer, &row.steps, row.first_error_index)
        })
        .collect()
}
