//! Problems, steps, paths, attempts, and verdicts.
//!
//! Everything here is an immutable value after construction and safe to
//! share across concurrent workers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DomainError {
    #[error("{0} must be non-empty")]
    EmptyField(&'static str),
    #[error("step index {index} out of range (attempt has {len} steps)")]
    StepIndexOutOfRange { index: usize, len: usize },
    #[error("student-retained step indices must be strictly increasing (saw {prev} then {next})")]
    StudentOrderViolated { prev: usize, next: usize },
    #[error("a terminal step may only appear as the last step of a path")]
    TerminalNotLast,
}

/// A problem to be corrected: question text plus the reference answer
/// (standard solution and final answer).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Problem {
    pub id: String,
    pub question: String,
    pub reference_answer: String,
}

impl Problem {
    pub fn new(
        id: impl Into<String>,
        question: impl Into<String>,
        reference_answer: impl Into<String>,
    ) -> Result<Self, DomainError> {
        let problem = Self {
            id: id.into(),
            question: question.into(),
            reference_answer: reference_answer.into(),
        };
        if problem.question.trim().is_empty() {
            return Err(DomainError::EmptyField("question"));
        }
        if problem.reference_answer.trim().is_empty() {
            return Err(DomainError::EmptyField("reference_answer"));
        }
        Ok(problem)
    }
}

/// One atomic reasoning step. `index` is the 1-based ordinal within the
/// sequence the step was decomposed from; `terminal` marks a step that
/// states a final answer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReasoningStep {
    pub index: usize,
    pub text: String,
    pub terminal: bool,
}

impl ReasoningStep {
    pub fn new(index: usize, text: impl Into<String>, terminal: bool) -> Result<Self, DomainError> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(DomainError::EmptyField("step text"));
        }
        Ok(Self {
            index,
            text,
            terminal,
        })
    }
}

/// Where a path step came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepOrigin {
    /// Retained from the student's attempt; `ReasoningStep::index` is the
    /// step's original position in that attempt.
    StudentRetained,
    Generated,
}

/// A step inside a [`ReasoningPath`], tagged with its origin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStep {
    pub step: ReasoningStep,
    pub origin: StepOrigin,
}

/// An ordered sequence of solution steps, the unit scored, searched, and
/// emitted.
///
/// Invariants: student-retained steps keep their original relative order
/// (strictly increasing original indices), and a terminal step, if present,
/// is the last step.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReasoningPath {
    steps: Vec<PathStep>,
}

impl ReasoningPath {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a path from an ordered subset of a student attempt's steps.
    /// `indices` are 1-based positions into `attempt.steps` and must be
    /// strictly increasing.
    pub fn from_attempt_subset(
        attempt: &StudentAttempt,
        indices: &[usize],
    ) -> Result<Self, DomainError> {
        let mut path = Self::empty();
        for &index in indices {
            let step = attempt
                .steps
                .get(index.checked_sub(1).ok_or(DomainError::StepIndexOutOfRange {
                    index,
                    len: attempt.steps.len(),
                })?)
                .ok_or(DomainError::StepIndexOutOfRange {
                    index,
                    len: attempt.steps.len(),
                })?;
            path.push(step.clone(), StepOrigin::StudentRetained)?;
        }
        Ok(path)
    }

    /// Appends one step, enforcing the path invariants.
    pub fn push(&mut self, step: ReasoningStep, origin: StepOrigin) -> Result<(), DomainError> {
        if let Some(last) = self.steps.last() {
            if last.step.terminal {
                return Err(DomainError::TerminalNotLast);
            }
        }
        if origin == StepOrigin::StudentRetained {
            if let Some(prev) = self
                .steps
                .iter()
                .rev()
                .find(|s| s.origin == StepOrigin::StudentRetained)
            {
                if step.index <= prev.step.index {
                    return Err(DomainError::StudentOrderViolated {
                        prev: prev.step.index,
                        next: step.index,
                    });
                }
            }
        }
        self.steps.push(PathStep { step, origin });
        Ok(())
    }

    /// Returns a new path extending `self` with generated continuation steps.
    pub fn extended_with_generated(
        &self,
        continuation: &[ReasoningStep],
    ) -> Result<Self, DomainError> {
        let mut path = self.clone();
        for step in continuation {
            path.push(step.clone(), StepOrigin::Generated)?;
        }
        Ok(path)
    }

    pub fn steps(&self) -> &[PathStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// True when the last step states a final answer.
    pub fn is_terminal(&self) -> bool {
        self.steps.last().is_some_and(|s| s.step.terminal)
    }

    pub fn last_step(&self) -> Option<&ReasoningStep> {
        self.steps.last().map(|s| &s.step)
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.steps.iter().map(|s| s.step.text.as_str())
    }

    /// Original indices of the student-retained steps, in path order.
    pub fn student_indices(&self) -> Vec<usize> {
        self.steps
            .iter()
            .filter(|s| s.origin == StepOrigin::StudentRetained)
            .map(|s| s.step.index)
            .collect()
    }

    /// One step per line, used for prompts and exports.
    pub fn render_lines(&self) -> String {
        self.texts().collect::<Vec<_>>().join("\n")
    }

    /// Re-checks the path invariants (used by property tests and
    /// deserialization call sites).
    pub fn validate(&self) -> Result<(), DomainError> {
        let mut prev_student: Option<usize> = None;
        for (pos, path_step) in self.steps.iter().enumerate() {
            if path_step.step.terminal && pos + 1 != self.steps.len() {
                return Err(DomainError::TerminalNotLast);
            }
            if path_step.origin == StepOrigin::StudentRetained {
                if let Some(prev) = prev_student {
                    if path_step.step.index <= prev {
                        return Err(DomainError::StudentOrderViolated {
                            prev,
                            next: path_step.step.index,
                        });
                    }
                }
                prev_student = Some(path_step.step.index);
            }
        }
        Ok(())
    }
}

/// A student's raw solution attempt plus its decomposition and the subset
/// of steps known to be correct (1-based indices into `steps`; may be
/// empty).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudentAttempt {
    pub raw_text: String,
    pub steps: Vec<ReasoningStep>,
    pub correct_steps: Vec<usize>,
}

impl StudentAttempt {
    pub fn new(
        raw_text: impl Into<String>,
        steps: Vec<ReasoningStep>,
        mut correct_steps: Vec<usize>,
    ) -> Result<Self, DomainError> {
        correct_steps.sort_unstable();
        correct_steps.dedup();
        if let Some(&index) = correct_steps.iter().find(|&&i| i == 0 || i > steps.len()) {
            return Err(DomainError::StepIndexOutOfRange {
                index,
                len: steps.len(),
            });
        }
        Ok(Self {
            raw_text: raw_text.into(),
            steps,
            correct_steps,
        })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Texts of the known-correct steps, in original order.
    pub fn correct_step_texts(&self) -> Vec<String> {
        self.correct_steps
            .iter()
            .map(|&i| self.steps[i - 1].text.clone())
            .collect()
    }
}

/// Outcome of a judge call.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub valid: bool,
    pub rationale: Option<String>,
}

impl Verdict {
    pub fn valid() -> Self {
        Self {
            valid: true,
            rationale: None,
        }
    }

    pub fn invalid(rationale: impl Into<String>) -> Self {
        Self {
            valid: false,
            rationale: Some(rationale.into()),
        }
    }
}
