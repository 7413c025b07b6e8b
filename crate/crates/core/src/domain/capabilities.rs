//! Pluggable capability interfaces: generator, scorer, and judges.
//!
//! Implementations declare whether they tolerate concurrent calls via
//! `supports_concurrency`; callers must serialize access to any
//! implementation that does not (see [`Serialized`]).

use std::sync::Mutex;

use thiserror::Error;

use super::types::{Problem, ReasoningPath, ReasoningStep, Verdict};

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("generation produced no steps")]
    EmptyCompletion,
    #[error("prefix cannot be continued: {0}")]
    UnreachableState(String),
    #[error("generation failed: {0}")]
    Failed(String),
}

#[derive(Debug, Error)]
pub enum ScorerError {
    #[error("scoring failed: {0}")]
    Failed(String),
}

#[derive(Debug, Error)]
pub enum JudgeError {
    #[error("judge reply not parsable as a verdict: {0:?}")]
    UnparsableVerdict(String),
    #[error("judge failed: {0}")]
    Failed(String),
}

/// One prior round of a failed expansion: the rejected continuation (when
/// generation produced one) that the next attempt should improve on.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FeedbackRound {
    pub attempt_text: Option<String>,
}

/// Proposes continuation steps for a partial reasoning path. Failure is an
/// explicit error, never an empty step list.
pub trait Generator: Send + Sync {
    fn generate(
        &self,
        problem: &Problem,
        prefix: &ReasoningPath,
        feedback: &[FeedbackRound],
    ) -> Result<Vec<ReasoningStep>, GeneratorError>;

    fn supports_concurrency(&self) -> bool {
        false
    }
}

/// Scores a reasoning path; callers clamp the output to [-1, 1] via
/// [`clamp_score`].
pub trait Scorer: Send + Sync {
    fn score(&self, problem: &Problem, path: &ReasoningPath) -> Result<f64, ScorerError>;

    fn supports_concurrency(&self) -> bool {
        false
    }
}

/// Decides whether a path reaches the problem's correct final answer.
pub trait AnswerJudge: Send + Sync {
    fn judge(&self, problem: &Problem, path: &ReasoningPath) -> Result<Verdict, JudgeError>;

    fn supports_concurrency(&self) -> bool {
        false
    }
}

/// Decides whether an original step is preserved in a corrected path.
pub trait ContainmentJudge: Send + Sync {
    fn contains(
        &self,
        original_step: &str,
        corrected: &ReasoningPath,
    ) -> Result<Verdict, JudgeError>;

    fn supports_concurrency(&self) -> bool {
        false
    }
}

/// Clamps a raw scorer output into [-1, 1]. Non-finite values collapse to
/// the nearest representable bound (NaN maps to 0).
pub fn clamp_score(raw: f64) -> f64 {
    if raw.is_nan() {
        0.0
    } else {
        raw.clamp(-1.0, 1.0)
    }
}

/// Serializes calls to an implementation that does not tolerate
/// concurrency; the wrapper itself does.
pub struct Serialized<T> {
    inner: Mutex<T>,
}

impl<T> Serialized<T> {
    pub fn new(inner: T) -> Self {
        Self {
            inner: Mutex::new(inner),
        }
    }
}

impl<T: Generator> Generator for Serialized<T> {
    fn generate(
        &self,
        problem: &Problem,
        prefix: &ReasoningPath,
        feedback: &[FeedbackRound],
    ) -> Result<Vec<ReasoningStep>, GeneratorError> {
        self.inner
            .lock()
            .expect("serialized generator poisoned")
            .generate(problem, prefix, feedback)
    }

    fn supports_concurrency(&self) -> bool {
        true
    }
}

impl<T: Scorer> Scorer for Serialized<T> {
    fn score(&self, problem: &Problem, path: &ReasoningPath) -> Result<f64, ScorerError> {
        self.inner
            .lock()
            .expect("serialized scorer poisoned")
            .score(problem, path)
    }

    fn supports_concurrency(&self) -> bool {
        true
    }
}

impl<T: AnswerJudge> AnswerJudge for Serialized<T> {
    fn judge(&self, problem: &Problem, path: &ReasoningPath) -> Result<Verdict, JudgeError> {
        self.inner
            .lock()
            .expect("serialized judge poisoned")
            .judge(problem, path)
    }

    fn supports_concurrency(&self) -> bool {
        true
    }
}

impl<T: ContainmentJudge> ContainmentJudge for Serialized<T> {
    fn contains(
        &self,
        original_step: &str,
        corrected: &ReasoningPath,
    ) -> Result<Verdict, JudgeError> {
        self.inner
            .lock()
            .expect("serialized judge poisoned")
            .contains(original_step, corrected)
    }

    fn supports_concurrency(&self) -> bool {
        true
    }
}
