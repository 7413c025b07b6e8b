//! Shared domain types and the pluggable capability interfaces.

mod capabilities;
mod decompose;
mod types;

pub use capabilities::{
    AnswerJudge, ContainmentJudge, FeedbackRound, Generator, GeneratorError, JudgeError, Scorer,
    ScorerError, Serialized, clamp_score,
};
pub use decompose::{
    decompose_attempt, decompose_attempt_with, normalize_step, DecomposeError, DecomposePolicy,
    StepDecomposer, TerminalDetector,
};
pub use types::{
    DomainError, PathStep, Problem, ReasoningPath, ReasoningStep, StepOrigin, StudentAttempt,
    Verdict,
};
