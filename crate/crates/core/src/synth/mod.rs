//! Deterministic synthetic domain: problem generation, error injection,
//! and oracle implementations of every capability interface.
//!
//! Stands in for the LLM components so the whole pipeline can be verified
//! at desk scale with exact ground truth.

mod expr;
mod oracle;

pub use expr::{parse_answer, parse_claim, Claim, Expression, Op};
pub use oracle::{
    oracle_answer_judge, oracle_containment_judge, oracle_generate, oracle_score,
    OracleAnswerJudge, OracleContainmentJudge, OracleGenerator, OracleScorer,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{
    DomainError, Problem, ReasoningPath, ReasoningStep, StepOrigin, StudentAttempt,
};
use crate::eval::DatasetRecord;

pub const MAX_OPS: usize = 12;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("expression needs n operands and n-1 ops with n >= 2 (got {operands} operands, {ops} ops)")]
    BadArity { operands: usize, ops: usize },
    #[error("operation count must be in 1..={MAX_OPS} (got {0})")]
    OpCountOutOfRange(usize),
    #[error("error position {position} out of range for {steps} steps")]
    ErrorPositionOutOfRange { position: usize, steps: usize },
    #[error("cannot parse: {0}")]
    Parse(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// A generated arithmetic problem with its exact result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthProblem {
    pub seed: u64,
    pub expression: Expression,
    pub target: i64,
}

impl SynthProblem {
    pub fn question(&self) -> String {
        self.expression.question()
    }

    /// The canonical solution text: one reduction per line.
    pub fn reference_answer(&self) -> String {
        self.expression.canonical_step_texts().join("\n")
    }

    pub fn to_problem(&self) -> Problem {
        Problem::new(
            format!("synth-{}-k{}", self.seed, self.expression.op_count()),
            self.question(),
            self.reference_answer(),
        )
        .expect("synthetic problems always render non-empty text")
    }
}

/// Where and how to corrupt a canonical solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorSpec {
    /// 1-based step to corrupt.
    pub error_position: usize,
    pub error_kind: ErrorKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    OffByOne,
    SignFlip,
    DroppedTerm,
}

/// Deterministically generates a problem of `k` operations and its
/// canonical solution path.
pub fn gen_problem(seed: u64, k: usize) -> Result<(SynthProblem, ReasoningPath), SynthError> {
    if k == 0 || k > MAX_OPS {
        return Err(SynthError::OpCountOutOfRange(k));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let operands: Vec<i64> = (0..=k).map(|_| rng.gen_range(-9..=9)).collect();
    let ops: Vec<Op> = (0..k)
        .map(|_| match rng.gen_range(0..3) {
            0 => Op::Add,
            1 => Op::Sub,
            _ => Op::Mul,
        })
        .collect();
    let expression = Expression::new(operands, ops)?;
    let target = expression.target();
    let problem = SynthProblem {
        seed,
        expression,
        target,
    };
    let canonical = canonical_path(&problem.expression)?;
    Ok((problem, canonical))
}

/// The canonical solution as a reasoning path (all steps generated-origin).
pub fn canonical_path(expression: &Expression) -> Result<ReasoningPath, SynthError> {
    let k = expression.op_count();
    let mut path = ReasoningPath::empty();
    for (i, text) in expression.canonical_step_texts().into_iter().enumerate() {
        path.push(
            ReasoningStep::new(i + 1, text, i + 1 == k)?,
            StepOrigin::Generated,
        )?;
    }
    Ok(path)
}

/// Corrupts a canonical solution at `spec.error_position` and recomputes
/// every later step from the corrupted value, so the wrong answer is
/// internally coherent. Steps before the error are copied verbatim and
/// recorded as the attempt's correct steps.
pub fn inject_errors(
    canonical: &ReasoningPath,
    spec: &ErrorSpec,
) -> Result<StudentAttempt, SynthError> {
    let claims: Vec<Claim> = canonical
        .texts()
        .map(|text| {
            parse_claim(text).ok_or_else(|| SynthError::Parse(format!("not a reduction step: {text:?}")))
        })
        .collect::<Result<_, _>>()?;
    let k = claims.len();
    if spec.error_position == 0 || spec.error_position > k {
        return Err(SynthError::ErrorPositionOutOfRange {
            position: spec.error_position,
            steps: k,
        });
    }

    // Reconstruct the expression from the stated claims so downstream
    // step texts can restate the remaining expression consistently.
    let mut operands = vec![claims[0].left];
    let mut ops = Vec::with_capacity(k);
    for claim in &claims {
        operands.push(claim.right);
        ops.push(claim.op);
    }
    let expression = Expression::new(operands, ops)?;

    let mut steps = Vec::with_capacity(k);
    let mut texts = Vec::with_capacity(k);
    let mut acc = claims[0].left;
    for (i, claim) in claims.iter().enumerate() {
        let position = i + 1;
        let true_result = claim.op.apply(acc, claim.right);
        let result = if position == spec.error_position {
            corrupt(spec.error_kind, acc, true_result)
        } else {
            true_result
        };
        let stated = Claim {
            left: acc,
            op: claim.op,
            right: claim.right,
            result,
        };
        let text = expr::render_step_text(&expression, i, stated);
        steps.push(ReasoningStep::new(position, text.clone(), position == k)?);
        texts.push(text);
        acc = result;
    }

    let correct_steps: Vec<usize> = (1..spec.error_position).collect();
    Ok(StudentAttempt::new(texts.join("\n"), steps, correct_steps)?)
}

/// Guaranteed to differ from `true_result`.
fn corrupt(kind: ErrorKind, left: i64, true_result: i64) -> i64 {
    let candidate = match kind {
        ErrorKind::OffByOne => true_result + 1,
        ErrorKind::SignFlip => -true_result,
        ErrorKind::DroppedTerm => left,
    };
    if candidate == true_result {
        true_result + 1
    } else {
        candidate
    }
}

/// Emits `count` problems of `k` operations each in the MSEB record schema,
/// with error positions drawn uniformly at random. Deterministic in `seed`.
pub fn synth_records(count: usize, k: usize, seed: u64) -> Result<Vec<DatasetRecord>, SynthError> {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(count);
    for _ in 0..count {
        let problem_seed: u64 = master.gen();
        let (problem, canonical) = gen_problem(problem_seed, k)?;
        let spec = ErrorSpec {
            error_position: master.gen_range(1..=k),
            error_kind: match master.gen_range(0..3) {
                0 => ErrorKind::OffByOne,
                1 => ErrorKind::SignFlip,
                _ => ErrorKind::DroppedTerm,
            },
        };
        let attempt = inject_errors(&canonical, &spec)?;
        records.push(DatasetRecord {
            question: problem.question(),
            answer: problem.reference_answer(),
            student_answer: attempt.raw_text.clone(),
            correct_step: attempt.correct_step_texts(),
        });
    }
    Ok(records)
}
