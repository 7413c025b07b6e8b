//! Oracle generator, scorer, and judges over the synthetic domain.
//!
//! All operations are pure functions of their inputs and recover the
//! expression from the problem's question text, so they compose with the
//! same dataset files the rest of the pipeline consumes.

use crate::domain::{
    clamp_score, normalize_step, AnswerJudge, ContainmentJudge, FeedbackRound, Generator,
    GeneratorError, JudgeError, Problem, ReasoningPath, ReasoningStep, Scorer, ScorerError,
    Verdict,
};

use super::expr::{parse_answer, parse_claim, Expression};

/// Number of leading path steps that exactly follow the canonical
/// reduction.
fn leading_valid_steps(expression: &Expression, path: &ReasoningPath) -> usize {
    let k = expression.op_count();
    let mut valid = 0;
    for text in path.texts() {
        if valid >= k {
            break;
        }
        match parse_claim(text) {
            Some(claim) if claim == expression.claim(valid) => valid += 1,
            _ => break,
        }
    }
    valid
}

/// Scores a path against the expression: +1 for a terminal path stating
/// the exact target, -1 for a terminal path stating anything else, and
/// `m / (k + 1)` for a non-terminal path with `m` leading valid steps.
pub fn oracle_score(expression: &Expression, path: &ReasoningPath) -> f64 {
    if path.is_terminal() {
        let stated = path.last_step().and_then(|s| parse_answer(&s.text));
        return if stated == Some(expression.target()) {
            1.0
        } else {
            -1.0
        };
    }
    let m = leading_valid_steps(expression, path);
    m as f64 / (expression.op_count() + 1) as f64
}

/// Continues a prefix with the canonical remaining steps, restarting from
/// the last valid state. The continuation always ends terminal.
pub fn oracle_generate(
    expression: &Expression,
    prefix: &ReasoningPath,
) -> Result<Vec<ReasoningStep>, GeneratorError> {
    if prefix.is_terminal() {
        return Err(GeneratorError::UnreachableState(
            "prefix already states a final answer".into(),
        ));
    }
    let k = expression.op_count();
    let m = leading_valid_steps(expression, prefix);
    let mut steps = Vec::with_capacity(k - m);
    for (offset, i) in (m..k).enumerate() {
        steps.push(
            ReasoningStep::new(offset + 1, expression.step_text(i), i + 1 == k)
                .expect("canonical step texts are non-empty"),
        );
    }
    if steps.is_empty() {
        // All reductions already stated without a closing answer; finish
        // with the solution statement alone.
        steps.push(
            ReasoningStep::new(1, format!("The solution is {}.", expression.target()), true)
                .expect("solution statement is non-empty"),
        );
    }
    Ok(steps)
}

/// Exact final-answer comparison against the expression's target.
pub fn oracle_answer_judge(expression: &Expression, path: &ReasoningPath) -> Verdict {
    if !path.is_terminal() {
        return Verdict::invalid("path does not state a final answer");
    }
    match path.last_step().and_then(|s| parse_answer(&s.text)) {
        Some(stated) if stated == expression.target() => Verdict::valid(),
        Some(stated) => Verdict::invalid(format!(
            "stated {stated}, expected {}",
            expression.target()
        )),
        None => Verdict::invalid("terminal step states no parsable answer"),
    }
}

/// Normalized-verbatim containment of an original step in a corrected
/// path.
pub fn oracle_containment_judge(original_step: &str, corrected: &ReasoningPath) -> Verdict {
    let needle = normalize_step(original_step);
    if corrected.texts().any(|text| normalize_step(text) == needle) {
        Verdict::valid()
    } else {
        Verdict::invalid("step not present verbatim")
    }
}

fn expression_for(problem: &Problem) -> Result<Expression, String> {
    Expression::from_question(&problem.question).map_err(|e| e.to_string())
}

/// [`Generator`] over the synthetic domain.
#[derive(Clone, Copy, Debug, Default)]
pub struct OracleGenerator;

impl Generator for OracleGenerator {
    fn generate(
        &self,
        problem: &Problem,
        prefix: &ReasoningPath,
        _feedback: &[FeedbackRound],
    ) -> Result<Vec<ReasoningStep>, GeneratorError> {
        let expression = expression_for(problem).map_err(GeneratorError::Failed)?;
        oracle_generate(&expression, prefix)
    }

    fn supports_concurrency(&self) -> bool {
        true
    }
}

/// [`Scorer`] over the synthetic domain.
#[derive(Clone, Copy, Debug, Default)]
pub struct OracleScorer;

impl Scorer for OracleScorer {
    fn score(&self, problem: &Problem, path: &ReasoningPath) -> Result<f64, ScorerError> {
        let expression = expression_for(problem).map_err(ScorerError::Failed)?;
        Ok(clamp_score(oracle_score(&expression, path)))
    }

    fn supports_concurrency(&self) -> bool {
        true
    }
}

/// [`AnswerJudge`] over the synthetic domain.
#[derive(Clone, Copy, Debug, Default)]
pub struct OracleAnswerJudge;

impl AnswerJudge for OracleAnswerJudge {
    fn judge(&self, problem: &Problem, path: &ReasoningPath) -> Result<Verdict, JudgeError> {
        let expression = expression_for(problem).map_err(JudgeError::Failed)?;
        Ok(oracle_answer_judge(&expression, path))
    }

    fn supports_concurrency(&self) -> bool {
        true
    }
}

/// Normalized-verbatim [`ContainmentJudge`]; also the default judge for
/// non-synthetic data.
#[derive(Clone, Copy, Debug, Default)]
pub struct OracleContainmentJudge;

impl ContainmentJudge for OracleContainmentJudge {
    fn contains(
        &self,
        original_step: &str,
        corrected: &ReasoningPath,
    ) -> Result<Verdict, JudgeError> {
        Ok(oracle_containment_judge(original_step, corrected))
    }

    fn supports_concurrency(&self) -> bool {
        true
    }
}
