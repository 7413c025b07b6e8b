//! Student-solution decomposition into reasoning steps.
//!
//! The deterministic policies (numbered markers, line split) let desk-scale
//! runs proceed without a model; the `External` policy delegates splitting
//! to a pluggable decomposer such as an LLM endpoint.

use std::fmt;
use std::sync::Arc;

use once_cell::sync::Lazy;
use regex::Regex;
use thiserror::Error;

use super::types::ReasoningStep;

#[derive(Debug, Error)]
pub enum DecomposeError {
    #[error("input is blank")]
    EmptyInput,
    #[error("unparsable format: {0}")]
    UnparsableFormat(String),
    #[error("external decomposer failed: {0}")]
    External(String),
}

/// Splits raw solution text into step texts. Implemented by the remote
/// adapter to run the decomposition prompt against a model endpoint.
pub trait StepDecomposer: Send + Sync {
    fn decompose(&self, raw: &str) -> Result<Vec<String>, DecomposeError>;
}

/// How to split a raw attempt into steps.
#[derive(Clone)]
pub enum DecomposePolicy {
    /// Split on `Steps N:` / `Step N:` markers.
    NumberedMarkers,
    /// One step per non-blank line; no newline means one step.
    LineSplit,
    /// Delegate splitting to an external decomposer.
    External(Arc<dyn StepDecomposer>),
}

impl fmt::Debug for DecomposePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NumberedMarkers => f.write_str("NumberedMarkers"),
            Self::LineSplit => f.write_str("LineSplit"),
            Self::External(_) => f.write_str("External(..)"),
        }
    }
}

static WHITESPACE_RUN: Lazy<Regex> = Lazy::new(|| Regex::new(r"\s+").unwrap());

// Leading step-number prefixes: "Steps 3:", "Step 3.", "(3)", "3: ", "3. ".
// Bare "3." only counts as a prefix when followed by whitespace so values
// like "4.8x" survive.
static STEP_PREFIX: Lazy<Regex> = Lazy::new(|| {
    Regex::new(r"(?i)^(?:steps?\s*\d+\s*[:.)]\s*|\(\d+\)\s*|\d+\s*[:.)](?:\s+|$))").unwrap()
});

static NUMBERED_MARKER: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"(?i)steps?\s*\d+\s*[:.]").unwrap());

const DEFAULT_TERMINAL_PATTERN: &str = r"(?ix)
    \\boxed\{
    | \b(?:maximum|minimum)\s+value\s+of\b
    | \bthe\s+(?:solution|answer)\s+is\b
    | \bin\s+conclusion\b
    | \b(?:so|thus|therefore|hence|solve)\b[^=\n]*=\s*\S
    | ^[a-z][a-z0-9_]*\s*=\s*-?\d+(?:\.\d+)?(?:\s*/\s*\d+)?\s*\.?$
";

/// Decides whether a step text states a final answer.
///
/// The default pattern matches boxed answers, "maximum/minimum value of",
/// "the solution/answer is", "in conclusion", an equals sign inside a
/// concluding clause, and a bare closing assignment like `x = 4`.
#[derive(Clone, Debug)]
pub struct TerminalDetector {
    pattern: Regex,
}

impl Default for TerminalDetector {
    fn default() -> Self {
        Self {
            pattern: Regex::new(DEFAULT_TERMINAL_PATTERN).unwrap(),
        }
    }
}

impl TerminalDetector {
    pub fn from_pattern(pattern: &str) -> Result<Self, regex::Error> {
        Ok(Self {
            pattern: Regex::new(pattern)?,
        })
    }

    pub fn is_terminal(&self, step_text: &str) -> bool {
        self.pattern.is_match(step_text)
    }
}

/// Trims, collapses internal whitespace runs to single spaces, and strips
/// leading step-number prefixes. Idempotent.
pub fn normalize_step(text: &str) -> String {
    let mut out = WHITESPACE_RUN
        .replace_all(text.trim(), " ")
        .into_owned();
    while let Some(m) = STEP_PREFIX.find(&out) {
        out = out[m.end()..].trim_start().to_string();
    }
    out
}

/// Decomposes a raw attempt into normalized steps using the default
/// terminal detector.
pub fn decompose_attempt(
    raw: &str,
    policy: &DecomposePolicy,
) -> Result<Vec<ReasoningStep>, DecomposeError> {
    decompose_attempt_with(raw, policy, &TerminalDetector::default())
}

/// Decomposes a raw attempt into normalized steps. Steps are 1-indexed in
/// source order; each step's terminal flag comes from `detector`.
pub fn decompose_attempt_with(
    raw: &str,
    policy: &DecomposePolicy,
    detector: &TerminalDetector,
) -> Result<Vec<ReasoningStep>, DecomposeError> {
    if raw.trim().is_empty() {
        return Err(DecomposeError::EmptyInput);
    }
    let pieces = match policy {
        DecomposePolicy::NumberedMarkers => split_numbered(raw)?,
        DecomposePolicy::LineSplit => raw
            .lines()
            .filter(|line| !line.trim().is_empty())
            .map(str::to_string)
            .collect(),
        DecomposePolicy::External(decomposer) => decomposer.decompose(raw)?,
    };
    let steps: Vec<ReasoningStep> = pieces
        .iter()
        .map(|piece| normalize_step(piece))
        .filter(|text| !text.is_empty())
        .enumerate()
        .map(|(i, text)| {
            let terminal = detector.is_terminal(&text);
            ReasoningStep {
                index: i + 1,
                text,
                terminal,
            }
        })
        .collect();
    if steps.is_empty() {
        return Err(DecomposeError::UnparsableFormat(
            "no steps remain after normalization".into(),
        ));
    }
    Ok(steps)
}

/// Splits on `Steps N:` markers. Any non-blank preamble before the first
/// marker becomes its own leading step so no content is dropped.
fn split_numbered(raw: &str) -> Result<Vec<String>, DecomposeError> {
    let marks: Vec<_> = NUMBERED_MARKER.find_iter(raw).collect();
    if marks.is_empty() {
        return Err(DecomposeError::UnparsableFormat(
            "no `Steps N:` markers found".into(),
        ));
    }
    let mut pieces = Vec::new();
    let preamble = &raw[..marks[0].start()];
    if !preamble.trim().is_empty() {
        pieces.push(preamble.to_string());
    }
    for (i, m) in marks.iter().enumerate() {
        let end = marks.get(i + 1).map_or(raw.len(), |next| next.start());
        pieces.push(raw[m.start()..end].to_string());
    }
    Ok(pieces)
}
