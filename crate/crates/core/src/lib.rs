//! SMRC: reward-guided tree search for correcting erroneous multi-step
//! solutions while retaining the solver's original correct steps.
//!
//! The crate is organized around the correction pipeline:
//!
//! - [`domain`]: shared types (problems, steps, paths, attempts) and the
//!   pluggable capability interfaces (generator, scorer, judges).
//! - [`reward`]: breadth-first rollout trees, leaf labeling, differential
//!   reward propagation, and process-supervision record export.
//! - [`search`]: the MCTS correction engine (subset initialization with
//!   pruning, UCT selection, validated expansion with bounded feedback,
//!   backpropagation) plus BFS and DFS baselines.
//! - [`synth`]: a deterministic arithmetic domain with oracle
//!   generator/scorer/judges for end-to-end verification without a model.
//! - [`eval`]: ACC / CSRR / HM metrics, MSEB-schema dataset loading, and
//!   report emission.
//! - [`llm`]: generator and judge implementations against any
//!   chat-completions-compatible endpoint.

pub mod domain;
pub mod eval;
pub mod llm;
pub mod reward;
pub mod search;
pub mod synth;

pub use domain::{
    AnswerJudge, ContainmentJudge, Generator, Problem, ReasoningPath, ReasoningStep, Scorer,
    StudentAttempt, Verdict,
};
pub use search::{run_bfs, run_dfs, run_mcts, CorrectionResult, SearchConfig};
