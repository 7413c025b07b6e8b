//! Rollout trees and differential reward allocation.
//!
//! Breadth-first rollout trees get their leaves labeled ±1 by answer
//! correctness; propagation then backtracks from each leaf to the nearest
//! valued ancestor and distributes the reward difference uniformly over
//! the unassigned segment, turning sparse outcome labels into dense
//! process-level supervision.

mod build;
mod propagate;
mod tree;

pub use build::{build_rollout_tree, label_leaves, DEFAULT_NODE_CAP};
pub use propagate::{propagate_rewards, select_next_leaf, Phase};
pub use tree::{Label, RolloutNode, RolloutTree, TreeSnapshot};

use thiserror::Error;

use crate::domain::{DomainError, GeneratorError, JudgeError};

#[derive(Debug, Error)]
pub enum RewardError {
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Judge(#[from] JudgeError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("invalid rollout config: {0}")]
    InvalidConfig(String),
    #[error("node budget exceeded (cap {cap})")]
    NodeBudgetExceeded { cap: usize },
    #[error("leaf {id} is unlabeled")]
    UnlabeledLeaf { id: usize },
    #[error("node {id} has no propagated value")]
    NotPropagated { id: usize },
    #[error("node {id} already has a value")]
    ValueRewrite { id: usize },
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

use crate::domain::{Problem, ReasoningPath};
use serde::Serialize;

/// One process-supervision record: the path from the root to a node and
/// that node's propagated value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrainingRecord {
    pub problem_id: String,
    pub question: String,
    pub prefix: Vec<String>,
    pub value: f64,
}

/// Exports one record per non-root node in arena order. Fails with
/// `NotPropagated` if any reachable node lacks a value.
pub fn export_training_records(
    tree: &RolloutTree,
    problem: &Problem,
) -> Result<Vec<TrainingRecord>, RewardError> {
    let mut records = Vec::with_capacity(tree.len().saturating_sub(1));
    for node in tree.nodes() {
        if node.id == tree.root() {
            continue;
        }
        let value = tree
            .value_f64(node.id)
            .ok_or(RewardError::NotPropagated { id: node.id })?;
        let prefix: ReasoningPath = tree.path_steps(node.id)?;
        records.push(TrainingRecord {
            problem_id: problem.id.clone(),
            question: problem.question.clone(),
            prefix: prefix.texts().map(str::to_string).collect(),
            value,
        });
    }
    Ok(records)
}
