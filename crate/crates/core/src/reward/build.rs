//! Breadth-first rollout tree construction and leaf labeling.

use crate::domain::{AnswerJudge, Generator, Problem};

use super::tree::{Label, RolloutTree};
use super::RewardError;

pub const DEFAULT_NODE_CAP: usize = 10_000;

/// Builds a rollout tree level by level. Each non-terminal node above the
/// depth limit receives up to `branching` children, each taken from the
/// first step of a fresh generator continuation (duplicates are merged).
/// A generator failure discards the partial tree.
pub fn build_rollout_tree(
    problem: &Problem,
    generator: &dyn Generator,
    branching: usize,
    max_depth: usize,
    node_cap: usize,
) -> Result<RolloutTree, RewardError> {
    if branching == 0 || max_depth == 0 {
        return Err(RewardError::InvalidConfig(
            "branching and max_depth must be >= 1".into(),
        ));
    }
    if branching.saturating_mul(max_depth) > node_cap {
        return Err(RewardError::InvalidConfig(format!(
            "branching * max_depth = {} exceeds the node cap {node_cap}",
            branching * max_depth
        )));
    }

    let mut tree = RolloutTree::new(problem.id.clone());
    let mut frontier = vec![tree.root()];
    for _depth in 0..max_depth {
        let mut next = Vec::new();
        for &node_id in &frontier {
            if tree.node(node_id).terminal {
                continue;
            }
            let prefix = tree.path_steps(node_id)?;
            for _ in 0..branching {
                let continuation = generator.generate(problem, &prefix, &[])?;
                let Some(first) = continuation.first() else {
                    return Err(RewardError::Generator(
                        crate::domain::GeneratorError::EmptyCompletion,
                    ));
                };
                let duplicate = tree.node(node_id).children.iter().any(|&child| {
                    crate::domain::normalize_step(&tree.node(child).step_text)
                        == crate::domain::normalize_step(&first.text)
                });
                if duplicate {
                    continue;
                }
                if tree.len() >= node_cap {
                    return Err(RewardError::NodeBudgetExceeded { cap: node_cap });
                }
                let child = tree.add_child(node_id, first.text.clone(), first.terminal);
                next.push(child);
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(tree)
}

/// Labels every leaf +1 or -1 by whether the judge accepts the root-to-leaf
/// path. A judge failure aborts labeling.
pub fn label_leaves(
    mut tree: RolloutTree,
    judge: &dyn AnswerJudge,
    problem: &Problem,
) -> Result<RolloutTree, RewardError> {
    for id in tree.leaves() {
        let path = tree.path_steps(id)?;
        let verdict = judge.judge(problem, &path)?;
        tree.set_label(
            id,
            if verdict.valid {
                Label::Correct
            } else {
                Label::Incorrect
            },
        )?;
    }
    Ok(tree)
}
