//! Differential reward allocation over a labeled rollout tree.
//!
//! Correct leaves are processed first (deepest first, creation order on
//! ties), then incorrect leaves. Each leaf backtracks to the nearest
//! ancestor with an assigned value (the anchor) and the difference
//! `label - value(anchor)` is shared uniformly across the unassigned
//! segment, assigned top-down as `value(parent) + share`.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::tree::{Label, RolloutTree};
use super::RewardError;

/// Which label class is being processed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Correct,
    Incorrect,
}

impl Phase {
    fn label(self) -> Label {
        match self {
            Phase::Correct => Label::Correct,
            Phase::Incorrect => Label::Incorrect,
        }
    }
}

/// The unprocessed leaf of the phase's label with maximum depth; ties break
/// toward the smallest arena id (creation order). `None` when exhausted.
pub fn select_next_leaf(
    tree: &RolloutTree,
    processed: &HashSet<usize>,
    phase: Phase,
) -> Option<usize> {
    let mut best: Option<usize> = None;
    for id in tree.leaves() {
        if processed.contains(&id) || tree.node(id).label != Some(phase.label()) {
            continue;
        }
        match best {
            Some(current) if tree.node(id).depth <= tree.node(current).depth => {}
            _ => best = Some(id),
        }
    }
    best
}

/// Assigns every node on a processed path its propagated value. Requires
/// all leaves labeled; the root keeps its fixed value of 0.
pub fn propagate_rewards(mut tree: RolloutTree) -> Result<RolloutTree, RewardError> {
    for id in tree.leaves() {
        if tree.node(id).label.is_none() {
            return Err(RewardError::UnlabeledLeaf { id });
        }
    }

    let mut processed: HashSet<usize> = HashSet::new();
    for phase in [Phase::Correct, Phase::Incorrect] {
        while let Some(leaf) = select_next_leaf(&tree, &processed, phase) {
            processed.insert(leaf);
            let label = tree.node(leaf).label.expect("leaves checked above");

            // Backtrack to the anchor: the first ancestor with a value.
            let mut segment = Vec::new();
            let mut cursor = leaf;
            while tree.value(cursor).is_none() {
                segment.push(cursor);
                cursor = tree
                    .node(cursor)
                    .parent
                    .expect("the root always has a value");
            }
            let anchor = cursor;

            if segment.is_empty() {
                // The leaf was already valued through another path, which
                // cannot happen for tree-shaped data.
                return Err(RewardError::InvariantViolation(format!(
                    "leaf {leaf} was valued before selection"
                )));
            }

            let share = (label.to_rational() - tree.value(anchor).expect("anchor has a value"))
                / BigRational::from_integer(BigInt::from(segment.len()));

            // Assign top-down so each node reads its parent's fresh value.
            for &id in segment.iter().rev() {
                let parent = tree.node(id).parent.expect("segment nodes are non-root");
                let value = tree.value(parent).expect("parent valued first") + &share;
                tree.set_value(id, value)?;
            }

            if tree.value(leaf) != Some(&label.to_rational()) {
                return Err(RewardError::InvariantViolation(format!(
                    "leaf {leaf} value does not telescope back to its label"
                )));
            }
        }
    }
    Ok(tree)
}

/// Test fixture: the two-branch, depth-3 tree with five labeled leaves.
/// Breadth-first creation order gives ids root=0, a1=1, a2=2, a3=3, a4=4,
/// a5=5, a6=6, a7=7, a8=8, a9=9, a10=10, a11=11.
#[cfg(test)]
pub(crate) fn two_branch_fixture() -> RolloutTree {
    two_branch_topology(true)
}

/// Same topology, optionally unlabeled.
#[cfg(test)]
pub(crate) fn two_branch_topology(labeled: bool) -> RolloutTree {
    let mut tree = RolloutTree::new("fig");
    let a1 = tree.add_child(0, "a1", false);
    let a2 = tree.add_child(0, "a2", false);
    let a3 = tree.add_child(a1, "a3", false);
    let a4 = tree.add_child(a1, "a4", false);
    let a5 = tree.add_child(a2, "a5", false);
    let a6 = tree.add_child(a2, "a6", false);
    let a7 = tree.add_child(a3, "a7", true);
    let a8 = tree.add_child(a4, "a8", true);
    let a9 = tree.add_child(a5, "a9", true);
    let a10 = tree.add_child(a5, "a10", true);
    let a11 = tree.add_child(a6, "a11", true);
    if labeled {
        for id in [a7, a9, a10] {
            tree.set_label(id, Label::Correct).unwrap();
        }
        for id in [a8, a11] {
            tree.set_label(id, Label::Incorrect).unwrap();
        }
    }
    tree
}
