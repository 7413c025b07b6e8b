//! Search-tree initialization over ordered student-step subsets.
//!
//! Layer-wise construction: each node's children append one unused student
//! step whose original index exceeds every index already in the node's
//! path, so every subset keeps the original relative order. A child scoring
//! below its parent is pruned immediately and its subtree never built. Up
//! to `enum_cap` steps this enumerates all 2^n subsets; beyond it each
//! layer keeps only the `beam_width` highest-scoring nodes.

use crate::domain::{clamp_score, Problem, ReasoningPath, Scorer, StudentAttempt};

use super::trace::{SearchTrace, TraceAction, TraceEvent};
use super::{NodeOrigin, SearchConfig, SearchError, SearchTree};

pub fn initialize_tree(
    problem: &Problem,
    attempt: &StudentAttempt,
    scorer: &dyn Scorer,
    config: &SearchConfig,
    trace: &mut SearchTrace,
) -> Result<SearchTree, SearchError> {
    config.validate()?;
    let n = attempt.len();
    if n == 0 {
        return Err(SearchError::EmptyAttempt);
    }
    let beamed = n > config.enum_cap;

    let mut tree = SearchTree::new(config.seed_visits);
    let mut layer = vec![tree.root()];
    for _size in 1..=n {
        // Candidate children of the current layer, scored and prune-checked
        // before materialization so beaming can drop them wholesale.
        let mut candidates: Vec<(usize, ReasoningPath, f64)> = Vec::new();
        for &parent_id in &layer {
            let parent = tree.node(parent_id);
            if parent.terminal {
                continue;
            }
            let last_index = parent.path.student_indices().last().copied().unwrap_or(0);
            let parent_value = parent.value;
            for step_index in (last_index + 1)..=n {
                let mut path = parent.path.clone();
                path.push(
                    attempt.steps[step_index - 1].clone(),
                    crate::domain::StepOrigin::StudentRetained,
                )?;
                let value = clamp_score(
                    scorer
                        .score(problem, &path)
                        .map_err(SearchError::Initialization)?,
                );
                if value < parent_value {
                    trace.record(TraceEvent {
                        iteration: 0,
                        selected_id: parent_id,
                        action: TraceAction::Pruned,
                        v: value,
                        w: 0.0,
                        n: 0,
                    });
                    continue;
                }
                candidates.push((parent_id, path, value));
            }
        }
        if beamed && candidates.len() > config.beam_width {
            // Highest value first; stable sort keeps creation order on ties.
            candidates.sort_by(|a, b| b.2.total_cmp(&a.2));
            candidates.truncate(config.beam_width);
            // Restore creation order so arena ids stay deterministic.
            candidates.sort_by_key(|(parent_id, path, _)| {
                (*parent_id, path.student_indices().last().copied())
            });
        }
        if candidates.is_empty() {
            break;
        }
        layer = candidates
            .into_iter()
            .map(|(parent_id, path, value)| {
                tree.add_child(
                    parent_id,
                    path,
                    value,
                    NodeOrigin::StudentSubset,
                    config.seed_visits,
                )
            })
            .collect();
    }
    Ok(tree)
}
