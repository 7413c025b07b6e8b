//! Validated node expansion with bounded multi-turn feedback.

use crate::domain::{clamp_score, FeedbackRound, Generator, Problem, ReasoningStep, Scorer};

use super::trace::{SearchTrace, TraceAction, TraceEvent};
use super::{NodeOrigin, SearchError, SearchTree};

/// Asks the generator to continue `node`'s path and scores the extension.
/// When generation fails or the new value does not improve on the node's
/// raw value, the feedback prompt is issued and the attempt retried, up to
/// `feedback_max` rounds. On success exactly one child holding the whole
/// continuation is added; on exhaustion returns `None`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn expand(
    tree: &mut SearchTree,
    node_id: usize,
    problem: &Problem,
    generator: &dyn Generator,
    scorer: &dyn Scorer,
    feedback_max: u32,
    seed_visits: bool,
    iteration: u32,
    trace: &mut SearchTrace,
) -> Result<Option<usize>, SearchError> {
    debug_assert!(!tree.node(node_id).terminal, "terminal nodes cannot expand");
    let node_value = tree.node(node_id).value;
    let prefix = tree.node(node_id).path.clone();
    let mut feedback: Vec<FeedbackRound> = Vec::new();

    for round in 0..=feedback_max {
        let outcome = generator
            .generate(problem, &prefix, &feedback)
            .ok()
            .filter(|steps| !steps.is_empty());
        let rejected = match outcome {
            None => FeedbackRound { attempt_text: None },
            Some(mut steps) => {
                truncate_at_terminal(&mut steps);
                let candidate = prefix.extended_with_generated(&steps)?;
                let value = clamp_score(scorer.score(problem, &candidate)?);
                if value > node_value {
                    let child =
                        tree.add_child(node_id, candidate, value, NodeOrigin::Generated, seed_visits);
                    return Ok(Some(child));
                }
                FeedbackRound {
                    attempt_text: Some(render_steps(&steps)),
                }
            }
        };
        if round < feedback_max {
            trace.record(TraceEvent {
                iteration,
                selected_id: node_id,
                action: TraceAction::Feedback,
                v: node_value,
                w: tree.node(node_id).reward_sum,
                n: tree.node(node_id).visits,
            });
            feedback.push(rejected);
        }
    }
    trace.record(TraceEvent {
        iteration,
        selected_id: node_id,
        action: TraceAction::Pruned,
        v: node_value,
        w: tree.node(node_id).reward_sum,
        n: tree.node(node_id).visits,
    });
    Ok(None)
}

/// A continuation ends at its first terminal step; anything after a final
/// answer is dropped so the path invariant holds.
fn truncate_at_terminal(steps: &mut Vec<ReasoningStep>) {
    if let Some(pos) = steps.iter().position(|s| s.terminal) {
        steps.truncate(pos + 1);
    }
}

fn render_steps(steps: &[ReasoningStep]) -> String {
    steps
        .iter()
        .map(|s| s.text.as_str())
        .collect::<Vec<_>>()
        .join("\n")
}
