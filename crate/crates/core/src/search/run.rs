//! The correction loop (MCTS) and the BFS/DFS baselines.

use std::collections::VecDeque;

use crate::domain::{Generator, Problem, Scorer, StudentAttempt};

use super::expand::expand;
use super::init::initialize_tree;
use super::select::select_node;
use super::trace::{SearchTrace, TraceAction, TraceEvent};
use super::{
    CorrectionResult, NodeOrigin, SearchConfig, SearchError, SearchTree, TerminationCause,
};

/// A correction result together with the full search trace.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub result: CorrectionResult,
    pub trace: SearchTrace,
    pub tree: SearchTree,
}

/// Adds `reward` to the node and every ancestor up to the root, bumping
/// each visit count.
pub fn backpropagate(tree: &mut SearchTree, node_id: usize, reward: f64) {
    let mut cursor = Some(node_id);
    while let Some(id) = cursor {
        let node = tree.node_mut(id);
        node.reward_sum += reward;
        node.visits += 1;
        cursor = node.parent;
    }
}

/// The MCTS correction loop: initialize over student-step subsets, then up
/// to `max_iterations` rounds of select → expand → backpropagate, stopping
/// early when a terminal child reaches the reward threshold.
pub fn run_mcts(
    problem: &Problem,
    attempt: &StudentAttempt,
    generator: &dyn Generator,
    scorer: &dyn Scorer,
    config: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    config.validate()?;
    let mut trace = SearchTrace::default();
    let mut tree = initialize_tree(problem, attempt, scorer, config, &mut trace)?;

    for iteration in 1..=config.max_iterations {
        let selected = select_node(&tree, config.exploration);
        let expanded = expand(
            &mut tree,
            selected,
            problem,
            generator,
            scorer,
            config.feedback_max,
            config.seed_visits,
            iteration,
            &mut trace,
        )?;
        if let Some(child) = expanded {
            let reward = tree.node(child).value;
            backpropagate(&mut tree, child, reward);
            record(&mut trace, &tree, child, iteration, TraceAction::Expanded);
            if reward >= config.threshold && tree.node(child).terminal {
                record(&mut trace, &tree, child, iteration, TraceAction::Terminated);
                let result = CorrectionResult::from_node(
                    &tree,
                    child,
                    iteration,
                    TerminationCause::Threshold,
                );
                return Ok(SearchOutcome {
                    result,
                    trace,
                    tree,
                });
            }
        }
    }
    finalize(tree, trace, config.max_iterations)
}

/// Level-order baseline. The node holding the full attempt (its trailing
/// final-answer step dropped, so it can still be continued) is expanded
/// first, which retains every student step; exploration then proceeds
/// first-in-first-out with no value-based preference. Stops at the first
/// terminal path or on budget.
pub fn run_bfs(
    problem: &Problem,
    attempt: &StudentAttempt,
    generator: &dyn Generator,
    scorer: &dyn Scorer,
    config: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    config.validate()?;
    if attempt.is_empty() {
        return Err(SearchError::EmptyAttempt);
    }
    let mut trace = SearchTrace::default();
    let mut tree = SearchTree::new(config.seed_visits);

    let full_indices = expandable_full_attempt(attempt);
    let mut queue: VecDeque<usize> = VecDeque::new();
    if full_indices.is_empty() {
        queue.push_back(tree.root());
    } else {
        let path = crate::domain::ReasoningPath::from_attempt_subset(attempt, &full_indices)?;
        let value = crate::domain::clamp_score(
            scorer
                .score(problem, &path)
                .map_err(SearchError::Initialization)?,
        );
        let full = tree.add_child(
            tree.root(),
            path,
            value,
            NodeOrigin::StudentSubset,
            config.seed_visits,
        );
        queue.push_back(full);
        queue.push_back(tree.root());
    }

    let mut iterations_used = 0;
    while iterations_used < config.max_iterations {
        let Some(node_id) = queue.pop_front() else {
            break;
        };
        if tree.node(node_id).terminal {
            continue;
        }
        iterations_used += 1;
        let expanded = expand(
            &mut tree,
            node_id,
            problem,
            generator,
            scorer,
            config.feedback_max,
            config.seed_visits,
            iterations_used,
            &mut trace,
        )?;
        if let Some(child) = expanded {
            let reward = tree.node(child).value;
            backpropagate(&mut tree, child, reward);
            record(&mut trace, &tree, child, iterations_used, TraceAction::Expanded);
            if tree.node(child).terminal {
                return stop_at_terminal(tree, trace, child, iterations_used, config);
            }
            queue.push_back(child);
        }
    }
    finalize(tree, trace, iterations_used)
}

/// Depth-first baseline over the same initialization tree as MCTS: always
/// expands the deepest not-yet-expanded non-terminal node, breaking ties
/// toward the highest raw value and then the smallest id. Same termination
/// rules as BFS.
pub fn run_dfs(
    problem: &Problem,
    attempt: &StudentAttempt,
    generator: &dyn Generator,
    scorer: &dyn Scorer,
    config: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    config.validate()?;
    let mut trace = SearchTrace::default();
    let mut tree = initialize_tree(problem, attempt, scorer, config, &mut trace)?;

    let mut expanded_once: Vec<bool> = vec![false; tree.len()];
    let mut iterations_used = 0;
    while iterations_used < config.max_iterations {
        let candidate = tree
            .nodes()
            .filter(|n| !n.terminal && !expanded_once.get(n.id).copied().unwrap_or(false))
            .max_by(|a, b| {
                tree.depth(a.id)
                    .cmp(&tree.depth(b.id))
                    .then(a.value.total_cmp(&b.value))
                    .then(b.id.cmp(&a.id))
            })
            .map(|n| n.id);
        let Some(node_id) = candidate else {
            break;
        };
        iterations_used += 1;
        if expanded_once.len() < tree.len() {
            expanded_once.resize(tree.len(), false);
        }
        expanded_once[node_id] = true;
        let expanded = expand(
            &mut tree,
            node_id,
            problem,
            generator,
            scorer,
            config.feedback_max,
            config.seed_visits,
            iterations_used,
            &mut trace,
        )?;
        if let Some(child) = expanded {
            let reward = tree.node(child).value;
            backpropagate(&mut tree, child, reward);
            record(&mut trace, &tree, child, iterations_used, TraceAction::Expanded);
            if tree.node(child).terminal {
                return stop_at_terminal(tree, trace, child, iterations_used, config);
            }
            expanded_once.resize(tree.len(), false);
        }
    }
    finalize(tree, trace, iterations_used)
}

/// All student steps except a trailing final-answer step, which cannot be
/// continued past.
fn expandable_full_attempt(attempt: &StudentAttempt) -> Vec<usize> {
    let mut n = attempt.len();
    if attempt.steps[n - 1].terminal {
        n -= 1;
    }
    (1..=n).collect()
}

fn stop_at_terminal(
    tree: SearchTree,
    mut trace: SearchTrace,
    child: usize,
    iterations_used: u32,
    config: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    record(&mut trace, &tree, child, iterations_used, TraceAction::Terminated);
    let cause = if tree.node(child).value >= config.threshold {
        TerminationCause::Threshold
    } else {
        TerminationCause::Budget
    };
    let result = CorrectionResult::from_node(&tree, child, iterations_used, cause);
    Ok(SearchOutcome {
        result,
        trace,
        tree,
    })
}

/// Budget termination: the highest-value terminal node if any exists, else
/// the highest-value node overall; ties break to the smallest id.
fn finalize(
    tree: SearchTree,
    mut trace: SearchTrace,
    iterations_used: u32,
) -> Result<SearchOutcome, SearchError> {
    let best_of = |terminal_only: bool| {
        tree.nodes()
            .filter(|n| !terminal_only || n.terminal)
            .max_by(|a, b| a.value.total_cmp(&b.value).then(b.id.cmp(&a.id)))
            .map(|n| n.id)
    };
    let best = best_of(true).or_else(|| best_of(false)).expect("tree has a root");
    record(&mut trace, &tree, best, iterations_used, TraceAction::Terminated);
    let result = CorrectionResult::from_node(&tree, best, iterations_used, TerminationCause::Budget);
    Ok(SearchOutcome {
        result,
        trace,
        tree,
    })
}

fn record(trace: &mut SearchTrace, tree: &SearchTree, id: usize, iteration: u32, action: TraceAction) {
    let node = tree.node(id);
    trace.record(TraceEvent {
        iteration,
        selected_id: id,
        action,
        v: node.value,
        w: node.reward_sum,
        n: node.visits,
    });
}
