//! UCT scoring and tree descent.

use super::{SearchNode, SearchTree};

/// Upper confidence bound for trees: `W/N + c * sqrt(ln(parent_N) / N)`.
/// Unvisited nodes score +infinity so they are explored first, in creation
/// order.
pub fn uct(node: &SearchNode, parent_visits: u64, c: f64) -> f64 {
    uct_parts(node.reward_sum, node.visits, parent_visits, c)
}

pub(crate) fn uct_parts(reward_sum: f64, visits: u64, parent_visits: u64, c: f64) -> f64 {
    if visits == 0 {
        return f64::INFINITY;
    }
    let n = visits as f64;
    let exploit = reward_sum / n;
    let explore = c * ((parent_visits.max(1) as f64).ln() / n).sqrt();
    exploit + explore
}

/// Descends from the root toward the child maximizing UCT (ties break to
/// the smallest id), stopping at a node with no expandable children or at
/// an unvisited child. Terminal children are skipped; a node whose children
/// are all terminal is returned itself. Never returns a terminal node.
pub fn select_node(tree: &SearchTree, c: f64) -> usize {
    let mut current = tree.root();
    loop {
        let parent_visits = tree.node(current).visits;
        let mut best: Option<(usize, f64)> = None;
        for &child_id in &tree.node(current).children {
            let child = tree.node(child_id);
            if child.terminal {
                continue;
            }
            let score = uct(child, parent_visits, c);
            let better = match best {
                None => true,
                Some((_, best_score)) => score > best_score,
            };
            if better {
                best = Some((child_id, score));
            }
        }
        match best {
            None => return current,
            Some((child_id, _)) => {
                if tree.node(child_id).visits == 0 {
                    return child_id;
                }
                current = child_id;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::ReasoningPath;
    use crate::search::NodeOrigin;

    fn tree_with(values: &[(usize, f64, u64, f64, bool)]) -> SearchTree {
        // (parent, v, visits, reward_sum, terminal)
        let mut tree = SearchTree::new(true);
        for &(parent, v, visits, reward_sum, terminal) in values {
            let id = tree.add_child(
                parent,
                ReasoningPath::empty(),
                v,
                NodeOrigin::Generated,
                false,
            );
            let node = tree.node_mut(id);
            node.visits = visits;
            node.reward_sum = reward_sum;
            node.terminal = terminal;
        }
        tree
    }

    #[test]
    fn uct_fixture_matches_hand_computation() {
        // 0.6/2 + 0.4 * sqrt(ln 10 / 2) = 0.7291932...
        let value = uct_parts(0.6, 2, 10, 0.4);
        assert!((value - 0.729_193_2).abs() < 1e-4, "{value}");
    }

    #[test]
    fn zero_exploration_is_exactly_exploitation() {
        assert_eq!(uct_parts(0.6, 2, 10, 0.0), 0.3);
        assert_eq!(uct_parts(-0.4, 4, 7, 0.0), -0.1);
    }

    #[test]
    fn single_visit_under_single_parent_visit_is_reward() {
        // ln 1 = 0, so the exploration term vanishes.
        assert_eq!(uct_parts(0.8, 1, 1, 0.4), 0.8);
    }

    #[test]
    fn unvisited_is_infinite() {
        assert_eq!(uct_parts(0.0, 0, 5, 0.4), f64::INFINITY);
    }

    #[test]
    fn descends_to_highest_exploitation_with_c_zero() {
        // Two chains under the root, rewards favour the second.
        let mut tree = SearchTree::new(true);
        let _a = tree.add_child(0, ReasoningPath::empty(), 0.3, NodeOrigin::Generated, true);
        let b = tree.add_child(0, ReasoningPath::empty(), 0.6, NodeOrigin::Generated, true);
        let b_child = tree.add_child(b, ReasoningPath::empty(), 0.7, NodeOrigin::Generated, true);
        assert_eq!(select_node(&tree, 0.0), b_child);
    }

    #[test]
    fn unvisited_child_selected_first() {
        let tree = tree_with(&[(0, 0.9, 3, 2.7, false), (0, 0.1, 0, 0.0, false)]);
        assert_eq!(select_node(&tree, 0.4), 2);
    }

    #[test]
    fn root_only_tree_returns_root() {
        let tree = SearchTree::new(true);
        assert_eq!(select_node(&tree, 0.4), 0);
    }

    #[test]
    fn all_terminal_children_returns_parent() {
        let tree = tree_with(&[(0, 0.9, 1, 0.9, true), (0, 0.8, 1, 0.8, true)]);
        assert_eq!(select_node(&tree, 0.4), 0);
    }

    #[test]
    fn ties_break_to_smallest_id() {
        let tree = tree_with(&[(0, 0.5, 1, 0.5, false), (0, 0.5, 1, 0.5, false)]);
        assert_eq!(select_node(&tree, 0.4), 1);
    }
}
