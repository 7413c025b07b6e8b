//! Fixture builders shared by the engine benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smrc_core::domain::{Problem, StudentAttempt};
use smrc_core::reward::{Label, RolloutTree};
use smrc_core::synth::{gen_problem, inject_errors, ErrorKind, ErrorSpec};

/// A random rollout tree of roughly `target_nodes` nodes with every leaf
/// labeled.
pub fn random_labeled_tree(seed: u64, target_nodes: usize) -> RolloutTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tree = RolloutTree::new(format!("bench-{seed}"));
    let mut frontier = vec![tree.root()];
    while tree.len() < target_nodes {
        let parent = frontier[rng.gen_range(0..frontier.len())];
        let child = tree.add_child(parent, format!("step {}", tree.len()), false);
        frontier.push(child);
    }
    for leaf in tree.leaves() {
        let label = if rng.gen_bool(0.5) {
            Label::Correct
        } else {
            Label::Incorrect
        };
        tree.set_label(leaf, label).expect("frontier nodes are leaves");
    }
    tree
}

/// A synthetic problem with an error injected mid-solution.
pub fn oracle_case(seed: u64, k: usize, error_position: usize) -> (Problem, StudentAttempt) {
    let (problem, canonical) = gen_problem(seed, k).expect("k within range");
    let attempt = inject_errors(
        &canonical,
        &ErrorSpec {
            error_position,
            error_kind: ErrorKind::OffByOne,
        },
    )
    .expect("valid error spec");
    (problem.to_problem(), attempt)
}
