//! Property suites: normalization idempotence, scorer clamping, metric
//! identities, UCT argmax equivalence, order preservation, and reward
//! propagation checked against an independent brute-force propagator.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smrc_core::domain::{clamp_score, normalize_step, Problem, ReasoningPath, Scorer, ScorerError};
use smrc_core::eval::hm;
use smrc_core::reward::{propagate_rewards, Label, RolloutTree};
use smrc_core::search::{run_bfs, run_dfs, run_mcts, uct, SearchConfig, SearchTree, TraceEvent};
use smrc_core::synth::{gen_problem, inject_errors, ErrorKind, ErrorSpec, OracleGenerator, OracleScorer};

// ---------------------------------------------------------------------------
// Independent brute-force propagator: re-derives every node value from the
// segment formula on plain parent arrays and f64 arithmetic.
// ---------------------------------------------------------------------------

fn brute_force_values(tree: &RolloutTree) -> Vec<Option<f64>> {
    let n = tree.len();
    let mut parent = vec![None; n];
    let mut depth = vec![0usize; n];
    let mut label = vec![0i8; n];
    let mut is_leaf = vec![false; n];
    for node in tree.nodes() {
        parent[node.id] = node.parent;
        depth[node.id] = node.depth;
        is_leaf[node.id] = tree.is_leaf(node.id);
        if let Some(l) = node.label {
            label[node.id] = l.signum();
        }
    }

    let mut value: Vec<Option<f64>> = vec![None; n];
    value[0] = Some(0.0);
    for phase in [1i8, -1i8] {
        loop {
            // Deepest unvalued leaf of this phase, smallest id on ties.
            let mut pick: Option<usize> = None;
            for id in 0..n {
                if !is_leaf[id] || label[id] != phase || value[id].is_some() {
                    continue;
                }
                if pick.is_none_or(|p| depth[id] > depth[p]) {
                    pick = Some(id);
                }
            }
            let Some(leaf) = pick else { break };
            let mut segment = Vec::new();
            let mut cursor = leaf;
            while value[cursor].is_none() {
                segment.push(cursor);
                cursor = parent[cursor].expect("root is valued");
            }
            let share = (f64::from(phase) - value[cursor].unwrap()) / segment.len() as f64;
            for &id in segment.iter().rev() {
                value[id] = Some(value[parent[id].unwrap()].unwrap() + share);
            }
        }
    }
    value
}

fn random_labeled_tree(rng: &mut ChaCha8Rng, max_nodes: usize) -> RolloutTree {
    let nodes = rng.gen_range(2..=max_nodes.max(2));
    let mut tree = RolloutTree::new("prop");
    for _ in 1..nodes {
        let parent = rng.gen_range(0..tree.len());
        tree.add_child(parent, format!("s{}", tree.len()), false);
    }
    for leaf in tree.leaves() {
        let label = if rng.gen_bool(0.5) {
            Label::Correct
        } else {
            Label::Incorrect
        };
        tree.set_label(leaf, label).unwrap();
    }
    tree
}

#[test]
fn propagation_matches_brute_force_on_500_random_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..500 {
        let tree = random_labeled_tree(&mut rng, 10);
        let expected = brute_force_values(&tree);
        // Write-once violations surface as errors inside propagate_rewards.
        let tree = propagate_rewards(tree).unwrap();
        for id in 0..tree.len() {
            let actual = tree.value_f64(id).unwrap_or(f64::NAN);
            let expected = expected[id].unwrap_or(f64::NAN);
            assert!(
                (actual - expected).abs() <= 1e-9,
                "case {case}, node {id}: {actual} vs {expected}"
            );
        }
        // Leaf fidelity is exact at the rational level.
        for leaf in tree.leaves() {
            let label = tree.node(leaf).label.unwrap();
            assert_eq!(tree.value(leaf), Some(&label.to_rational()));
        }
    }
}

#[test]
fn propagation_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let tree = random_labeled_tree(&mut rng, 16);
        let a = propagate_rewards(tree.clone()).unwrap();
        let b = propagate_rewards(tree).unwrap();
        for id in 0..a.len() {
            assert_eq!(a.value(id), b.value(id));
        }
    }
}

// ---------------------------------------------------------------------------
// UCT argmax equivalence on randomized trees.
// ---------------------------------------------------------------------------

fn random_search_tree(rng: &mut ChaCha8Rng) -> SearchTree {
    use smrc_core::domain::{ReasoningStep, StepOrigin};
    use smrc_core::search::backpropagate;
    let mut tree = SearchTree::new(true);
    let nodes = rng.gen_range(2..=10);
    for _ in 1..nodes {
        let parents: Vec<usize> = tree
            .nodes()
            .filter(|n| !n.terminal)
            .map(|n| n.id)
            .collect();
        let parent = parents[rng.gen_range(0..parents.len())];
        let terminal = rng.gen_bool(0.2);
        let mut path = tree.node(parent).path.clone();
        path.push(
            ReasoningStep::new(path.len() + 1, format!("s{}", tree.len()), terminal).unwrap(),
            StepOrigin::Generated,
        )
        .unwrap();
        let value = rng.gen_range(-1.0..=1.0);
        let id = tree.add_child(
            parent,
            path,
            value,
            smrc_core::search::NodeOrigin::Generated,
            rng.gen_bool(0.5),
        );
        for _ in 0..rng.gen_range(0..3) {
            backpropagate(&mut tree, id, rng.gen_range(-1.0..=1.0));
        }
    }
    tree
}

#[test]
fn select_node_descends_by_per_level_argmax() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for case in 0..200 {
        let tree = random_search_tree(&mut rng);
        let c = rng.gen_range(0.0..=1.0);
        let selected = smrc_core::search::select_node(&tree, c);

        // Replay the descent with a brute-force argmax at every level.
        let mut current = tree.root();
        loop {
            let viable: Vec<usize> = tree
                .node(current)
                .children
                .iter()
                .copied()
                .filter(|&id| !tree.node(id).terminal)
                .collect();
            if viable.is_empty() {
                assert_eq!(selected, current, "case {case}");
                break;
            }
            let parent_visits = tree.node(current).visits;
            let best = viable
                .iter()
                .copied()
                .fold(None::<(usize, f64)>, |best, id| {
                    let score = uct(tree.node(id), parent_visits, c);
                    match best {
                        Some((_, s)) if s >= score => best,
                        _ => Some((id, score)),
                    }
                })
                .unwrap()
                .0;
            if tree.node(best).visits == 0 {
                assert_eq!(selected, best, "case {case}");
                break;
            }
            current = best;
        }
    }
}

// ---------------------------------------------------------------------------
// Order preservation and determinism across the search algorithms.
// ---------------------------------------------------------------------------

#[test]
fn student_steps_stay_ordered_in_every_emitted_path() {
    for seed in 0..25u64 {
        let k = (seed % 6 + 1) as usize;
        let position = (seed as usize % k) + 1;
        let (problem, canonical) = gen_problem(seed, k).unwrap();
        let attempt = inject_errors(
            &canonical,
            &ErrorSpec {
                error_position: position,
                error_kind: ErrorKind::SignFlip,
            },
        )
        .unwrap();
        let problem = problem.to_problem();
        for runner in [run_mcts, run_bfs, run_dfs] {
            let outcome = runner(
                &problem,
                &attempt,
                &OracleGenerator,
                &OracleScorer,
                &SearchConfig::default(),
            )
            .unwrap();
            outcome.result.best_path.validate().unwrap();
            let indices = outcome.result.retained_student_steps.clone();
            assert!(indices.windows(2).all(|w| w[0] < w[1]), "{indices:?}");
            // Every node in the final tree also keeps the invariant.
            for node in outcome.tree.nodes() {
                node.path.validate().unwrap();
            }
        }
    }
}

#[test]
fn search_is_bit_identical_across_reruns() {
    let (problem, canonical) = gen_problem(77, 5).unwrap();
    let attempt = inject_errors(
        &canonical,
        &ErrorSpec {
            error_position: 3,
            error_kind: ErrorKind::DroppedTerm,
        },
    )
    .unwrap();
    let problem = problem.to_problem();
    for runner in [run_mcts, run_bfs, run_dfs] {
        let run = || {
            let outcome = runner(
                &problem,
                &attempt,
                &OracleGenerator,
                &OracleScorer,
                &SearchConfig::default(),
            )
            .unwrap();
            (
                serde_json::to_string(&outcome.result).unwrap(),
                outcome.trace.events().to_vec(),
            )
        };
        let (result_a, trace_a): (String, Vec<TraceEvent>) = run();
        let (result_b, trace_b) = run();
        assert_eq!(result_a, result_b);
        assert_eq!(trace_a, trace_b);
    }
}

// ---------------------------------------------------------------------------
// proptest invariants.
// ---------------------------------------------------------------------------

struct RawScorer(f64);
impl Scorer for RawScorer {
    fn score(&self, _: &Problem, _: &ReasoningPath) -> Result<f64, ScorerError> {
        Ok(self.0)
    }
}

proptest! {
    #[test]
    fn normalize_step_is_idempotent(text in ".{0,120}") {
        let once = normalize_step(&text);
        prop_assert_eq!(normalize_step(&once), once);
    }

    #[test]
    fn clamped_scores_stay_in_range(raw in proptest::num::f64::ANY) {
        let problem = Problem::new("p", "q", "a").unwrap();
        let scorer = RawScorer(raw);
        let clamped = clamp_score(scorer.score(&problem, &ReasoningPath::empty()).unwrap());
        prop_assert!((-1.0..=1.0).contains(&clamped));
    }

    #[test]
    fn hm_is_symmetric_and_bounded(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let h = hm(a, b);
        prop_assert!((hm(b, a) - h).abs() < 1e-12);
        prop_assert!(h <= a.max(b) + 1e-12);
        // When either metric is 0 the harmonic mean is 0, which is the min.
        prop_assert!(h >= a.min(b) - 1e-12 || (a.min(b) == 0.0 && h == 0.0));
    }

    #[test]
    fn csrr_is_permutation_invariant(flags in proptest::collection::vec(any::<bool>(), 1..20)) {
        use smrc_core::domain::{ReasoningStep, StepOrigin};
        use smrc_core::synth::OracleContainmentJudge;
        let samples: Vec<(Vec<String>, ReasoningPath)> = flags
            .iter()
            .map(|&kept| {
                let mut path = ReasoningPath::empty();
                path.push(
                    ReasoningStep::new(1, if kept { "keep" } else { "other" }, false).unwrap(),
                    StepOrigin::Generated,
                )
                .unwrap();
                (vec!["keep".to_string()], path)
            })
            .collect();
        let mut reversed = samples.clone();
        reversed.reverse();
        let forward = smrc_core::eval::csrr(&samples, &OracleContainmentJudge).unwrap();
        let backward = smrc_core::eval::csrr(&reversed, &OracleContainmentJudge).unwrap();
        prop_assert!((forward - backward).abs() < 1e-12);
    }
}
