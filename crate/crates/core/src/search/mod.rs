//! The correction search engine: subset initialization with pruning, UCT
//! selection, validated expansion with bounded feedback, backpropagation,
//! and the BFS/DFS baselines.

mod expand;
mod init;
mod run;
mod select;
mod trace;

pub use init::initialize_tree;
pub use run::{backpropagate, run_bfs, run_dfs, run_mcts, SearchOutcome};
pub use select::{select_node, uct};
pub use trace::{SearchTrace, TraceAction, TraceEvent};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{DomainError, ReasoningPath, ScorerError};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search config: {0}")]
    InvalidConfig(String),
    #[error("initialization failed: {0}")]
    Initialization(ScorerError),
    #[error(transparent)]
    Scorer(#[from] ScorerError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("attempt has no steps")]
    EmptyAttempt,
}

/// Search hyperparameters. Defaults are the reference configuration:
/// c = 0.4, 30 attempts, threshold 0.95, at most 4 feedback rounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// UCT exploration constant.
    pub exploration: f64,
    /// Maximum search iterations (T).
    pub max_iterations: u32,
    /// Reward threshold for early termination.
    pub threshold: f64,
    /// Maximum feedback rounds per expansion.
    pub feedback_max: u32,
    /// Full subset enumeration up to this many student steps.
    pub enum_cap: usize,
    /// Per-layer beam width used beyond `enum_cap`.
    pub beam_width: usize,
    /// Seed each node's visit statistics with its raw score (W = v, N = 1)
    /// at creation instead of starting unvisited.
    pub seed_visits: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            exploration: 0.4,
            max_iterations: 30,
            threshold: 0.95,
            feedback_max: 4,
            enum_cap: 12,
            beam_width: 64,
            seed_visits: true,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        if self.exploration.is_nan() || self.exploration < 0.0 {
            return Err(SearchError::InvalidConfig(
                "exploration constant must be >= 0".into(),
            ));
        }
        if self.threshold.is_nan() || self.threshold <= 0.0 || self.threshold > 1.0 {
            return Err(SearchError::InvalidConfig(
                "threshold must be in (0, 1]".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(SearchError::InvalidConfig(
                "max_iterations must be >= 1".into(),
            ));
        }
        if self.enum_cap == 0 || self.beam_width == 0 {
            return Err(SearchError::InvalidConfig(
                "enum_cap and beam_width must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Where a search node's path came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeOrigin {
    StudentSubset,
    Generated,
}

/// A search-tree node: a partial path with its raw scorer value and the
/// running visit statistics UCT selection uses.
#[derive(Clone, Debug)]
pub struct SearchNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub path: ReasoningPath,
    /// Raw scorer output at creation, clamped to [-1, 1]. Pruning compares
    /// these; UCT uses the running statistics below.
    pub value: f64,
    pub visits: u64,
    pub reward_sum: f64,
    pub children: Vec<usize>,
    pub terminal: bool,
    pub origin: NodeOrigin,
}

/// Arena-backed search tree rooted at an empty path with value 0.
#[derive(Clone, Debug)]
pub struct SearchTree {
    nodes: Vec<SearchNode>,
}

impl SearchTree {
    pub fn new(seed_visits: bool) -> Self {
        Self {
            nodes: vec![SearchNode {
                id: 0,
                parent: None,
                path: ReasoningPath::empty(),
                value: 0.0,
                visits: u64::from(seed_visits),
                reward_sum: 0.0,
                children: Vec::new(),
                terminal: false,
                origin: NodeOrigin::StudentSubset,
            }],
        }
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: usize) -> &SearchNode {
        &self.nodes[id]
    }

    pub(crate) fn node_mut(&mut self, id: usize) -> &mut SearchNode {
        &mut self.nodes[id]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &SearchNode> {
        self.nodes.iter()
    }

    pub fn add_child(
        &mut self,
        parent: usize,
        path: ReasoningPath,
        value: f64,
        origin: NodeOrigin,
        seed_visits: bool,
    ) -> usize {
        let id = self.nodes.len();
        let terminal = path.is_terminal();
        self.nodes.push(SearchNode {
            id,
            parent: Some(parent),
            path,
            value,
            visits: u64::from(seed_visits),
            reward_sum: if seed_visits { value } else { 0.0 },
            children: Vec::new(),
            terminal,
            origin,
        });
        self.nodes[parent].children.push(id);
        id
    }

    /// Depth of a node (root = 0).
    pub fn depth(&self, id: usize) -> usize {
        let mut depth = 0;
        let mut cursor = id;
        while let Some(parent) = self.nodes[cursor].parent {
            depth += 1;
            cursor = parent;
        }
        depth
    }
}

/// Why a search stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminationCause {
    Threshold,
    Budget,
}

/// The corrected path plus termination cause and search statistics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorrectionResult {
    pub best_path: ReasoningPath,
    pub best_value: f64,
    pub iterations_used: u32,
    pub terminated_by: TerminationCause,
    /// Original indices of the student steps retained in `best_path`, in
    /// their original relative order.
    pub retained_student_steps: Vec<usize>,
}

impl CorrectionResult {
    pub(crate) fn from_node(
        tree: &SearchTree,
        node_id: usize,
        iterations_used: u32,
        terminated_by: TerminationCause,
    ) -> Self {
        let node = tree.node(node_id);
        let best_path = node.path.clone();
        debug_assert!(best_path.validate().is_ok());
        let retained_student_steps = best_path.student_indices();
        Self {
            best_path,
            best_value: node.value,
            iterations_used,
            terminated_by,
            retained_student_steps,
        }
    }
}
