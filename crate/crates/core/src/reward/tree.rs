//! Arena-backed rollout tree with write-once node values.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::domain::{ReasoningPath, ReasoningStep, StepOrigin};

use super::RewardError;

/// Outcome label on a leaf: +1 for a correct final answer, -1 otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Correct,
    Incorrect,
}

impl Label {
    pub fn signum(self) -> i8 {
        match self {
            Label::Correct => 1,
            Label::Incorrect => -1,
        }
    }

    pub fn to_rational(self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.signum()))
    }
}

#[derive(Clone, Debug)]
pub struct RolloutNode {
    pub id: usize,
    pub parent: Option<usize>,
    /// Empty for the root; otherwise the reasoning step this node adds.
    pub step_text: String,
    pub children: Vec<usize>,
    pub depth: usize,
    /// Whether the node's step states a final answer (such nodes stay
    /// leaves during construction).
    pub terminal: bool,
    pub label: Option<Label>,
    value: Option<BigRational>,
}

/// Breadth-first rollout tree. The root is node 0 with value fixed at 0;
/// every other node's value is assigned exactly once during propagation.
#[derive(Clone, Debug)]
pub struct RolloutTree {
    nodes: Vec<RolloutNode>,
    problem_id: String,
}

impl RolloutTree {
    pub fn new(problem_id: impl Into<String>) -> Self {
        Self {
            nodes: vec![RolloutNode {
                id: 0,
                parent: None,
                step_text: String::new(),
                children: Vec::new(),
                depth: 0,
                terminal: false,
                label: None,
                value: Some(BigRational::zero()),
            }],
            problem_id: problem_id.into(),
        }
    }

    pub fn problem_id(&self) -> &str {
        &self.problem_id
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

    pub fn node(&self, id: usize) -> &RolloutNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &RolloutNode> {
        self.nodes.iter()
    }

    pub fn add_child(&mut self, parent: usize, step_text: impl Into<String>, terminal: bool) -> usize {
        let id = self.nodes.len();
        let depth = self.nodes[parent].depth + 1;
        self.nodes.push(RolloutNode {
            id,
            parent: Some(parent),
            step_text: step_text.into(),
            children: Vec::new(),
            depth,
            terminal,
            label: None,
            value: None,
        });
        self.nodes[parent].children.push(id);
        id
    }

    pub fn is_leaf(&self, id: usize) -> bool {
        self.nodes[id].children.is_empty() && id != self.root()
    }

    /// Leaf ids in creation order.
    pub fn leaves(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .filter(|n| self.is_leaf(n.id))
            .map(|n| n.id)
            .collect()
    }

    /// Labels a leaf. Labeling an interior node is an invariant violation.
    pub fn set_label(&mut self, id: usize, label: Label) -> Result<(), RewardError> {
        if !self.is_leaf(id) {
            return Err(RewardError::InvariantViolation(format!(
                "node {id} is not a leaf"
            )));
        }
        self.nodes[id].label = Some(label);
        Ok(())
    }

    /// Write-once value assignment.
    pub(crate) fn set_value(&mut self, id: usize, value: BigRational) -> Result<(), RewardError> {
        let node = &mut self.nodes[id];
        if node.value.is_some() {
            return Err(RewardError::ValueRewrite { id });
        }
        node.value = Some(value);
        Ok(())
    }

    pub fn value(&self, id: usize) -> Option<&BigRational> {
        self.nodes[id].value.as_ref()
    }

    pub fn value_f64(&self, id: usize) -> Option<f64> {
        self.nodes[id].value.as_ref().map(|v| {
            v.to_f64()
                .expect("propagated values have bounded magnitude")
        })
    }

    /// Node ids from the root to `id`, inclusive.
    pub fn path_ids(&self, id: usize) -> Vec<usize> {
        let mut ids = vec![id];
        let mut cur = id;
        while let Some(parent) = self.nodes[cur].parent {
            ids.push(parent);
            cur = parent;
        }
        ids.reverse();
        ids
    }

    /// The reasoning path from the root to `id` (root's empty step
    /// excluded).
    pub fn path_steps(&self, id: usize) -> Result<ReasoningPath, crate::domain::DomainError> {
        let mut path = ReasoningPath::empty();
        for (pos, node_id) in self.path_ids(id).into_iter().skip(1).enumerate() {
            let node = &self.nodes[node_id];
            path.push(
                ReasoningStep::new(pos + 1, node.step_text.clone(), node.terminal)?,
                StepOrigin::Generated,
            )?;
        }
        Ok(path)
    }

    pub fn to_snapshot(&self) -> TreeSnapshot {
        TreeSnapshot {
            root: self.root(),
            nodes: self
                .nodes
                .iter()
                .map(|n| SnapshotNode {
                    id: n.id,
                    parent: n.parent,
                    step: n.step_text.clone(),
                    terminal: n.terminal,
                    label: n.label.map(Label::signum),
                    value: n.value.as_ref().and_then(|v| v.to_f64()),
                })
                .collect(),
        }
    }

    /// Rebuilds a tree from a snapshot. Values are restored from their
    /// decimal form, so they are suitable for inspection and golden tests
    /// rather than continued exact propagation.
    pub fn from_snapshot(problem_id: impl Into<String>, snapshot: &TreeSnapshot) -> Result<Self, RewardError> {
        let mut tree = RolloutTree::new(problem_id);
        for node in &snapshot.nodes {
            if node.id == snapshot.root {
                continue;
            }
            let parent = node.parent.ok_or_else(|| {
                RewardError::InvariantViolation(format!("non-root node {} has no parent", node.id))
            })?;
            if parent >= tree.nodes.len() {
                return Err(RewardError::InvariantViolation(format!(
                    "node {} references unknown parent {parent}",
                    node.id
                )));
            }
            let id = tree.add_child(parent, node.step.clone(), node.terminal);
            if id != node.id {
                return Err(RewardError::InvariantViolation(format!(
                    "snapshot nodes are not in arena order (expected id {id}, found {})",
                    node.id
                )));
            }
            if let Some(signum) = node.label {
                tree.nodes[id].label = Some(if signum >= 0 {
                    Label::Correct
                } else {
                    Label::Incorrect
                });
            }
            if let Some(value) = node.value {
                tree.nodes[id].value = BigRational::from_f64(value);
            }
        }
        Ok(tree)
    }
}

/// Serializable tree snapshot: `{nodes: [{id, parent, step, label?, value?}], root}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TreeSnapshot {
    pub nodes: Vec<SnapshotNode>,
    pub root: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SnapshotNode {
    pub id: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parent: Option<usize>,
    pub step: String,
    #[serde(default)]
    pub terminal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}
