//! Append-only record of how alignments were built, dead ends included.
//!
//! Leaves hold the patterns a search starts from; every other node names
//! the two structures that were matched and unified and says what became of
//! the result. Ids are dense and parents always come first, so the trail is
//! a DAG by construction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alignment::{unify, Alignment};
use crate::grammar::{Origin, PatternId, SpPattern, Symbol};
use crate::scorer::Score;

pub const DEFAULT_NODE_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuditError {
    #[error("node {node} references unknown parent {parent}")]
    DanglingParent { node: usize, parent: usize },
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("alignment node {0} needs exactly two parents")]
    ParentCount(usize),
    #[error("node cap of {0} reached")]
    CapReached(usize),
    #[error("malformed trail: {0}")]
    Malformed(String),
    #[error("node {node} does not replay: {reason}")]
    Replay { node: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    PatternLeaf(Arc<SpPattern>),
    Alignment { hits: Vec<(usize, usize)> },
    /// Marks the point where recording stopped.
    CapReached,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fate {
    Retained,
    Pruned,
    Rejected(String),
}

impl std::fmt::Display for Fate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Fate::Retained => f.write_str("retained"),
            Fate::Pruned => f.write_str("pruned"),
            Fate::Rejected(reason) => write!(f, "rejected: {reason}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditNode {
    pub id: usize,
    pub kind: NodeKind,
    pub parents: Vec<usize>,
    pub cycle: usize,
    pub fate: Fate,
    pub score: Option<Score>,
}

impl AuditNode {
    pub fn leaf(pattern: Arc<SpPattern>) -> Self {
        AuditNode { id: 0, kind: NodeKind::PatternLeaf(pattern), parents: Vec::new(), cycle: 0, fate: Fate::Retained, score: None }
    }

    pub fn alignment(a: usize, b: usize, hits: Vec<(usize, usize)>, cycle: usize, fate: Fate, score: Option<Score>) -> Self {
        AuditNode { id: 0, kind: NodeKind::Alignment { hits }, parents: vec![a, b], cycle, fate, score }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, NodeKind::PatternLeaf(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditTrail {
    nodes: Vec<AuditNode>,
    cap: usize,
}

impl Default for AuditTrail {
    fn default() -> Self {
        Self::with_cap(DEFAULT_NODE_CAP)
    }
}

impl AuditTrail {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_cap(cap: usize) -> Self {
        AuditTrail { nodes: Vec::new(), cap: cap.max(1) }
    }

    pub fn nodes(&self) -> &[AuditNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&AuditNode> {
        self.nodes.get(id)
    }

    pub fn is_capped(&self) -> bool {
        self.nodes.last().is_some_and(|n| n.kind == NodeKind::CapReached)
    }

    /// Appends `node` (its `id` is overwritten) and returns the new id.
    /// Once the cap is hit a single marker node is appended and every later
    /// call fails with [`AuditError::CapReached`].
    pub fn record(&mut self, mut node: AuditNode) -> Result<usize, AuditError> {
        if self.is_capped() {
            return Err(AuditError::CapReached(self.cap));
        }
        let id = self.nodes.len();
        if let NodeKind::Alignment { .. } = node.kind {
            if node.parents.len() != 2 {
                return Err(AuditError::ParentCount(id));
            }
        }
        if let Some(&parent) = node.parents.iter().find(|&&p| p >= id || self.nodes[p].kind == NodeKind::CapReached) {
            return Err(AuditError::DanglingParent { node: id, parent });
        }
        if id >= self.cap {
            self.nodes.push(AuditNode {
                id,
                kind: NodeKind::CapReached,
                parents: Vec::new(),
                cycle: node.cycle,
                fate: Fate::Rejected("cap_reached".into()),
                score: None,
            });
            return Err(AuditError::CapReached(self.cap));
        }
        node.id = id;
        self.nodes.push(node);
        Ok(id)
    }

    /// The target followed by all of its ancestors, newest first: the
    /// bottom-to-top reading order of a construction trace.
    pub fn ancestor_trail(&self, target: usize) -> Result<Vec<&AuditNode>, AuditError> {
        if target >= self.nodes.len() {
            return Err(AuditError::UnknownNode(target));
        }
        let mut seen = BTreeSet::new();
        let mut stack = vec![target];
        while let Some(id) = stack.pop() {
            if seen.insert(id) {
                stack.extend(self.nodes[id].parents.iter().copied());
            }
        }
        Ok(seen.into_iter().rev().map(|id| &self.nodes[id]).collect())
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<JsonNode> = self.nodes.iter().map(JsonNode::from_node).collect();
        serde_json::to_string_pretty(&rows).expect("trail serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, AuditError> {
        Self::from_json_with_cap(text, DEFAULT_NODE_CAP)
    }

    pub fn from_json_with_cap(text: &str, cap: usize) -> Result<Self, AuditError> {
        let rows: Vec<JsonNode> = serde_json::from_str(text).map_err(|e| AuditError::Malformed(e.to_string()))?;
        let mut trail = AuditTrail::with_cap(cap.max(rows.len()));
        for (expected, row) in rows.into_iter().enumerate() {
            if row.id != expected {
                return Err(AuditError::Malformed(format!("node {} out of order", row.id)));
            }
            let node = row.into_node()?;
            if node.kind == NodeKind::CapReached {
                trail.nodes.push(AuditNode { id: expected, ..node });
                continue;
            }
            trail.record(node)?;
        }
        Ok(trail)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph audit {\n");
        for n in &self.nodes {
            let cd = n.score.map_or_else(|| "-".to_string(), |s| format!("{:.3}", s.cd));
            let shape = match n.kind {
                NodeKind::PatternLeaf(_) => "box",
                NodeKind::Alignment { .. } => "ellipse",
                NodeKind::CapReached => "octagon",
            };
            let _ = writeln!(out, "  n{} [label=\"{} ({})\", shape={}];", n.id, n.id, cd, shape);
        }
        for n in &self.nodes {
            for p in &n.parents {
                let _ = writeln!(out, "  n{} -> n{};", p, n.id);
            }
        }
        out.push_str("}\n");
        out
    }

    /// Rebuilds every alignment the trail can produce. Nodes rejected
    /// because unification failed must fail again, with the same reason.
    pub fn replay(&self) -> Result<BTreeMap<usize, Alignment>, AuditError> {
        let mut built: BTreeMap<usize, Alignment> = BTreeMap::new();
        for n in &self.nodes {
            match &n.kind {
                NodeKind::PatternLeaf(p) => {
                    built.insert(n.id, Alignment::leaf(p.clone(), n.id));
                }
                NodeKind::Alignment { hits } => {
                    let (a, b) = match (built.get(&n.parents[0]), built.get(&n.parents[1])) {
                        (Some(a), Some(b)) => (a, b),
                        _ => return Err(AuditError::Replay { node: n.id, reason: "parent did not replay".into() }),
                    };
                    match (unify(a, b, hits, n.id), &n.fate) {
                        (Ok(_), Fate::Rejected(r)) if r != DUPLICATE => {
                            return Err(AuditError::Replay { node: n.id, reason: format!("expected failure {r}") });
                        }
                        (Ok(child), _) => {
                            built.insert(n.id, child);
                        }
                        (Err(e), Fate::Rejected(r)) if r == e.tag() => {}
                        (Err(e), _) => return Err(AuditError::Replay { node: n.id, reason: e.tag().to_string() }),
                    }
                }
                NodeKind::CapReached => {}
            }
        }
        Ok(built)
    }
}

/// Rejection reason for a child that repeats an earlier structure.
pub const DUPLICATE: &str = "duplicate";

#[derive(Serialize, Deserialize)]
struct JsonPattern {
    id: u32,
    origin: Origin,
    symbols: Vec<Symbol>,
    id_positions: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct JsonNode {
    id: usize,
    kind: String,
    parents: Vec<usize>,
    cycle: usize,
    fate: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b_n: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b_e: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cd: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p_abs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pattern: Option<JsonPattern>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hits: Option<Vec<[usize; 2]>>,
}

impl JsonNode {
    fn from_node(n: &AuditNode) -> Self {
        let (kind, pattern, hits) = match &n.kind {
            NodeKind::PatternLeaf(p) => (
                "pattern_leaf",
                Some(JsonPattern {
                    id: p.id().0,
                    origin: p.origin(),
                    symbols: p.symbols().to_vec(),
                    id_positions: p.id_positions().to_vec(),
                }),
                None,
            ),
            NodeKind::Alignment { hits } => ("alignment", None, Some(hits.iter().map(|&(a, b)| [a, b]).collect())),
            NodeKind::CapReached => ("cap_reached", None, None),
        };
        let (fate, reason) = match &n.fate {
            Fate::Retained => ("retained", None),
            Fate::Pruned => ("pruned", None),
            Fate::Rejected(r) => ("rejected", Some(r.clone())),
        };
        JsonNode {
            id: n.id,
            kind: kind.into(),
            parents: n.parents.clone(),
            cycle: n.cycle,
            fate: fate.into(),
            reason,
            b_n: n.score.map(|s| s.b_n),
            b_e: n.score.map(|s| s.b_e),
            cd: n.score.map(|s| s.cd),
            p_abs: n.score.map(|s| s.p_abs),
            pattern,
            hits,
        }
    }

    fn into_node(self) -> Result<AuditNode, AuditError> {
        let bad = |what: &str| AuditError::Malformed(format!("node {}: {what}", self.id));
        let fate = match (self.fate.as_str(), &self.reason) {
            ("retained", _) => Fate::Retained,
            ("pruned", _) => Fate::Pruned,
            ("rejected", Some(r)) => Fate::Rejected(r.clone()),
            _ => return Err(bad("unknown fate")),
        };
        let score = match (self.b_n, self.b_e, self.cd, self.p_abs) {
            (Some(b_n), Some(b_e), Some(cd), Some(p_abs)) => Some(Score { b_n, b_e, cd, p_abs }),
            (None, None, None, None) => None,
            _ => return Err(bad("partial score")),
        };
        let kind = match self.kind.as_str() {
            "pattern_leaf" => {
                let p = self.pattern.as_ref().ok_or_else(|| bad("leaf without pattern"))?;
                let pattern = SpPattern::from_raw(PatternId(p.id), p.symbols.clone(), p.origin, p.id_positions.clone())
                    .map_err(|e| bad(&e.to_string()))?;
                NodeKind::PatternLeaf(Arc::new(pattern))
            }
            "alignment" => {
                let hits = self.hits.as_ref().ok_or_else(|| bad("alignment without hits"))?;
                NodeKind::Alignment { hits: hits.iter().map(|h| (h[0], h[1])).collect() }
            }
            "cap_reached" => NodeKind::CapReached,
            _ => return Err(bad("unknown kind")),
        };
        Ok(AuditNode { id: self.id, kind, parents: self.parents, cycle: self.cycle, fate, score })
    }
}
