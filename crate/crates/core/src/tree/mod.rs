//! Rooted binary trees with labeled ends.
//!
//! A tree of complexity `n` has `n + 1` leaves labeled `0..=n`, `n`
//! internal nodes and one root edge above the top node. Every node owns
//! exactly one edge, the one joining it to its parent, so edges and nodes
//! are addressed by the same [`NodeId`]. Children are unordered; the
//! canonical order puts the child with the smaller minimum label first.

mod enumerate;
mod random;
mod serial;
mod stats;

pub use enumerate::{double_factorial, enumerate_trees, tree_count, tree_from_index, TreeEnumerator};
pub use random::{caterpillar, random_tree};
pub use serial::{canonical_serialize, canonical_subtree, parse_tree};
pub use stats::{digit_count, digits_needed, edge_stats, EdgeStat, EdgeStats};

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

/// Largest complexity accepted by [`enumerate_trees`].
pub const MAX_ENUMERATION_COMPLEXITY: usize = 9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("label {0} appears more than once")]
    DuplicateLabel(u32),
    #[error("label {0} is missing (labels must be a permutation of 0..={1})")]
    MissingLabel(u32, usize),
    #[error("node at byte {pos} has {arity} children, expected 2")]
    NonBinary { pos: usize, arity: usize },
    #[error("complexity {0} is outside the enumeration guard 0..={max}", max = MAX_ENUMERATION_COMPLEXITY)]
    EnumerationGuard(usize),
    #[error("malformed tree: {0}")]
    Malformed(String),
}

/// Handle to a node (and to the edge above it) inside one tree's arena.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn from_index(i: usize) -> Self {
        NodeId(i as u32)
    }
}

/// An edge of a particular tree state. Any mutation of the tree
/// invalidates previously issued refs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EdgeRef {
    pub node: NodeId,
    stamp: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Kind {
    Leaf(u32),
    Internal([NodeId; 2]),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Node {
    pub(crate) parent: Option<NodeId>,
    pub(crate) kind: Kind,
}

static NEXT_STAMP: AtomicU64 = AtomicU64::new(1);

fn fresh_stamp() -> u64 {
    NEXT_STAMP.fetch_add(1, Ordering::Relaxed)
}

#[derive(Clone, Debug)]
pub struct LabeledTree {
    nodes: Vec<Node>,
    top: NodeId,
    complexity: usize,
    stamp: u64,
}

/// Incremental constructor used by the parser and the canonical shapes.
#[derive(Default, Debug)]
pub struct TreeBuilder {
    nodes: Vec<Node>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(cap: usize) -> Self {
        TreeBuilder { nodes: Vec::with_capacity(cap) }
    }

    pub fn leaf(&mut self, label: u32) -> NodeId {
        let id = NodeId::from_index(self.nodes.len());
        self.nodes.push(Node { parent: None, kind: Kind::Leaf(label) });
        id
    }

    pub fn join(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let id = NodeId::from_index(self.nodes.len());
        self.nodes[a.index()].parent = Some(id);
        self.nodes[b.index()].parent = Some(id);
        self.nodes.push(Node { parent: None, kind: Kind::Internal([a, b]) });
        id
    }

    /// Finishes the tree rooted at `top`, validating labels and shape.
    pub fn finish(self, top: NodeId) -> Result<LabeledTree, TreeError> {
        let leaves = self
            .nodes
            .iter()
            .filter(|n| matches!(n.kind, Kind::Leaf(_)))
            .count();
        if leaves == 0 {
            return Err(TreeError::Malformed("no leaves".into()));
        }
        let tree = LabeledTree {
            nodes: self.nodes,
            top,
            complexity: leaves - 1,
            stamp: fresh_stamp(),
        };
        tree.validate()?;
        Ok(tree)
    }
}

impl LabeledTree {
    /// The tree of complexity 0: a root edge ending in label 0.
    pub fn single_leaf() -> Self {
        let mut b = TreeBuilder::new();
        let top = b.leaf(0);
        b.finish(top).expect("single leaf is valid")
    }

    pub fn complexity(&self) -> usize {
        self.complexity
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn top(&self) -> NodeId {
        self.top
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id.index()].parent
    }

    pub fn children(&self, id: NodeId) -> Option<[NodeId; 2]> {
        match self.nodes[id.index()].kind {
            Kind::Internal(c) => Some(c),
            Kind::Leaf(_) => None,
        }
    }

    pub fn label(&self, id: NodeId) -> Option<u32> {
        match self.nodes[id.index()].kind {
            Kind::Leaf(l) => Some(l),
            Kind::Internal(_) => None,
        }
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        matches!(self.nodes[id.index()].kind, Kind::Leaf(_))
    }

    /// Interior edges join two trivalent vertices: internal, not the top.
    pub fn is_interior(&self, id: NodeId) -> bool {
        id != self.top && !self.is_leaf(id)
    }

    pub fn sibling(&self, id: NodeId) -> Option<NodeId> {
        let p = self.parent(id)?;
        let [a, b] = self.children(p)?;
        Some(if a == id { b } else { a })
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(NodeId::from_index)
    }

    pub fn interior_edges(&self) -> Vec<NodeId> {
        self.node_ids().filter(|&id| self.is_interior(id)).collect()
    }

    pub fn leaf_of_label(&self, label: u32) -> Option<NodeId> {
        self.node_ids().find(|&id| self.label(id) == Some(label))
    }

    pub fn edge(&self, id: NodeId) -> EdgeRef {
        EdgeRef { node: id, stamp: self.stamp }
    }

    pub fn root_edge(&self) -> EdgeRef {
        self.edge(self.top)
    }

    /// Checks that `e` was issued by this exact tree state.
    pub fn resolve(&self, e: EdgeRef) -> Option<NodeId> {
        (e.stamp == self.stamp && e.node.index() < self.nodes.len()).then_some(e.node)
    }

    pub(crate) fn restamp(&mut self) {
        self.stamp = fresh_stamp();
    }

    /// Node ids in pre-order from the top node (parents before children).
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.top];
        while let Some(id) = stack.pop() {
            out.push(id);
            if let Some([a, b]) = self.children(id) {
                stack.push(b);
                stack.push(a);
            }
        }
        out
    }

    /// Node ids with every child listed before its parent.
    pub fn postorder(&self) -> Vec<NodeId> {
        let mut out = self.preorder();
        out.reverse();
        out
    }

    /// Minimum leaf label below every node, indexed by node.
    pub fn min_labels(&self) -> Vec<u32> {
        let mut min = vec![u32::MAX; self.nodes.len()];
        for id in self.postorder() {
            min[id.index()] = match self.nodes[id.index()].kind {
                Kind::Leaf(l) => l,
                Kind::Internal([a, b]) => min[a.index()].min(min[b.index()]),
            };
        }
        min
    }

    /// Children of `id` in canonical order (smaller minimum label first).
    pub fn canonical_children(&self, id: NodeId, min: &[u32]) -> Option<[NodeId; 2]> {
        self.children(id).map(|[a, b]| {
            if min[a.index()] <= min[b.index()] {
                [a, b]
            } else {
                [b, a]
            }
        })
    }

    /// Depth of every edge: the root edge has height 1.
    pub fn heights(&self) -> Vec<u32> {
        let mut h = vec![0u32; self.nodes.len()];
        for id in self.preorder() {
            h[id.index()] = match self.parent(id) {
                Some(p) => h[p.index()] + 1,
                None => 1,
            };
        }
        h
    }

    pub fn height(&self) -> u32 {
        self.heights().into_iter().max().unwrap_or(1)
    }

    /// Ancestors of `id` starting with its parent.
    pub fn ancestors(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        std::iter::successors(self.parent(id), move |&p| self.parent(p))
    }

    /// Address of an edge: `a`/`b` choices in canonical child order from
    /// the top node; the empty string is the root edge.
    pub fn address_of(&self, id: NodeId) -> String {
        let min = self.min_labels();
        self.address_with(id, &min)
    }

    pub(crate) fn address_with(&self, id: NodeId, min: &[u32]) -> String {
        let mut path = Vec::new();
        let mut cur = id;
        while let Some(p) = self.parent(cur) {
            let [first, _] = self.canonical_children(p, min).expect("parent is internal");
            path.push(if first == cur { 'a' } else { 'b' });
            cur = p;
        }
        path.iter().rev().collect()
    }

    pub fn resolve_address(&self, addr: &str) -> Option<NodeId> {
        let min = self.min_labels();
        self.resolve_address_with(addr, &min)
    }

    pub(crate) fn resolve_address_with(&self, addr: &str, min: &[u32]) -> Option<NodeId> {
        let mut cur = self.top;
        for c in addr.chars() {
            let [first, second] = self.canonical_children(cur, min)?;
            cur = match c {
                'a' => first,
                'b' => second,
                _ => return None,
            };
        }
        Some(cur)
    }

    /// The labels of the leaves below `id`.
    pub fn labels_below(&self, id: NodeId) -> Vec<u32> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(x) = stack.pop() {
            match self.nodes[x.index()].kind {
                Kind::Leaf(l) => out.push(l),
                Kind::Internal([a, b]) => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        out
    }

    pub fn canonical(&self) -> String {
        canonical_serialize(self)
    }

    /// Rotation at edge `edge`: its child `pulled` moves up to become a
    /// child of the parent node, and the former sibling of `edge` takes
    /// the vacated slot. Node ids are preserved; the caller restamps.
    pub(crate) fn rotate_raw(&mut self, edge: NodeId, pulled: NodeId) {
        let parent = self.parent(edge).expect("interior edge has a parent");
        let sibling = self.sibling(edge).expect("interior edge has a sibling");
        if let Kind::Internal(ref mut c) = self.nodes[parent.index()].kind {
            let slot = if c[0] == sibling { 0 } else { 1 };
            c[slot] = pulled;
        }
        if let Kind::Internal(ref mut c) = self.nodes[edge.index()].kind {
            let slot = if c[0] == pulled { 0 } else { 1 };
            c[slot] = sibling;
        }
        self.nodes[pulled.index()].parent = Some(parent);
        self.nodes[sibling.index()].parent = Some(edge);
    }

    /// Inserts a new leaf `label` by subdividing the edge above `x`. The
    /// caller is responsible for keeping labels a permutation.
    pub(crate) fn graft_above(&mut self, x: NodeId, label: u32) {
        let leaf = NodeId::from_index(self.nodes.len());
        let join = NodeId::from_index(self.nodes.len() + 1);
        let parent = self.parent(x);
        self.nodes.push(Node { parent: Some(join), kind: Kind::Leaf(label) });
        self.nodes.push(Node { parent, kind: Kind::Internal([x, leaf]) });
        self.nodes[x.index()].parent = Some(join);
        match parent {
            Some(p) => {
                if let Kind::Internal(ref mut c) = self.nodes[p.index()].kind {
                    let slot = if c[0] == x { 0 } else { 1 };
                    c[slot] = join;
                }
            }
            None => self.top = join,
        }
        self.complexity += 1;
        self.restamp();
    }

    /// Structural equality of arenas (same node ids in the same places).
    #[cfg(debug_assertions)]
    pub(crate) fn same_arena(&self, other: &LabeledTree) -> bool {
        self.top == other.top && self.nodes == other.nodes
    }

    /// Checks every structural and labeling invariant.
    pub fn validate(&self) -> Result<(), TreeError> {
        let total = self.nodes.len();
        if self.top.index() >= total || self.parent(self.top).is_some() {
            return Err(TreeError::Malformed("top node is not a root".into()));
        }
        let n = self.complexity;
        if total != 2 * n + 1 {
            return Err(TreeError::Malformed(format!("{total} nodes for complexity {n}")));
        }
        let mut labels = Vec::with_capacity(n + 1);
        let mut reached = 0usize;
        let mut internal = 0usize;
        let mut stack = vec![self.top];
        while let Some(id) = stack.pop() {
            reached += 1;
            if reached > total {
                return Err(TreeError::Malformed("cycle in node arena".into()));
            }
            match self.nodes[id.index()].kind {
                Kind::Leaf(l) => labels.push(l),
                Kind::Internal([a, b]) => {
                    internal += 1;
                    for c in [a, b] {
                        if self.parent(c) != Some(id) {
                            return Err(TreeError::Malformed("parent link mismatch".into()));
                        }
                        stack.push(c);
                    }
                }
            }
        }
        if reached != total || internal != n {
            return Err(TreeError::Malformed("unreachable nodes".into()));
        }
        check_labels(&mut labels)
    }

    /// Counts of (exterior, interior) edges: `(n + 2, n - 1)` for `n >= 1`.
    pub fn edge_counts(&self) -> (usize, usize) {
        let interior = self.interior_edges().len();
        // n + 1 ends plus the root edge; for n = 0 the root edge is the end.
        let exterior = if self.complexity == 0 { 1 } else { self.complexity + 2 };
        (exterior, interior)
    }
}

/// Verifies that `labels` is a permutation of `0..labels.len()`.
pub(crate) fn check_labels(labels: &mut [u32]) -> Result<(), TreeError> {
    let n = labels.len().saturating_sub(1);
    labels.sort_unstable();
    if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
        return Err(TreeError::DuplicateLabel(w[0]));
    }
    match labels.iter().enumerate().find(|&(i, &l)| l as usize != i) {
        Some((i, _)) => Err(TreeError::MissingLabel(i as u32, n)),
        None => Ok(()),
    }
}

impl PartialEq for LabeledTree {
    fn eq(&self, other: &Self) -> bool {
        self.complexity == other.complexity && self.canonical() == other.canonical()
    }
}

impl Eq for LabeledTree {}

impl Hash for LabeledTree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical().hash(state);
    }
}

impl fmt::Display for LabeledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl std::str::FromStr for LabeledTree {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_tree(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_counts_follow_complexity() {
        let t = parse_tree("(((0,1),2),((3,4),5))").unwrap();
        assert_eq!(t.complexity(), 5);
        assert_eq!(t.edge_counts(), (7, 4));
        assert_eq!(t.node_count(), 11);
    }

    #[test]
    fn addresses_round_trip() {
        let t = parse_tree("((2,(0,3)),1)").unwrap();
        for id in t.node_ids() {
            let a = t.address_of(id);
            assert_eq!(t.resolve_address(&a), Some(id), "address {a}");
        }
        assert_eq!(t.address_of(t.top()), "");
        let leaf0 = t.leaf_of_label(0).unwrap();
        assert_eq!(t.address_of(leaf0), "aaa");
    }

    #[test]
    fn stale_refs_are_rejected() {
        let t = parse_tree("((0,1),2)").unwrap();
        let u = parse_tree("((0,1),2)").unwrap();
        let e = t.root_edge();
        assert!(t.resolve(e).is_some());
        assert!(u.resolve(e).is_none());
    }

    #[test]
    fn validate_rejects_broken_links() {
        let mut t = parse_tree("((0,1),2)").unwrap();
        let leaf = t.leaf_of_label(2).unwrap();
        t.nodes[leaf.index()].parent = None;
        assert!(t.validate().is_err());
    }
}
