//! Whitehead steps and simultaneous Whitehead moves on labeled trees.
//!
//! A step at an interior edge `C` (parent `P`, sibling `S`, children `X`
//! and `Y`) pulling `X` regroups the four edges around `C` as
//! `{P, X} | {S, Y}`: `X` becomes a child of `P` and `S` moves below `C`.
//! Node ids are stable under steps, so an [`EdgeRef`] can be reissued for
//! the rewritten tree with [`LabeledTree::edge`].

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::tree::{EdgeRef, LabeledTree, NodeId};

/// Largest complexity for which [`neighbors_s`] enumerates.
pub const MAX_NEIGHBORS_S_COMPLEXITY: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("edge '{0}' is not interior")]
    NotInterior(String),
    #[error("edge reference does not belong to this tree state")]
    StaleEdge,
    #[error("steps at '{0}' and '{1}' share a vertex")]
    NotDisjoint(String, String),
    #[error("no edge at address '{0}'")]
    BadAddress(String),
    #[error("simultaneous neighbors refused for n = {0} > {max}", max = MAX_NEIGHBORS_S_COMPLEXITY)]
    NeighborGuard(usize),
    #[error("script line {line}: {msg}")]
    Script { line: usize, msg: String },
}

/// Which child of the edge's node, in canonical order, moves up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    PullFirst,
    PullSecond,
}

impl Direction {
    pub fn digit(self) -> u8 {
        match self {
            Direction::PullFirst => 1,
            Direction::PullSecond => 2,
        }
    }

    pub fn from_digit(d: u8) -> Option<Self> {
        match d {
            1 => Some(Direction::PullFirst),
            2 => Some(Direction::PullSecond),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WhiteheadStep {
    pub edge: EdgeRef,
    pub direction: Direction,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimultaneousMove {
    pub steps: Vec<WhiteheadStep>,
}

/// A step in node-id form: at `edge`, the child `pulled` moves up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LocalStep {
    pub edge: NodeId,
    pub pulled: NodeId,
}

impl LocalStep {
    /// The step undoing `self` on the rewritten tree: at the same edge,
    /// pull back the node that was displaced.
    pub fn inverse(self, before: &LabeledTree) -> LocalStep {
        let sibling = before.sibling(self.edge).expect("interior edge");
        LocalStep { edge: self.edge, pulled: sibling }
    }
}

/// The two vertices of an interior edge: its parent node and its own node.
fn vertices(t: &LabeledTree, e: NodeId) -> [NodeId; 2] {
    [t.parent(e).expect("interior edge has a parent"), e]
}

/// Returns the first pair of steps sharing a vertex, if any.
pub fn find_conflict(t: &LabeledTree, edges: &[NodeId]) -> Option<(NodeId, NodeId)> {
    let mut owner: std::collections::HashMap<NodeId, NodeId> = std::collections::HashMap::new();
    for &e in edges {
        for v in vertices(t, e) {
            if let Some(&other) = owner.get(&v) {
                return Some((other, e));
            }
            owner.insert(v, e);
        }
    }
    None
}

/// Same as [`find_conflict`] using a dense scratch array; for hot loops.
pub(crate) fn is_disjoint(t: &LabeledTree, edges: &[NodeId], scratch: &mut Vec<bool>) -> bool {
    scratch.clear();
    scratch.resize(t.node_count(), false);
    for &e in edges {
        for v in vertices(t, e) {
            if std::mem::replace(&mut scratch[v.index()], true) {
                return false;
            }
        }
    }
    true
}

/// Converts a public step into node form, validating it against `t`.
pub fn localize(t: &LabeledTree, s: WhiteheadStep, min: &[u32]) -> Result<LocalStep, MoveError> {
    let edge = t.resolve(s.edge).ok_or(MoveError::StaleEdge)?;
    if !t.is_interior(edge) {
        return Err(MoveError::NotInterior(t.address_with(edge, min)));
    }
    let [first, second] = t.canonical_children(edge, min).expect("interior edge is internal");
    let pulled = match s.direction {
        Direction::PullFirst => first,
        Direction::PullSecond => second,
    };
    Ok(LocalStep { edge, pulled })
}

/// The public form of a local step on the tree it applies to.
pub fn globalize(t: &LabeledTree, s: LocalStep, min: &[u32]) -> WhiteheadStep {
    let [first, _] = t.canonical_children(s.edge, min).expect("interior edge is internal");
    let direction = if first == s.pulled { Direction::PullFirst } else { Direction::PullSecond };
    WhiteheadStep { edge: t.edge(s.edge), direction }
}

/// Applies node-form steps in place. The steps must be valid and pairwise
/// disjoint on `t`; debug builds check that the result does not depend on
/// the application order.
pub fn apply_local(t: &mut LabeledTree, steps: &[LocalStep]) {
    #[cfg(debug_assertions)]
    let reversed = if steps.len() > 1 {
        let mut u = t.clone();
        for s in steps.iter().rev() {
            u.rotate_raw(s.edge, s.pulled);
        }
        Some(u)
    } else {
        None
    };
    for s in steps {
        debug_assert_eq!(t.parent(s.pulled), Some(s.edge), "pulled node is not a child of the edge");
        t.rotate_raw(s.edge, s.pulled);
    }
    #[cfg(debug_assertions)]
    if let Some(u) = reversed {
        assert!(t.same_arena(&u), "simultaneous steps do not commute");
    }
    t.restamp();
}

pub fn apply_step(t: &LabeledTree, s: WhiteheadStep) -> Result<LabeledTree, MoveError> {
    let min = t.min_labels();
    let local = localize(t, s, &min)?;
    let mut out = t.clone();
    apply_local(&mut out, &[local]);
    Ok(out)
}

/// Validates every step, checks strict vertex-disjointness and applies
/// all steps atomically.
pub fn apply_simultaneous(t: &LabeledTree, m: &SimultaneousMove) -> Result<LabeledTree, MoveError> {
    let min = t.min_labels();
    let locals = m
        .steps
        .iter()
        .map(|&s| localize(t, s, &min))
        .collect::<Result<Vec<_>, _>>()?;
    let edges: Vec<NodeId> = locals.iter().map(|s| s.edge).collect();
    if let Some((a, b)) = find_conflict(t, &edges) {
        return Err(MoveError::NotDisjoint(t.address_with(a, &min), t.address_with(b, &min)));
    }
    let mut out = t.clone();
    apply_local(&mut out, &locals);
    Ok(out)
}

/// All trees one Whitehead step away, deduplicated.
pub fn neighbors_w(t: &LabeledTree) -> Vec<LabeledTree> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for e in t.interior_edges() {
        for pulled in t.children(e).expect("interior") {
            let mut u = t.clone();
            apply_local(&mut u, &[LocalStep { edge: e, pulled }]);
            if seen.insert(u.canonical()) {
                out.push(u);
            }
        }
    }
    out
}

/// All trees one simultaneous move away (at least one step), deduplicated.
pub fn neighbors_s(t: &LabeledTree) -> Result<Vec<LabeledTree>, MoveError> {
    if t.complexity() > MAX_NEIGHBORS_S_COMPLEXITY {
        return Err(MoveError::NeighborGuard(t.complexity()));
    }
    let mut seen = HashSet::new();
    seen.insert(t.canonical());
    let mut out = Vec::new();
    for_each_simultaneous(t, |steps| {
        let mut u = t.clone();
        apply_local(&mut u, steps);
        if seen.insert(u.canonical()) {
            out.push(u);
        }
    });
    Ok(out)
}

/// Calls `f` once per nonempty set of pairwise disjoint interior edges and
/// per choice of pulled child at each edge.
pub fn for_each_simultaneous<F: FnMut(&[LocalStep])>(t: &LabeledTree, mut f: F) {
    let edges = t.interior_edges();
    let verts: Vec<[NodeId; 2]> = edges.iter().map(|&e| vertices(t, e)).collect();
    let conflict: Vec<u64> = (0..edges.len())
        .map(|i| {
            (0..edges.len())
                .filter(|&j| j != i && verts[i].iter().any(|v| verts[j].contains(v)))
                .fold(0u64, |m, j| m | 1 << j)
        })
        .collect();
    assert!(edges.len() <= 64, "too many interior edges for bitmask enumeration");

    // Enumerate independent sets by increasing bitmask of chosen edges.
    let mut chosen: Vec<usize> = Vec::new();
    fn rec<F: FnMut(&[LocalStep])>(
        t: &LabeledTree,
        edges: &[NodeId],
        conflict: &[u64],
        start: usize,
        blocked: u64,
        chosen: &mut Vec<usize>,
        f: &mut F,
    ) {
        for i in start..edges.len() {
            if blocked >> i & 1 == 1 {
                continue;
            }
            chosen.push(i);
            let k = chosen.len();
            let mut steps = Vec::with_capacity(k);
            for mask in 0..(1u32 << k) {
                steps.clear();
                for (bit, &ci) in chosen.iter().enumerate() {
                    let kids = t.children(edges[ci]).expect("interior");
                    steps.push(LocalStep { edge: edges[ci], pulled: kids[(mask >> bit & 1) as usize] });
                }
                f(&steps);
            }
            rec(t, edges, conflict, i + 1, blocked | conflict[i], chosen, f);
            chosen.pop();
        }
    }
    rec(t, &edges, &conflict, 0, 0, &mut chosen, &mut f);
}

/// One entry of a move script: an edge address and a direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScriptStep {
    pub address: String,
    pub direction: Direction,
}

/// A sequence of simultaneous moves, addressed against the tree state
/// each group is applied to.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MoveScript {
    pub groups: Vec<Vec<ScriptStep>>,
}

impl MoveScript {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Records `steps` (valid on `t`) as the next group.
    pub fn push_local(&mut self, t: &LabeledTree, steps: &[LocalStep]) {
        if steps.is_empty() {
            return;
        }
        let min = t.min_labels();
        self.groups.push(
            steps
                .iter()
                .map(|&s| ScriptStep {
                    address: t.address_with(s.edge, &min),
                    direction: globalize(t, s, &min).direction,
                })
                .collect(),
        );
    }

    pub fn extend(&mut self, other: MoveScript) {
        self.groups.extend(other.groups);
    }

    /// Resolves one group against `t` into validated, pairwise disjoint
    /// node-form steps.
    pub fn resolve_group(t: &LabeledTree, group: &[ScriptStep]) -> Result<Vec<LocalStep>, MoveError> {
        let min = t.min_labels();
        let locals = group
            .iter()
            .map(|s| {
                let node = t
                    .resolve_address_with(&s.address, &min)
                    .ok_or_else(|| MoveError::BadAddress(s.address.clone()))?;
                localize(t, WhiteheadStep { edge: t.edge(node), direction: s.direction }, &min)
            })
            .collect::<Result<Vec<_>, MoveError>>()?;
        let edges: Vec<NodeId> = locals.iter().map(|s| s.edge).collect();
        if let Some((a, b)) = find_conflict(t, &edges) {
            return Err(MoveError::NotDisjoint(t.address_with(a, &min), t.address_with(b, &min)));
        }
        Ok(locals)
    }

    /// Applies every group in order.
    pub fn replay(&self, t: &LabeledTree) -> Result<LabeledTree, MoveError> {
        let mut cur = t.clone();
        for group in &self.groups {
            let steps = Self::resolve_group(&cur, group)?;
            apply_local(&mut cur, &steps);
        }
        Ok(cur)
    }

    /// Parses `<address> <1|2>` lines; groups of several steps are wrapped
    /// in `sim{` and `}`. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<MoveScript, MoveError> {
        let mut groups = Vec::new();
        let mut open: Option<Vec<ScriptStep>> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            let err = |msg: &str| MoveError::Script { line: idx + 1, msg: msg.to_string() };
            if line.is_empty() {
                continue;
            }
            if line == "sim{" {
                if open.is_some() {
                    return Err(err("nested 'sim{'"));
                }
                open = Some(Vec::new());
                continue;
            }
            if line == "}" {
                let g = open.take().ok_or_else(|| err("'}' without 'sim{'"))?;
                if !g.is_empty() {
                    groups.push(g);
                }
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let (address, dir) = match tokens.as_slice() {
                [d] => ("", *d),
                [a, d] => (*a, *d),
                _ => return Err(err("expected '<address> <1|2>'")),
            };
            if !address.chars().all(|c| c == 'a' || c == 'b') {
                return Err(err("address must be a string over {a,b}"));
            }
            let direction = dir
                .parse::<u8>()
                .ok()
                .and_then(Direction::from_digit)
                .ok_or_else(|| err("direction must be 1 or 2"))?;
            let step = ScriptStep { address: address.to_string(), direction };
            match open.as_mut() {
                Some(g) => g.push(step),
                None => groups.push(vec![step]),
            }
        }
        if open.is_some() {
            return Err(MoveError::Script { line: text.lines().count(), msg: "unclosed 'sim{'".into() });
        }
        Ok(MoveScript { groups })
    }
}

impl fmt::Display for MoveScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.groups {
            if g.len() == 1 {
                writeln!(f, "{} {}", g[0].address, g[0].direction.digit())?;
            } else {
                writeln!(f, "sim{{")?;
                for s in g {
                    writeln!(f, "{} {}", s.address, s.direction.digit())?;
                }
                writeln!(f, "}}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{canonical_subtree, enumerate_trees, parse_tree, random_tree};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tree(s: &str) -> LabeledTree {
        parse_tree(s).unwrap()
    }

    fn step_at(t: &LabeledTree, addr: &str, direction: Direction) -> WhiteheadStep {
        WhiteheadStep { edge: t.edge(t.resolve_address(addr).unwrap()), direction }
    }

    #[test]
    fn single_interior_edge_reopenings() {
        let t = tree("((0,1),2)");
        let a = apply_step(&t, step_at(&t, "a", Direction::PullFirst)).unwrap();
        assert_eq!(a, tree("((1,2),0)"));
        let b = apply_step(&t, step_at(&t, "a", Direction::PullSecond)).unwrap();
        assert_eq!(b, tree("((0,2),1)"));
        // Both results are the other two members of Tree(2).
        let all: HashSet<String> = enumerate_trees(2).unwrap().map(|t| t.canonical()).collect();
        let got: HashSet<String> = [t.canonical(), a.canonical(), b.canonical()].into_iter().collect();
        assert_eq!(all, got);
    }

    #[test]
    fn errors() {
        let t = tree("((0,1),2)");
        let root = WhiteheadStep { edge: t.root_edge(), direction: Direction::PullFirst };
        assert_eq!(apply_step(&t, root).unwrap_err(), MoveError::NotInterior(String::new()));
        let leaf = step_at(&t, "b", Direction::PullFirst);
        assert!(matches!(apply_step(&t, leaf), Err(MoveError::NotInterior(_))));
        let stale = step_at(&t, "a", Direction::PullFirst);
        let u = apply_step(&t, stale).unwrap();
        assert_eq!(apply_step(&u, stale).unwrap_err(), MoveError::StaleEdge);
    }

    #[test]
    fn sibling_steps_conflict() {
        let t = tree("(((0,1),2),((3,4),5))");
        let m = SimultaneousMove {
            steps: vec![step_at(&t, "a", Direction::PullFirst), step_at(&t, "b", Direction::PullFirst)],
        };
        assert_eq!(apply_simultaneous(&t, &m).unwrap_err(), MoveError::NotDisjoint("a".into(), "b".into()));
        assert_eq!(apply_simultaneous(&t, &SimultaneousMove::default()).unwrap(), t);
    }

    #[test]
    fn disjoint_steps_commute() {
        let t = tree("(((0,1),2),((3,4),5))");
        let s1 = step_at(&t, "aa", Direction::PullFirst);
        let s2 = step_at(&t, "ba", Direction::PullSecond);
        let ab = apply_simultaneous(&t, &SimultaneousMove { steps: vec![s1, s2] }).unwrap();
        let ba = apply_simultaneous(&t, &SimultaneousMove { steps: vec![s2, s1] }).unwrap();
        assert_eq!(ab, ba);
        let seq = apply_step(&t, s1).unwrap();
        let seq = apply_step(&seq, WhiteheadStep { edge: seq.edge(s2.edge.node), ..s2 }).unwrap();
        assert_eq!(ab.canonical(), seq.canonical());
    }

    #[test]
    fn neighbor_sets() {
        let t = tree("((0,1),2)");
        let w: HashSet<String> = neighbors_w(&t).iter().map(|t| t.canonical()).collect();
        let want: HashSet<String> = [tree("((1,2),0)").canonical(), tree("((0,2),1)").canonical()].into();
        assert_eq!(w, want);
        assert!(neighbors_w(&tree("(0,1)")).is_empty());
        assert!(neighbors_w(&tree("0")).is_empty());
        assert!(neighbors_s(&tree("(0,1)")).unwrap().is_empty());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(neighbors_s(&random_tree(13, &mut rng)).is_err());
        for _ in 0..1000 {
            let n = rng.gen_range(0..40);
            let t = random_tree(n, &mut rng);
            assert!(neighbors_w(&t).len() <= 2 * n.saturating_sub(1));
        }
    }

    #[test]
    fn neighbors_s_contains_neighbors_w() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let t = random_tree(7, &mut rng);
            let s: HashSet<String> = neighbors_s(&t).unwrap().iter().map(|t| t.canonical()).collect();
            for u in neighbors_w(&t) {
                assert!(s.contains(&u.canonical()));
            }
        }
    }

    #[test]
    fn script_round_trip() {
        let text = "a 1\nsim{\naa 2\nba 1\n}\n";
        let s = MoveScript::parse(text).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.to_string(), text);
        assert!(MoveScript::parse("sim{\na 1\n").is_err());
        assert!(MoveScript::parse("a 3").is_err());
        assert!(MoveScript::parse("ac 1").is_err());
    }

    use rand::Rng;

    fn arb_tree() -> impl Strategy<Value = LabeledTree> {
        (0usize..60, any::<u64>()).prop_map(|(n, seed)| random_tree(n, &mut ChaCha8Rng::seed_from_u64(seed)))
    }

    /// Picks a random set of pairwise disjoint steps.
    fn random_disjoint(t: &LabeledTree, rng: &mut ChaCha8Rng) -> Vec<LocalStep> {
        let mut used = vec![false; t.node_count()];
        let mut steps = Vec::new();
        for e in t.interior_edges() {
            let p = t.parent(e).unwrap();
            if rng.gen_bool(0.5) && !used[e.index()] && !used[p.index()] {
                used[e.index()] = true;
                used[p.index()] = true;
                let kids = t.children(e).unwrap();
                steps.push(LocalStep { edge: e, pulled: kids[rng.gen_range(0..2)] });
            }
        }
        steps
    }

    proptest! {
        #[test]
        fn steps_are_reversible_and_conservative(t in arb_tree(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let edges = t.interior_edges();
            prop_assume!(!edges.is_empty());
            let e = edges[rng.gen_range(0..edges.len())];
            let pulled = t.children(e).unwrap()[rng.gen_range(0..2)];
            let step = LocalStep { edge: e, pulled };
            let mut u = t.clone();
            apply_local(&mut u, &[step]);
            u.validate().unwrap();
            prop_assert_eq!(u.complexity(), t.complexity());
            prop_assert_eq!(u.edge_counts(), t.edge_counts());
            let mut back = u.clone();
            apply_local(&mut back, &[step.inverse(&t)]);
            prop_assert_eq!(back.canonical(), t.canonical());
        }

        #[test]
        fn steps_are_local(t in arb_tree(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let edges = t.interior_edges();
            prop_assume!(!edges.is_empty());
            let e = edges[rng.gen_range(0..edges.len())];
            let p = t.parent(e).unwrap();
            let pulled = t.children(e).unwrap()[rng.gen_range(0..2)];
            let mut u = t.clone();
            apply_local(&mut u, &[LocalStep { edge: e, pulled }]);
            let (before, after) = (t.canonical(), u.canonical());
            let (sb, sa) = (canonical_subtree(&t, p), canonical_subtree(&u, p));
            let at = before.find(&sb).unwrap();
            let expect = format!("{}{}{}", &before[..at], sa, &before[at + sb.len()..]);
            prop_assert_eq!(after, expect);
        }

        #[test]
        fn simultaneous_order_is_irrelevant(t in arb_tree(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let steps = random_disjoint(&t, &mut rng);
            let mut fwd = t.clone();
            apply_local(&mut fwd, &steps);
            let mut shuffled = steps.clone();
            rand::seq::SliceRandom::shuffle(shuffled.as_mut_slice(), &mut rng);
            let mut other = t.clone();
            for s in &shuffled {
                apply_local(&mut other, &[*s]);
            }
            prop_assert_eq!(fwd.canonical(), other.canonical());
            fwd.validate().unwrap();
        }

        #[test]
        fn scripts_replay(t in arb_tree(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut cur = t.clone();
            let mut script = MoveScript::default();
            for _ in 0..4 {
                let steps = random_disjoint(&cur, &mut rng);
                script.push_local(&cur, &steps);
                apply_local(&mut cur, &steps);
            }
            let parsed = MoveScript::parse(&script.to_string()).unwrap();
            prop_assert_eq!(parsed.replay(&t).unwrap().canonical(), cur.canonical());
        }
    }
}
