use std::collections::VecDeque;

use super::{GraphError, HalfEdgeGraph, MarkedGraph};

/// Which of the two other partitions of the four halves around an edge
/// the move produces. With `a1 < a2` the other halves at the first
/// endpoint and `b1 < b2` those at the second, `First` swaps `a2` and
/// `b1`, `Second` swaps `a2` and `b2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GraphDirection {
    First,
    Second,
}

impl MarkedGraph {
    /// The two halves at each endpoint of `e` other than `e`'s own, or an
    /// error if `e` is not interior.
    pub(crate) fn side_halves(&self, e: usize) -> Result<([usize; 2], [usize; 2]), GraphError> {
        let g = &self.graph;
        if e >= g.edge_count() {
            return Err(GraphError::NotInterior(e));
        }
        let (u, v) = g.endpoints(e);
        if u == v || self.is_marked(u) || self.is_marked(v) {
            return Err(GraphError::NotInterior(e));
        }
        let others = |x: usize| -> [usize; 2] {
            let hs: Vec<usize> = (0..g.ends.len())
                .filter(|&h| g.ends[h] == x && h / 2 != e)
                .collect();
            [hs[0], hs[1]]
        };
        Ok((others(u), others(v)))
    }

    /// Moves half `hu` (at one endpoint of `e`) and half `hv` (at the
    /// other) across `e`.
    pub(crate) fn exchange(&mut self, hu: usize, hv: usize) {
        self.graph.ends.swap(hu, hv);
    }
}

/// Collapses interior edge `edge` and reopens it the other way.
pub fn graph_whitehead(g: &MarkedGraph, edge: usize, direction: GraphDirection) -> Result<MarkedGraph, GraphError> {
    let ([_, a2], [b1, b2]) = g.side_halves(edge)?;
    let mut out = g.clone();
    match direction {
        GraphDirection::First => out.exchange(a2, b1),
        GraphDirection::Second => out.exchange(a2, b2),
    }
    Ok(out)
}

/// A shortest cycle as `(vertices, edges)` with edge `i` joining vertex
/// `i` to vertex `i + 1` (cyclically). Loops are cycles of length 1.
pub fn shortest_cycle(g: &HalfEdgeGraph) -> Option<(Vec<usize>, Vec<usize>)> {
    for e in 0..g.edge_count() {
        let (u, v) = g.endpoints(e);
        if u == v {
            return Some((vec![u], vec![e]));
        }
    }
    let inc = g.incidence();
    let mut best: Option<(Vec<usize>, Vec<usize>)> = None;
    for e in 0..g.edge_count() {
        let (u, v) = g.endpoints(e);
        // BFS from v to u avoiding e; the path plus e closes a cycle.
        let mut via = vec![usize::MAX; g.vertex_count];
        let mut seen = vec![false; g.vertex_count];
        seen[v] = true;
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            if x == u {
                break;
            }
            for &h in &inc[x] {
                if h / 2 == e {
                    continue;
                }
                let y = g.ends[h ^ 1];
                if !seen[y] {
                    seen[y] = true;
                    via[y] = h;
                    queue.push_back(y);
                }
            }
        }
        if !seen[u] {
            continue;
        }
        // Walk back from u to v: u = w0, w1, ..., v.
        let mut verts = vec![u];
        let mut edges = vec![];
        let mut x = u;
        while x != v {
            let h = via[x];
            edges.push(h / 2);
            x = g.ends[h];
            verts.push(x);
        }
        // Cycle u -> ... -> v -> u; edges[i] joins verts[i] and verts[i+1].
        edges.push(e);
        if best.as_ref().is_none_or(|(_, b)| edges.len() < b.len()) {
            best = Some((verts, edges));
        }
    }
    best
}

/// Applies Whitehead moves along a shortest cycle, each shortening it by
/// one, until the graph has a loop. Returns the graph and the move count.
pub fn shorten_loop(g: &MarkedGraph) -> Result<(MarkedGraph, usize), GraphError> {
    let mut cur = g.clone();
    let mut moves = 0;
    loop {
        let (verts, edges) = shortest_cycle(&cur.graph).ok_or(GraphError::NoCycle)?;
        if edges.len() == 1 {
            return Ok((cur, moves));
        }
        // Edge e0 joins v0 and v1, e1 joins v1 and v2. Moving e1's half at
        // v1 over to v0 (in exchange for v0's third half) reroutes e1 to
        // v0 and drops e0 from the cycle.
        let (e0, e1) = (edges[0], edges[1]);
        let elast = edges[edges.len() - 1];
        let (v0, v1) = (verts[0], verts[1]);
        let ends = &cur.graph.ends;
        let halves_at = |x: usize| (0..ends.len()).filter(move |&h| ends[h] == x);
        let h1 = halves_at(v1)
            .find(|&h| h / 2 == e1)
            .expect("cycle edge e1 meets v1");
        let e0_at_v0 = if cur.graph.ends[2 * e0] == v0 { 2 * e0 } else { 2 * e0 + 1 };
        let elast_at_v0 = halves_at(v0)
            .find(|&h| h / 2 == elast && h != e0_at_v0)
            .expect("closing edge meets v0");
        let third = halves_at(v0)
            .find(|&h| h != e0_at_v0 && h != elast_at_v0)
            .expect("v0 is trivalent");
        cur.exchange(third, h1);
        moves += 1;
    }
}
