//! Marked isomorphism of small multigraphs by backtracking.
//!
//! Vertices of the first graph are mapped in BFS order from an anchor (mark
//! 0, or vertex 0 tried against every image when there are no marks), so
//! each later vertex only has the neighbors of its parent's image as
//! candidates. A candidate must carry the same mark and see the same
//! multiset of already-mapped neighbors, loops included.

use super::MarkedGraph;

struct Matcher<'a> {
    a: &'a MarkedGraph,
    b: &'a MarkedGraph,
    inc_a: Vec<Vec<usize>>,
    inc_b: Vec<Vec<usize>>,
    mark_a: Vec<Option<usize>>,
    mark_b: Vec<Option<usize>>,
    order: Vec<usize>,
    /// BFS parent of each vertex in `order` (none for the anchor).
    parent: Vec<Option<usize>>,
    fwd: Vec<usize>,
    used: Vec<bool>,
}

const UNMAPPED: usize = usize::MAX;

impl Matcher<'_> {
    fn consistent(&self, x: usize, y: usize) -> bool {
        if self.inc_a[x].len() != self.inc_b[y].len() || self.mark_a[x] != self.mark_b[y] || self.used[y] {
            return false;
        }
        let (ga, gb) = (&self.a.graph, &self.b.graph);
        let mut seen_a: Vec<usize> = self.inc_a[x]
            .iter()
            .filter_map(|&h| {
                let w = ga.ends[h ^ 1];
                if w == x {
                    Some(y)
                } else if self.fwd[w] != UNMAPPED {
                    Some(self.fwd[w])
                } else {
                    None
                }
            })
            .collect();
        let mut seen_b: Vec<usize> = self.inc_b[y]
            .iter()
            .map(|&h| gb.ends[h ^ 1])
            .filter(|&z| z == y || self.used[z])
            .collect();
        seen_a.sort_unstable();
        seen_b.sort_unstable();
        seen_a == seen_b
    }

    fn extend(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let x = self.order[depth];
        let candidates: Vec<usize> = match self.parent[depth] {
            Some(px) => {
                let py = self.fwd[px];
                let mut c: Vec<usize> = self.inc_b[py].iter().map(|&h| self.b.graph.ends[h ^ 1]).collect();
                c.sort_unstable();
                c.dedup();
                c
            }
            None => unreachable!("anchor is mapped by the caller"),
        };
        for y in candidates {
            if self.consistent(x, y) {
                self.fwd[x] = y;
                self.used[y] = true;
                if self.extend(depth + 1) {
                    return true;
                }
                self.fwd[x] = UNMAPPED;
                self.used[y] = false;
            }
        }
        false
    }
}

/// Whether some vertex bijection carries edges to edges (with
/// multiplicity) and mark `l` of `a` to mark `l` of `b`.
pub fn is_isomorphic(a: &MarkedGraph, b: &MarkedGraph) -> bool {
    let (ga, gb) = (&a.graph, &b.graph);
    if ga.vertex_count != gb.vertex_count || ga.edge_count() != gb.edge_count() || a.marks.len() != b.marks.len() {
        return false;
    }
    if a.valence_profile() != b.valence_profile() {
        return false;
    }
    if ga.vertex_count == 0 {
        return true;
    }
    let inc_a = ga.incidence();
    let anchor = a.marks.first().copied().unwrap_or(0);
    let dist = ga.bfs(anchor, &inc_a);
    if dist.contains(&usize::MAX) {
        return false;
    }
    // BFS order with parents.
    let mut order = vec![anchor];
    let mut parent = vec![None];
    let mut placed = vec![false; ga.vertex_count];
    placed[anchor] = true;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for &h in &inc_a[v] {
            let w = ga.ends[h ^ 1];
            if !placed[w] {
                placed[w] = true;
                order.push(w);
                parent.push(Some(v));
            }
        }
        i += 1;
    }
    let mut mark_a = vec![None; ga.vertex_count];
    for (l, &v) in a.marks.iter().enumerate() {
        mark_a[v] = Some(l);
    }
    let mut mark_b = vec![None; gb.vertex_count];
    for (l, &v) in b.marks.iter().enumerate() {
        mark_b[v] = Some(l);
    }
    let mut m = Matcher {
        a,
        b,
        inc_a,
        inc_b: gb.incidence(),
        mark_a,
        mark_b,
        order,
        parent,
        fwd: vec![UNMAPPED; ga.vertex_count],
        used: vec![false; gb.vertex_count],
    };
    let anchors: Vec<usize> = match b.marks.first() {
        Some(&v) => vec![v],
        None => (0..gb.vertex_count).collect(),
    };
    for y in anchors {
        if m.consistent(anchor, y) {
            m.fwd[anchor] = y;
            m.used[y] = true;
            if m.extend(1) {
                return true;
            }
            m.fwd[anchor] = UNMAPPED;
            m.used[y] = false;
        }
    }
    false
}
