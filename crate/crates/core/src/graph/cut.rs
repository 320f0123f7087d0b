//! Cutting a marked graph open along the complement of a spanning tree,
//! and gluing a labeled tree back into a graph.
//!
//! The `k`-th complement edge is cut into two ends labeled `p + 2k` and
//! `p + 2k + 1`; the end labeled `2g + p - 1` becomes the root, leaving a
//! tree of complexity `2g + p - 2`. For `g = 0` the root is the edge of
//! mark `p - 1`.

use std::collections::VecDeque;

use crate::rewriting::LocalStep;
use crate::tree::{LabeledTree, NodeId, TreeBuilder};

use super::{GraphError, HalfEdgeGraph, MarkedGraph};

#[derive(Clone, Debug)]
pub struct CutResult {
    pub tree: LabeledTree,
    pub g: usize,
    pub p: usize,
    /// For each tree node, the half-edge at its parent's vertex leading to
    /// it; for the top node, the root half.
    upper: Vec<usize>,
    /// Graph vertex of each internal tree node.
    vertex: Vec<Option<usize>>,
}

impl CutResult {
    /// Label pairs glued back together, `(p + 2k, p + 2k + 1)`. The last
    /// pair's second label is the root.
    pub fn pairing(&self) -> Vec<(u32, u32)> {
        (0..self.g).map(|k| ((self.p + 2 * k) as u32, (self.p + 2 * k + 1) as u32)).collect()
    }

    /// The graph edge carrying tree edge `node`.
    pub fn edge_of(&self, node: NodeId) -> usize {
        self.upper[node.index()] / 2
    }

    pub fn vertex_of(&self, node: NodeId) -> Option<usize> {
        self.vertex[node.index()]
    }

    /// The half-edge exchanges realizing tree steps (valid on `tree`) on
    /// the graph this cut came from, in the state matching `tree`. Node ids
    /// of `tree` must be those of [`CutResult::tree`].
    pub fn swaps(&self, tree: &LabeledTree, steps: &[LocalStep]) -> Vec<(usize, usize)> {
        steps
            .iter()
            .map(|s| {
                let sibling = tree.sibling(s.edge).expect("interior edge");
                (self.upper[sibling.index()], self.upper[s.pulled.index()])
            })
            .collect()
    }

    /// Applies [`CutResult::swaps`] to `graph`.
    pub fn lift_steps(&self, graph: &mut MarkedGraph, tree: &LabeledTree, steps: &[LocalStep]) {
        for (a, b) in self.swaps(tree, steps) {
            graph.exchange(a, b);
        }
    }

    pub fn glue(&self) -> Result<MarkedGraph, GraphError> {
        glue(&self.tree, self.g, self.p)
    }
}

/// BFS spanning tree from mark 0 (or vertex 0), visiting halves in id order.
fn bfs_spanning_tree(g: &HalfEdgeGraph, start: usize) -> Vec<usize> {
    let inc = g.incidence();
    let mut seen = vec![false; g.vertex_count];
    seen[start] = true;
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &h in &inc[v] {
            let w = g.ends[h ^ 1];
            if !seen[w] {
                seen[w] = true;
                edges.push(h / 2);
                queue.push_back(w);
            }
        }
    }
    edges
}

fn check_spanning_tree(g: &HalfEdgeGraph, edges: &[usize]) -> Result<(), GraphError> {
    if edges.len() + 1 != g.vertex_count {
        return Err(GraphError::SpanningTree(format!(
            "{} edges for {} vertices",
            edges.len(),
            g.vertex_count
        )));
    }
    let mut parent: Vec<usize> = (0..g.vertex_count).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &e in edges {
        if e >= g.edge_count() {
            return Err(GraphError::SpanningTree(format!("no edge {e}")));
        }
        let (u, v) = g.endpoints(e);
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a == b {
            return Err(GraphError::SpanningTree(format!("edge {e} closes a cycle")));
        }
        parent[a] = b;
    }
    Ok(())
}

/// Cuts with the default spanning tree and complement order.
pub fn default_cut(g: &MarkedGraph) -> Result<CutResult, GraphError> {
    cut_to_tree(g, None, None)
}

/// Cuts `gr` into a labeled tree. `spanning` lists spanning-tree edges and
/// `labeling` orders the complement edges; both default deterministically.
pub fn cut_to_tree(
    gr: &MarkedGraph,
    spanning: Option<&[usize]>,
    labeling: Option<&[usize]>,
) -> Result<CutResult, GraphError> {
    gr.validate()?;
    let g = &gr.graph;
    let p = gr.p();
    let rank = gr.rank();
    let tree_edges = match spanning {
        Some(s) => {
            check_spanning_tree(g, s)?;
            s.to_vec()
        }
        None => bfs_spanning_tree(g, gr.marks.first().copied().unwrap_or(0)),
    };
    let mut in_tree = vec![false; g.edge_count()];
    for &e in &tree_edges {
        in_tree[e] = true;
    }
    let mut complement: Vec<usize> = (0..g.edge_count()).filter(|&e| !in_tree[e]).collect();
    match labeling {
        Some(order) => {
            let mut a = order.to_vec();
            a.sort_unstable();
            if a != complement {
                return Err(GraphError::Labeling(format!("{order:?} vs complement {complement:?}")));
            }
            complement = order.to_vec();
        }
        None => complement.sort_by_key(|&e| {
            let (u, v) = g.endpoints(e);
            (u.min(v), u.max(v), e)
        }),
    }
    debug_assert_eq!(complement.len(), rank);

    let mut half_label: Vec<Option<u32>> = vec![None; g.ends.len()];
    for (k, &c) in complement.iter().enumerate() {
        half_label[2 * c] = Some((p + 2 * k) as u32);
        half_label[2 * c + 1] = Some((p + 2 * k + 1) as u32);
    }
    let root_half = if rank >= 1 {
        2 * complement[rank - 1] + 1
    } else {
        let m = gr.marks[p - 1];
        let h = (0..g.ends.len()).find(|&h| g.ends[h] == m).expect("marks have valence 1");
        h ^ 1
    };
    let mark_label = |v: usize| gr.mark_of(v).map(|l| l as u32);
    let inc = g.incidence();

    // Entries in pre-order; children always follow their parent.
    enum Entry {
        Leaf { upper: usize, label: u32 },
        Internal { upper: usize, vertex: usize, kids: [usize; 2] },
    }
    let mut entries: Vec<Entry> = Vec::with_capacity(2 * g.vertex_count);
    let top_vertex = g.ends[root_half];
    entries.push(Entry::Internal { upper: root_half, vertex: top_vertex, kids: [0, 0] });
    let mut stack = vec![(0usize, top_vertex, root_half)];
    while let Some((idx, x, h_in)) = stack.pop() {
        let mut kids = [0usize; 2];
        let mut slot = 0;
        for &h in &inc[x] {
            if h == h_in {
                continue;
            }
            let child = entries.len();
            if let Some(label) = half_label[h] {
                entries.push(Entry::Leaf { upper: h, label });
            } else {
                let y = g.ends[h ^ 1];
                match mark_label(y) {
                    Some(label) => entries.push(Entry::Leaf { upper: h, label }),
                    None => {
                        entries.push(Entry::Internal { upper: h, vertex: y, kids: [0, 0] });
                        stack.push((child, y, h ^ 1));
                    }
                }
            }
            kids[slot] = child;
            slot += 1;
        }
        if let Entry::Internal { kids: k, .. } = &mut entries[idx] {
            *k = kids;
        }
    }

    let mut b = TreeBuilder::with_capacity(entries.len());
    let mut ids = vec![NodeId::from_index(0); entries.len()];
    for i in (0..entries.len()).rev() {
        ids[i] = match &entries[i] {
            Entry::Leaf { label, .. } => b.leaf(*label),
            Entry::Internal { kids, .. } => b.join(ids[kids[0]], ids[kids[1]]),
        };
    }
    let tree = b.finish(ids[0]).map_err(|e| GraphError::Invalid(format!("cut produced a bad tree: {e}")))?;
    let mut upper = vec![0; entries.len()];
    let mut vertex = vec![None; entries.len()];
    for (i, e) in entries.iter().enumerate() {
        let id = ids[i].index();
        match e {
            Entry::Leaf { upper: u, .. } => upper[id] = *u,
            Entry::Internal { upper: u, vertex: v, .. } => {
                upper[id] = *u;
                vertex[id] = Some(*v);
            }
        }
    }
    Ok(CutResult { tree, g: rank, p, upper, vertex })
}

/// Rebuilds the marked graph of rank `g` with `p` marks from a tree of
/// complexity `2g + p - 2`.
pub fn glue(tree: &LabeledTree, g: usize, p: usize) -> Result<MarkedGraph, GraphError> {
    let n = tree.complexity();
    if 2 * g + p < 3 || n != 2 * g + p - 2 {
        return Err(GraphError::Pairing(format!("complexity {n} does not match g={g}, p={p}")));
    }
    let mut graph = HalfEdgeGraph::new(0);
    let mut vertex = vec![usize::MAX; tree.node_count()];
    for id in tree.preorder() {
        if !tree.is_leaf(id) {
            vertex[id.index()] = graph.add_vertex();
        }
    }
    let mut marks = vec![usize::MAX; p];
    // stub[l - p] is the vertex holding the cut end labeled l.
    let mut stub = vec![usize::MAX; 2 * g];
    for id in tree.preorder() {
        let Some(parent) = tree.parent(id) else { continue };
        let pv = vertex[parent.index()];
        match tree.label(id) {
            None => {
                graph.add_edge(pv, vertex[id.index()]);
            }
            Some(l) if (l as usize) < p => {
                let m = graph.add_vertex();
                graph.add_edge(pv, m);
                marks[l as usize] = m;
            }
            Some(l) => stub[l as usize - p] = pv,
        }
    }
    let top = vertex[tree.top().index()];
    if top == usize::MAX {
        return Err(GraphError::Pairing("tree has no internal node".into()));
    }
    if g == 0 {
        let m = graph.add_vertex();
        graph.add_edge(top, m);
        marks[p - 1] = m;
    } else {
        stub[2 * g - 1] = top;
    }
    for k in 0..g {
        graph.add_edge(stub[2 * k], stub[2 * k + 1]);
    }
    MarkedGraph::new(graph, marks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::iso::is_isomorphic;
    use crate::graph::{make_line_graph, random_marked_graph};
    use crate::rewriting::{apply_local, for_each_simultaneous};
    use crate::tree::parse_tree;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn g11() -> MarkedGraph {
        MarkedGraph::parse("edge 0 0\nedge 0 1\nmark 1 0\n").unwrap()
    }

    #[test]
    fn loop_with_mark() {
        let c = default_cut(&g11()).unwrap();
        assert_eq!(c.tree.canonical(), "(0,1)");
        assert_eq!(c.pairing(), vec![(1, 2)]);
        assert!(is_isomorphic(&c.glue().unwrap(), &g11()));
        assert!(is_isomorphic(&glue(&parse_tree("(0,1)").unwrap(), 1, 1).unwrap(), &g11()));
        assert!(is_isomorphic(&make_line_graph(1, 1).unwrap(), &g11()));
    }

    #[test]
    fn tripod() {
        let g = MarkedGraph::parse("edge 0 1\nedge 0 2\nedge 0 3\nmark 1 0\nmark 2 1\nmark 3 2\n").unwrap();
        let c = default_cut(&g).unwrap();
        assert_eq!(c.tree.canonical(), "(0,1)");
        assert!(is_isomorphic(&c.glue().unwrap(), &g));
    }

    #[test]
    fn bad_choices() {
        let g = g11();
        assert!(matches!(cut_to_tree(&g, Some(&[0]), None), Err(GraphError::SpanningTree(_))));
        assert!(matches!(cut_to_tree(&g, None, Some(&[1])), Err(GraphError::Labeling(_))));
        assert!(matches!(glue(&parse_tree("(0,1)").unwrap(), 2, 1), Err(GraphError::Pairing(_))));
    }

    #[test]
    fn round_trip_with_random_choices() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let g = random_marked_graph(rng.gen_range(0..6), rng.gen_range(3..7), &mut rng).unwrap();
            // A random spanning tree via a shuffled Kruskal pass.
            let mut order: Vec<usize> = (0..g.graph.edge_count()).collect();
            rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
            let mut comp: Vec<usize> = (0..g.graph.vertex_count).collect();
            fn find(c: &mut [usize], x: usize) -> usize {
                if c[x] != x {
                    let r = find(c, c[x]);
                    c[x] = r;
                }
                c[x]
            }
            let mut span = Vec::new();
            let mut rest = Vec::new();
            for e in order {
                let (u, v) = g.graph.endpoints(e);
                let (a, b) = (find(&mut comp, u), find(&mut comp, v));
                if a != b {
                    comp[a] = b;
                    span.push(e);
                } else {
                    rest.push(e);
                }
            }
            let c = cut_to_tree(&g, Some(&span), Some(&rest)).unwrap();
            assert_eq!(c.tree.complexity(), 2 * g.rank() + g.p() - 2);
            assert!(is_isomorphic(&c.glue().unwrap(), &g));
        }
    }

    #[test]
    fn simultaneous_tree_moves_lift_to_graph_moves() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let g = random_marked_graph(rng.gen_range(1..5), rng.gen_range(1..4), &mut rng).unwrap();
            let c = default_cut(&g).unwrap();
            let mut moves = Vec::new();
            for_each_simultaneous(&c.tree, |s| moves.push(s.to_vec()));
            if moves.is_empty() {
                continue;
            }
            let steps = &moves[rng.gen_range(0..moves.len())];
            let mut tree = c.tree.clone();
            let mut lifted = g.clone();
            c.lift_steps(&mut lifted, &tree, steps);
            apply_local(&mut tree, steps);
            lifted.validate().unwrap();
            let glued = glue(&tree, c.g, c.p).unwrap();
            assert!(is_isomorphic(&lifted, &glued));
        }
    }
}
