use rand::seq::SliceRandom;
use rand::Rng;

use crate::sort::build_tn;

use super::{GraphError, HalfEdgeGraph, MarkedGraph};

fn check_params(g: usize, p: usize) -> Result<(), GraphError> {
    if 2 * g + p <= 2 {
        return Err(GraphError::Params(format!("2g - 2 + p must be positive (g={g}, p={p})")));
    }
    Ok(())
}

/// Finishes a tree with `g + p` leaf vertices: the first `g` leaves get a
/// loop, the rest become marks `0..p`.
fn decorate_leaves(mut graph: HalfEdgeGraph, leaves: &[usize], g: usize) -> Result<MarkedGraph, GraphError> {
    for &v in &leaves[..g] {
        graph.add_edge(v, v);
    }
    MarkedGraph::new(graph, leaves[g..].to_vec())
}

/// Caterpillar with `g + p` legs: a spine `v_1 .. v_{N-2}` whose two end
/// vertices carry two legs each and every other spine vertex one. Legs
/// `0..g` end in loops, the remaining legs in marks.
pub fn make_line_graph(g: usize, p: usize) -> Result<MarkedGraph, GraphError> {
    check_params(g, p)?;
    let legs = g + p;
    let mut graph = HalfEdgeGraph::new(0);
    let mut leaves = Vec::with_capacity(legs);
    if legs == 2 {
        let a = graph.add_vertex();
        let b = graph.add_vertex();
        graph.add_edge(a, b);
        leaves.extend([a, b]);
        return decorate_leaves(graph, &leaves, g);
    }
    let spine: Vec<usize> = (0..legs - 2).map(|_| graph.add_vertex()).collect();
    for w in spine.windows(2) {
        graph.add_edge(w[0], w[1]);
    }
    let mut leg = |graph: &mut HalfEdgeGraph, v: usize| {
        let l = graph.add_vertex();
        graph.add_edge(v, l);
        leaves.push(l);
    };
    let last = spine.len() - 1;
    for (i, &v) in spine.iter().enumerate() {
        let count = if spine.len() == 1 { 3 } else if i == 0 || i == last { 2 } else { 1 };
        for _ in 0..count {
            leg(&mut graph, v);
        }
    }
    decorate_leaves(graph, &leaves, g)
}

/// The unrooted fully sorted shape with `g + p` leaves (that of `T_{g+p-1}`
/// with the root edge removed), the first `g` leaves closed into loops.
pub fn make_bouquet_graph(g: usize, p: usize) -> Result<MarkedGraph, GraphError> {
    check_params(g, p)?;
    let legs = g + p;
    let t = build_tn(legs - 1);
    let mut graph = HalfEdgeGraph::new(0);
    let mut vertex = vec![usize::MAX; t.node_count()];
    let top = t.top();
    for id in t.preorder() {
        if id != top {
            vertex[id.index()] = graph.add_vertex();
        }
    }
    for id in t.preorder() {
        match t.parent(id) {
            Some(parent) if parent != top => {
                graph.add_edge(vertex[parent.index()], vertex[id.index()]);
            }
            _ => {}
        }
    }
    let [a, b] = t.children(top).expect("T_n with n >= 1 has an internal top");
    graph.add_edge(vertex[a.index()], vertex[b.index()]);
    let leaves: Vec<usize> = (0..legs as u32).map(|l| vertex[t.leaf_of_label(l).unwrap().index()]).collect();
    decorate_leaves(graph, &leaves, g)
}

/// Uniform pairing of `stubs` half-edge slots, retried until connected.
fn configuration_model<R: Rng + ?Sized>(valences: &[usize], rng: &mut R) -> HalfEdgeGraph {
    let stubs: Vec<usize> = valences.iter().enumerate().flat_map(|(v, &d)| std::iter::repeat_n(v, d)).collect();
    assert!(stubs.len().is_multiple_of(2), "odd valence sum");
    loop {
        let mut s = stubs.clone();
        s.shuffle(rng);
        let mut graph = HalfEdgeGraph::new(valences.len());
        for pair in s.chunks(2) {
            graph.add_edge(pair[0], pair[1]);
        }
        if graph.is_connected() {
            return graph;
        }
    }
}

/// Random marked graph of rank `g` with `p` marks from the configuration
/// model conditioned on connectivity. Loops and multi-edges may occur.
pub fn random_marked_graph<R: Rng + ?Sized>(g: usize, p: usize, rng: &mut R) -> Result<MarkedGraph, GraphError> {
    check_params(g, p)?;
    let trivalent = 2 * g + p - 2;
    let mut valences = vec![3; trivalent];
    valences.extend(std::iter::repeat_n(1, p));
    let graph = configuration_model(&valences, rng);
    MarkedGraph::new(graph, (trivalent..trivalent + p).collect())
}

/// Connected random 3-regular multigraph on `vertices` vertices.
pub fn random_cubic_graph<R: Rng + ?Sized>(vertices: usize, rng: &mut R) -> Result<MarkedGraph, GraphError> {
    if vertices < 2 || vertices % 2 == 1 {
        return Err(GraphError::Params(format!("a cubic graph needs an even positive vertex count, got {vertices}")));
    }
    let graph = configuration_model(&vec![3; vertices], rng);
    MarkedGraph::new(graph, vec![])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Execution;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn invalid_parameters() {
        for (g, p) in [(0, 0), (0, 1), (0, 2), (1, 0)] {
            assert!(matches!(make_line_graph(g, p), Err(GraphError::Params(_))));
            assert!(matches!(make_bouquet_graph(g, p), Err(GraphError::Params(_))));
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            assert!(random_marked_graph(g, p, &mut rng).is_err());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(random_cubic_graph(7, &mut rng).is_err());
    }

    #[test]
    fn shapes_have_the_right_rank_and_marks() {
        for g in 0..10 {
            for p in 0..10 {
                if 2 * g + p <= 2 {
                    continue;
                }
                for m in [make_line_graph(g, p).unwrap(), make_bouquet_graph(g, p).unwrap()] {
                    assert_eq!((m.rank(), m.p()), (g, p));
                    assert_eq!(m.trivalent_count(), 2 * g + p - 2);
                }
            }
        }
    }

    #[test]
    fn diameters() {
        let seq = Execution::Sequential;
        // Leaf to leaf along the whole spine: one short of g + p.
        assert_eq!(make_line_graph(4, 0).unwrap().diameter(seq), 3);
        assert!(make_bouquet_graph(8, 0).unwrap().diameter(seq) <= 5);
        assert_eq!(make_line_graph(1, 1).unwrap().diameter(seq), 1);
        for n in 4..40 {
            assert_eq!(make_line_graph(n / 2, n - n / 2).unwrap().diameter(seq), n - 1);
        }
    }

    #[test]
    fn random_cubic_graphs_are_cubic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_cubic_graph(12, &mut rng).unwrap();
        assert_eq!(g.graph.edge_count(), 18);
        assert_eq!(g.rank(), 7);
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let a = random_marked_graph(3, 2, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let b = random_marked_graph(3, 2, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        assert_eq!(a, b);
    }
}
