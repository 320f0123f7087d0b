use crate::graph::{default_cut, is_isomorphic, make_bouquet_graph, HalfEdgeGraph, MarkedGraph};
use crate::rewriting::{apply_local, MoveScript};
use crate::sort::{build_tn, distance_upper};

use super::{MetricError, MetricGraph};

/// Stage one: collapse a shortest spanning tree of `G` and rescale every
/// remaining edge to a unit circle.
#[derive(Clone, Debug, PartialEq)]
pub struct RoseCollapse {
    pub spanning: Vec<usize>,
    pub complement: Vec<usize>,
    /// `max(1, max 1/length)` over complement edges.
    pub constant: f64,
    /// `k` with every complement edge of length at least `eps / (k n)`,
    /// so that `constant <= k n / eps`.
    pub witness_k: f64,
}

pub fn collapse_to_rose(g: &MetricGraph, eps: f64) -> Result<RoseCollapse, MetricError> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(MetricError::Invalid(format!("eps must be positive, got {eps}")));
    }
    g.check_thick(eps)?;
    let n = g.rank();
    if n == 0 {
        return Err(MetricError::RankTooSmall(0));
    }
    // Kruskal with edge-id tie-break.
    let mut order: Vec<usize> = (0..g.graph.edge_count()).collect();
    order.sort_by(|&a, &b| g.lengths[a].total_cmp(&g.lengths[b]).then(a.cmp(&b)));
    let mut parent: Vec<usize> = (0..g.graph.vertex_count()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut spanning = Vec::new();
    let mut complement = Vec::new();
    for e in order {
        let (u, v) = g.graph.endpoints(e);
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a == b {
            complement.push(e);
        } else {
            parent[a] = b;
            spanning.push(e);
        }
    }
    complement.sort_unstable();
    debug_assert_eq!(complement.len(), n);
    let min_len = complement.iter().map(|&e| g.lengths[e]).fold(f64::INFINITY, f64::min);
    let constant = (1.0 / min_len).max(1.0);
    let witness_k = constant * eps / n as f64;
    debug_assert!(complement.iter().all(|&e| g.lengths[e] >= eps / (witness_k * n as f64) * (1.0 - 1e-12)));
    Ok(RoseCollapse { spanning, complement, constant, witness_k })
}

/// Stage two: the rose folded into a unit-length trivalent graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Fold {
    pub graph: MetricGraph,
    pub rounds: u32,
    /// `2^rounds`: each round stretches by at most 2.
    pub constant: f64,
}

/// Each round splits every group of circles into two halves pulled apart
/// along a new edge, so after `ceil(log2 n)` rounds every circle sits at
/// its own trivalent vertex: the bouquet graph of rank `n`. For `n = 1`
/// the rose is already the unit circle.
pub fn fold_rose(n: usize) -> Result<Fold, MetricError> {
    if n == 0 {
        return Err(MetricError::RankTooSmall(0));
    }
    if n == 1 {
        return Ok(Fold { graph: MetricGraph::rose(1)?, rounds: 0, constant: 1.0 });
    }
    let rounds = usize::BITS - (n - 1).leading_zeros();
    let graph = MetricGraph::unit(make_bouquet_graph(n, 0)?.graph().clone())?;
    Ok(Fold { graph, rounds, constant: 2f64.powi(rounds as i32) })
}

/// Stage four, built from `H`: the trivalent unit-length `H'` and the
/// constant of the collapse `H' -> H`.
#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    pub graph: MetricGraph,
    /// Valences of the vertices that received a tree.
    pub expanded: Vec<usize>,
    /// `max(1, longest edge of H)`.
    pub constant: f64,
}

/// Replaces each vertex of valence `b > 3` by the unrooted fully sorted
/// tree `t_b` with `b` leaves, the `b` half-edges (in id order) attached
/// where its leaves were. All edges get length 1.
pub fn expand_vertices(h: &MetricGraph) -> Result<Expansion, MetricError> {
    let g = &h.graph;
    let inc = g.incidence();
    let mut out = HalfEdgeGraph::new(0);
    // New vertex for each half-edge of H.
    let mut attach = vec![usize::MAX; g.ends.len()];
    let mut expanded = Vec::new();
    for halves in &inc {
        let b = halves.len();
        if b <= 3 {
            let v = out.add_vertex();
            for &h in halves {
                attach[h] = v;
            }
            continue;
        }
        expanded.push(b);
        let t = build_tn(b - 1);
        let top = t.top();
        let mut vertex = vec![usize::MAX; t.node_count()];
        for id in t.preorder() {
            if id != top && !t.is_leaf(id) {
                vertex[id.index()] = out.add_vertex();
            }
        }
        let [x, y] = t.children(top).expect("b >= 2");
        // Internal tree edges, with the top suppressed.
        for id in t.preorder() {
            if let Some(p) = t.parent(id) {
                if p != top && !t.is_leaf(id) {
                    out.add_edge(vertex[p.index()], vertex[id.index()]);
                }
            }
        }
        if !t.is_leaf(x) && !t.is_leaf(y) {
            out.add_edge(vertex[x.index()], vertex[y.index()]);
        }
        for (leaf, &h) in halves.iter().enumerate() {
            let node = t.leaf_of_label(leaf as u32).expect("label below b");
            let p = t.parent(node).expect("leaf has a parent");
            // A leaf hanging from the top attaches to the other top child.
            let anchor = if p == top { t.sibling(node).expect("top has two children") } else { p };
            attach[h] = vertex[anchor.index()];
        }
    }
    for e in 0..g.edge_count() {
        out.add_edge(attach[2 * e], attach[2 * e + 1]);
    }
    let graph = MetricGraph::unit(out)?;
    Ok(Expansion { graph, expanded, constant: h.max_length().max(1.0) })
}

/// Stage three: simultaneous Whitehead moves from `G'` to `H'`.
#[derive(Clone, Debug)]
pub struct Interpolation {
    /// Tree script from the cut of `G'` through `T_n` to the cut of `H'`.
    pub script: MoveScript,
    /// Each simultaneous graph move as the half-edge pairs it exchanges.
    pub graph_moves: Vec<Vec<(usize, usize)>>,
    pub moves: usize,
    /// `move_constant^moves`.
    pub constant: f64,
    pub log_constant: f64,
    /// The graph reached by replaying `graph_moves` on `G'`.
    pub result: MarkedGraph,
}

/// Cuts both graphs into trees, sorts both to `T_n` and replays the
/// combined tree script on `G'` through the cut. The replayed graph is
/// checked to be isomorphic to `H'`.
pub fn interpolate_trivalent(g1: &MetricGraph, h1: &MetricGraph, move_constant: f64) -> Result<Interpolation, MetricError> {
    if g1.rank() != h1.rank() {
        return Err(MetricError::RankMismatch(g1.rank(), h1.rank()));
    }
    if g1.rank() < 2 {
        return Err(MetricError::RankTooSmall(g1.rank()));
    }
    for m in [g1, h1] {
        if !m.is_trivalent() || m.lengths.iter().any(|&x| x != 1.0) {
            return Err(MetricError::Invalid("interpolation needs trivalent unit-length graphs".into()));
        }
    }
    let ga = g1.as_marked()?;
    let gb = h1.as_marked()?;
    let ca = default_cut(&ga)?;
    let cb = default_cut(&gb)?;
    let upper = distance_upper(&ca.tree, &cb.tree)?;
    let mut tree = ca.tree.clone();
    let mut graph = ga.clone();
    let mut graph_moves = Vec::with_capacity(upper.script.len());
    for group in &upper.script.groups {
        let steps = MoveScript::resolve_group(&tree, group)?;
        graph_moves.push(ca.swaps(&tree, &steps));
        ca.lift_steps(&mut graph, &tree, &steps);
        apply_local(&mut tree, &steps);
    }
    if tree != cb.tree {
        return Err(MetricError::Invariant("tree script does not reach the cut of H'".into()));
    }
    graph.validate()?;
    if !is_isomorphic(&graph, &gb) {
        return Err(MetricError::Invariant("lifted moves do not reach H'".into()));
    }
    let moves = upper.script.len();
    Ok(Interpolation {
        script: upper.script,
        graph_moves,
        moves,
        constant: move_constant.powi(moves as i32),
        log_constant: moves as f64 * move_constant.ln(),
        result: graph,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Execution;
    use crate::graph::{make_line_graph, random_marked_graph};
    use crate::metric::tests::barbell;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit(m: &MarkedGraph) -> MetricGraph {
        MetricGraph::unit(m.graph().clone()).unwrap()
    }

    #[test]
    fn collapse_fixtures() {
        let r = collapse_to_rose(&MetricGraph::rose(5).unwrap(), 0.5).unwrap();
        assert_eq!(r.constant, 1.0);
        assert!(r.spanning.is_empty());
        let b = barbell();
        let c = collapse_to_rose(&b, 0.5).unwrap();
        assert!((c.constant - 1.5).abs() < 1e-12);
        assert!(c.constant <= c.witness_k * 2.0 / 0.5 + 1e-12);
        assert_eq!(c.spanning, vec![1]);
        assert!(matches!(collapse_to_rose(&b, 0.7), Err(MetricError::NotThick { .. })));
    }

    #[test]
    fn fold_fixtures() {
        let f = fold_rose(1).unwrap();
        assert_eq!((f.rounds, f.constant), (0, 1.0));
        let f = fold_rose(4).unwrap();
        assert_eq!(f.rounds, 2);
        assert!(f.constant <= 4.0);
        for n in 2..70 {
            let f = fold_rose(n).unwrap();
            assert_eq!(f.rounds, (n as f64).log2().ceil() as u32);
            assert!(f.graph.is_trivalent());
            assert_eq!(f.graph.rank(), n);
            assert!(f.graph.lengths().iter().all(|&x| x == 1.0));
        }
    }

    #[test]
    fn expansion_fixtures() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tri = random_marked_graph(4, 0, &mut rng).unwrap();
        let lengths: Vec<f64> = (0..tri.graph().edge_count()).map(|_| rng.gen_range(0.5..2.0)).collect();
        let h = MetricGraph::normalized(tri.graph().clone(), lengths).unwrap();
        let e = expand_vertices(&h).unwrap();
        assert!(e.expanded.is_empty());
        assert_eq!(e.constant, h.max_length().max(1.0));
        assert!(is_isomorphic(&e.graph.as_marked().unwrap(), &tri));

        let rose = MetricGraph::rose(4).unwrap();
        let e = expand_vertices(&rose).unwrap();
        assert_eq!(e.expanded, vec![8]);
        assert!(e.graph.is_trivalent());
        assert_eq!(e.graph.rank(), 4);
        assert_eq!(e.constant, 1.0);

        let mut g = HalfEdgeGraph::new(2);
        for _ in 0..5 {
            g.add_edge(0, 1);
        }
        let e = expand_vertices(&MetricGraph::normalized(g, vec![1.0; 5]).unwrap()).unwrap();
        assert_eq!(e.expanded, vec![5, 5]);
        assert!(e.graph.is_trivalent());
        assert_eq!(e.graph.rank(), 4);
    }

    #[test]
    fn interpolation_fixtures() {
        let line = unit(&make_line_graph(8, 0).unwrap());
        let i = interpolate_trivalent(&line, &line, 3.0).unwrap();
        assert_eq!(i.moves, 0);
        assert_eq!(i.constant, 1.0);
        let bouquet = fold_rose(8).unwrap().graph;
        let i = interpolate_trivalent(&line, &bouquet, 3.0).unwrap();
        assert!(i.moves > 0);
        assert_eq!(i.graph_moves.len(), i.moves);
        assert!(interpolate_trivalent(&line, &fold_rose(7).unwrap().graph, 3.0).is_err());
    }

    #[test]
    fn random_pairs_replay() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for rank in [2usize, 3, 5, 8, 16, 33, 64] {
            let a = unit(&random_marked_graph(rank, 0, &mut rng).unwrap());
            let b = unit(&random_marked_graph(rank, 0, &mut rng).unwrap());
            let i = interpolate_trivalent(&a, &b, 3.0).unwrap();
            assert!(is_isomorphic(&i.result, &b.as_marked().unwrap()));
            assert!(i.result.diameter(Execution::Sequential) > 0);
        }
    }
}
