use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use whitehead_core::graph::{default_cut, glue, is_isomorphic, random_marked_graph, HalfEdgeGraph, MarkedGraph};
use whitehead_core::metric::{random_thick_graph, MetricGraph};
use whitehead_core::oracle::{exact_distance, Metric};
use whitehead_core::sort::{build_tn, distance_upper, normalize};
use whitehead_core::tree::random_tree;
use whitehead_core::{parse_tree, LabeledTree};

fn tree(n: usize, seed: u64) -> LabeledTree {
    random_tree(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn relabel(m: &MarkedGraph, rng: &mut ChaCha8Rng) -> MarkedGraph {
    let g = m.graph();
    let mut perm: Vec<usize> = (0..g.vertex_count()).collect();
    perm.shuffle(rng);
    let mut edges: Vec<usize> = (0..g.edge_count()).collect();
    edges.shuffle(rng);
    let mut out = HalfEdgeGraph::new(g.vertex_count());
    for e in edges {
        let (u, v) = g.endpoints(e);
        out.add_edge(perm[v], perm[u]);
    }
    MarkedGraph::new(out, m.marks().iter().map(|&v| perm[v]).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_text_round_trips(n in 0usize..200, seed in any::<u64>()) {
        let t = tree(n, seed);
        let again = parse_tree(&t.canonical()).unwrap();
        prop_assert_eq!(again.canonical(), t.canonical());
        prop_assert_eq!(again.complexity(), n);
    }

    #[test]
    fn normalization_scripts_replay(n in 2usize..300, seed in any::<u64>()) {
        let t = tree(n, seed);
        let norm = normalize(&t).unwrap();
        prop_assert_eq!(norm.script(&t).replay(&t).unwrap(), build_tn(n));
        prop_assert_eq!(norm.inverse_script(&t).replay(&build_tn(n)).unwrap(), t);
    }

    #[test]
    fn upper_bound_dominates_exact(n in 1usize..=5, a in any::<u64>(), b in any::<u64>()) {
        let (t1, t2) = (tree(n, a), tree(n, b));
        let ub = distance_upper(&t1, &t2).unwrap();
        let ds = exact_distance(&t1, &t2, Metric::S).unwrap();
        let dw = exact_distance(&t1, &t2, Metric::W).unwrap();
        prop_assert!(ub.bound >= ds);
        prop_assert!(ds <= dw);
        prop_assert_eq!(dw, exact_distance(&t2, &t1, Metric::W).unwrap());
        prop_assert_eq!(ds == 0, t1 == t2);
        prop_assert_eq!(ub.script.replay(&t1).unwrap(), t2);
    }

    #[test]
    fn glue_inverts_cut(g in 0usize..6, p in 0usize..6, seed in any::<u64>()) {
        prop_assume!(2 * g + p > 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_marked_graph(g, p, &mut rng).unwrap();
        prop_assert_eq!(m.rank(), g);
        prop_assert_eq!(m.p(), p);
        let cut = default_cut(&m).unwrap();
        prop_assert_eq!(cut.tree.complexity(), 2 * g + p - 2);
        prop_assert!(is_isomorphic(&glue(&cut.tree, g, p).unwrap(), &m));
    }

    #[test]
    fn isomorphism_ignores_vertex_names(g in 0usize..5, p in 0usize..5, seed in any::<u64>()) {
        prop_assume!(2 * g + p > 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_marked_graph(g, p, &mut rng).unwrap();
        let r = relabel(&m, &mut rng);
        prop_assert!(is_isomorphic(&m, &r));
        prop_assert!(is_isomorphic(&r, &m));
    }

    #[test]
    fn thick_graphs_are_normalized(n in 2usize..12, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_thick_graph(n, 0.05, &mut rng).unwrap();
        prop_assert_eq!(m.rank(), n);
        prop_assert!(m.is_normalized());
        prop_assert!(m.is_trivalent());
        prop_assert!(m.thickness() >= 0.05);
        let again = MetricGraph::parse(&m.to_string()).unwrap();
        prop_assert!((again.volume() - m.volume()).abs() < 1e-9);
    }
}
