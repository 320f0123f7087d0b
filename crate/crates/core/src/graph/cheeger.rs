//! Cheeger constant `min |∂Δ| / |Δ|` over edge sets `Δ` with at most half
//! the edges, where `∂Δ` is the set of edges of `Δ` sharing a vertex with
//! an edge outside `Δ`.
//!
//! The boundary is additive over the connected pieces of `Δ`, so the
//! minimum is attained on a connected set and the exact search only visits
//! connected edge sets.

use std::cmp::Ordering;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::exec::Execution;

use super::{GraphError, HalfEdgeGraph};

pub const MAX_EXACT_CHEEGER_EDGES: usize = 20;

/// Non-negative rational in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fraction {
    num: u64,
    den: u64,
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den);
        Fraction { num: num / g, den: den / g }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheegerValue {
    pub value: Fraction,
    /// `false` for sampled values, which only bound the constant from above.
    pub exact: bool,
    /// Edge set attaining `value`.
    pub witness: Vec<usize>,
}

impl fmt::Display for CheegerValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact {
            write!(f, "{}", self.value)
        } else {
            write!(f, "<= {} (upper bound only)", self.value)
        }
    }
}

/// For each edge, the mask of other edges sharing a vertex with it.
fn adjacency_masks(g: &HalfEdgeGraph) -> Vec<u64> {
    let inc = g.incidence();
    let mut adj = vec![0u64; g.edge_count()];
    for halves in &inc {
        for &h in halves {
            for &k in halves {
                if h / 2 != k / 2 {
                    adj[h / 2] |= 1 << (k / 2);
                }
            }
        }
    }
    adj
}

fn ratio_of(mask: u64, adj: &[u64]) -> Fraction {
    let mut boundary = 0;
    let mut bits = mask;
    while bits != 0 {
        let e = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        if adj[e] & !mask != 0 {
            boundary += 1;
        }
    }
    Fraction::new(boundary, mask.count_ones() as u64)
}

/// `|∂Δ| / |Δ|` for an explicit edge set.
pub fn boundary_ratio(g: &HalfEdgeGraph, edges: &[usize]) -> Result<Fraction, GraphError> {
    if edges.is_empty() {
        return Err(GraphError::Params("empty edge set".into()));
    }
    let inc = g.incidence();
    let mut inside = vec![false; g.edge_count()];
    for &e in edges {
        if e >= g.edge_count() || std::mem::replace(&mut inside[e], true) {
            return Err(GraphError::Params(format!("bad or repeated edge {e}")));
        }
    }
    let boundary = inside
        .iter()
        .enumerate()
        .filter(|&(e, &inn)| {
            inn && [2 * e, 2 * e + 1]
                .iter()
                .any(|&h| inc[g.ends[h]].iter().any(|&k| !inside[k / 2]))
        })
        .count();
    Ok(Fraction::new(boundary as u64, edges.len() as u64))
}

fn mask_to_edges(mask: u64) -> Vec<usize> {
    (0..64).filter(|&e| mask >> e & 1 == 1).collect()
}

/// Best `(ratio, mask)` over connected sets whose lowest edge is `start`.
fn search_from(start: usize, adj: &[u64], limit: u32) -> (Fraction, u64) {
    struct Search<'a> {
        adj: &'a [u64],
        limit: u32,
        best: (Fraction, u64),
    }
    impl Search<'_> {
        fn visit(&mut self, set: u64, ext: u64, ban: u64) {
            let r = ratio_of(set, self.adj);
            if (r, set) < self.best {
                self.best = (r, set);
            }
            if set.count_ones() == self.limit {
                return;
            }
            let (mut ext, mut ban) = (ext, ban);
            while ext != 0 {
                let v = ext & ext.wrapping_neg();
                ext ^= v;
                ban |= v;
                let next = set | v;
                let grown = (ext | self.adj[v.trailing_zeros() as usize]) & !ban & !next;
                self.visit(next, grown, ban);
            }
        }
    }
    let start_bit = 1u64 << start;
    let ban = (start_bit << 1) - 1;
    let mut s = Search { adj, limit, best: (Fraction::new(u64::MAX, 1), u64::MAX) };
    s.visit(start_bit, adj[start] & !ban, ban);
    s.best
}

/// Exact Cheeger constant by exhaustive search over connected edge sets.
pub fn cheeger_exact(g: &HalfEdgeGraph, exec: Execution) -> Result<CheegerValue, GraphError> {
    let m = g.edge_count();
    if m < 2 {
        return Err(GraphError::TooFewEdges(m));
    }
    if m > MAX_EXACT_CHEEGER_EDGES {
        return Err(GraphError::SizeGuard(m));
    }
    let adj = adjacency_masks(g);
    let limit = (m / 2) as u32;
    let best = exec
        .map_range(m, |s| search_from(s, &adj, limit))
        .into_iter()
        .min()
        .expect("at least one start edge");
    Ok(CheegerValue { value: best.0, exact: true, witness: mask_to_edges(best.1) })
}

/// Exact value; refuses graphs over [`MAX_EXACT_CHEEGER_EDGES`] edges.
pub fn cheeger(g: &HalfEdgeGraph) -> Result<CheegerValue, GraphError> {
    cheeger_exact(g, Execution::default())
}

/// Upper bound from `samples` random connected edge sets, grown from a
/// random edge by random neighbor additions to a random size.
pub fn cheeger_sampled<R: Rng + ?Sized>(g: &HalfEdgeGraph, samples: usize, rng: &mut R) -> Result<CheegerValue, GraphError> {
    let m = g.edge_count();
    if m < 2 {
        return Err(GraphError::TooFewEdges(m));
    }
    let inc = g.incidence();
    let limit = m / 2;
    let mut best: Option<(Fraction, Vec<usize>)> = None;
    let mut inside = vec![false; m];
    for _ in 0..samples.max(1) {
        inside.iter_mut().for_each(|x| *x = false);
        let size = rng.gen_range(1..=limit);
        let first = rng.gen_range(0..m);
        inside[first] = true;
        let mut set = vec![first];
        let mut frontier: Vec<usize> = Vec::new();
        while set.len() < size {
            frontier.clear();
            for &e in &set {
                for h in [2 * e, 2 * e + 1] {
                    frontier.extend(inc[g.ends[h]].iter().map(|&k| k / 2).filter(|&k| !inside[k]));
                }
            }
            let Some(&next) = frontier.choose(rng) else { break };
            inside[next] = true;
            set.push(next);
        }
        let r = boundary_ratio(g, &set)?;
        if best.as_ref().is_none_or(|(b, _)| r < *b) {
            set.sort_unstable();
            best = Some((r, set));
        }
    }
    let (value, witness) = best.expect("at least one sample");
    Ok(CheegerValue { value, exact: false, witness })
}

/// Whether `ch(g) >= delta`. Above the exact size limit a `false` answer is
/// still possible when a sampled set already falls below `delta`.
pub fn is_expander_witness(g: &HalfEdgeGraph, delta: f64) -> Result<bool, GraphError> {
    match cheeger(g) {
        Ok(v) => Ok(v.value.to_f64() >= delta),
        Err(GraphError::SizeGuard(m)) => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(m as u64);
            let v = cheeger_sampled(g, 20_000, &mut rng)?;
            if v.value.to_f64() < delta {
                Ok(false)
            } else {
                Err(GraphError::SizeGuard(m))
            }
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::k4;
    use crate::graph::{make_line_graph, random_cubic_graph, random_marked_graph};
    use rand_chacha::ChaCha8Rng;

    /// Minimum over every edge subset, connected or not.
    fn naive(g: &HalfEdgeGraph) -> Fraction {
        let m = g.edge_count();
        let mut best = Fraction::new(u64::MAX, 1);
        for mask in 1u32..(1 << m) {
            if mask.count_ones() as usize > m / 2 {
                continue;
            }
            let edges: Vec<usize> = (0..m).filter(|&e| mask >> e & 1 == 1).collect();
            best = best.min(boundary_ratio(g, &edges).unwrap());
        }
        best
    }

    #[test]
    fn fractions() {
        assert_eq!(Fraction::new(2, 4), Fraction::new(1, 2));
        assert!(Fraction::new(1, 3) < Fraction::new(1, 2));
        assert_eq!(Fraction::new(0, 5).to_string(), "0/1");
    }

    #[test]
    fn k4_is_one() {
        let v = cheeger(&k4().graph).unwrap();
        assert_eq!(v.value, Fraction::new(1, 1));
        assert!(v.exact);
        assert!(is_expander_witness(&k4().graph, 0.5).unwrap());
    }

    #[test]
    fn guards() {
        let mut single = HalfEdgeGraph::new(2);
        single.add_edge(0, 1);
        assert_eq!(cheeger(&single).unwrap_err(), GraphError::TooFewEdges(1));
        let big = make_line_graph(10, 0).unwrap();
        assert_eq!(cheeger(&big.graph).unwrap_err(), GraphError::SizeGuard(27));
    }

    #[test]
    fn line_graphs_have_small_constant() {
        for g in 2..=7 {
            let line = make_line_graph(g, 0).unwrap();
            assert!(cheeger(&line.graph).unwrap().value.to_f64() <= 4.0 / g as f64);
        }
        assert!(!is_expander_witness(&make_line_graph(8, 0).unwrap().graph, 0.5).unwrap());
    }

    #[test]
    fn agrees_with_naive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut checked = 0;
        while checked < 60 {
            let g = random_marked_graph(rng.gen_range(1..4), rng.gen_range(0..4), &mut rng);
            let Ok(g) = g else { continue };
            if g.graph.edge_count() < 2 || g.graph.edge_count() > 10 {
                continue;
            }
            let fast = cheeger_exact(&g.graph, Execution::Sequential).unwrap();
            assert_eq!(fast.value, naive(&g.graph));
            assert_eq!(boundary_ratio(&g.graph, &fast.witness).unwrap(), fast.value);
            assert_eq!(cheeger_exact(&g.graph, Execution::Parallel).unwrap(), fast);
            checked += 1;
        }
    }

    #[test]
    fn invariant_under_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let g = random_cubic_graph(8, &mut rng).unwrap();
            let mut perm: Vec<usize> = (0..g.graph.vertex_count).collect();
            perm.shuffle(&mut rng);
            let mut edges: Vec<usize> = (0..g.graph.edge_count()).collect();
            edges.shuffle(&mut rng);
            let mut h = HalfEdgeGraph::new(g.graph.vertex_count);
            for e in edges {
                let (u, v) = g.graph.endpoints(e);
                h.add_edge(perm[u], perm[v]);
            }
            assert_eq!(cheeger(&g.graph).unwrap().value, cheeger(&h).unwrap().value);
        }
    }

    #[test]
    fn sampling_bounds_from_above() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = random_cubic_graph(10, &mut rng).unwrap();
        let exact = cheeger(&g.graph).unwrap();
        let sampled = cheeger_sampled(&g.graph, 500, &mut rng).unwrap();
        assert!(!sampled.exact);
        assert!(sampled.value >= exact.value);
    }
}
