//! Metric graphs and a staged upper bound on the Lipschitz constant of a
//! map between two of them.
//!
//! The map `G -> H` is factored as `G -> R_n -> G' -> H' -> H`: collapse a
//! shortest spanning tree onto the rose, fold the rose into a unit-length
//! trivalent graph, interpolate between trivalent graphs by simultaneous
//! Whitehead moves, and collapse the trees inserted at the high-valence
//! vertices of `H`. The certificate multiplies one constant per stage.

mod certificate;
mod stages;

pub use certificate::{lipschitz_pipeline, random_thick_graph, LipschitzCertificate, Stage, DEFAULT_MOVE_CONSTANT};
pub use stages::{collapse_to_rose, expand_vertices, fold_rose, interpolate_trivalent, Expansion, Fold, Interpolation, RoseCollapse};

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use thiserror::Error;

use crate::graph::{parse_graph_text, GraphError, HalfEdgeGraph, MarkedGraph};
use crate::rewriting::MoveError;
use crate::sort::SortError;

/// Relative tolerance for the volume invariant.
pub const VOLUME_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("invalid metric graph: {0}")]
    Invalid(String),
    #[error("graph is not {eps}-thick: shortest cycle has length {thickness}")]
    NotThick { eps: f64, thickness: f64 },
    #[error("volume {volume} differs from rank {rank}")]
    Volume { volume: f64, rank: usize },
    #[error("ranks differ: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("rank {0} is too small (need at least 2)")]
    RankTooSmall(usize),
    #[error("interpolation invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sort(#[from] SortError),
    #[error(transparent)]
    Move(#[from] MoveError),
}

/// A connected multigraph with positive edge lengths. Vertices have
/// valence at least 3, except the single vertex of the rank-1 circle.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricGraph {
    pub(crate) graph: HalfEdgeGraph,
    pub(crate) lengths: Vec<f64>,
}

impl MetricGraph {
    pub fn new(graph: HalfEdgeGraph, lengths: Vec<f64>) -> Result<Self, MetricError> {
        if lengths.len() != graph.edge_count() {
            return Err(MetricError::Invalid(format!(
                "{} lengths for {} edges",
                lengths.len(),
                graph.edge_count()
            )));
        }
        if let Some(x) = lengths.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(MetricError::Invalid(format!("edge length {x} is not positive")));
        }
        if graph.vertex_count() == 0 || !graph.is_connected() {
            return Err(MetricError::Invalid("graph is empty or disconnected".into()));
        }
        let circle = graph.vertex_count() == 1 && graph.edge_count() == 1;
        if !circle {
            if let Some((v, d)) = graph.degrees().into_iter().enumerate().find(|&(_, d)| d < 3) {
                return Err(MetricError::Invalid(format!("vertex {v} has valence {d}")));
            }
        }
        Ok(MetricGraph { graph, lengths })
    }

    /// Same graph with lengths rescaled so the volume equals the rank.
    pub fn normalized(graph: HalfEdgeGraph, lengths: Vec<f64>) -> Result<Self, MetricError> {
        let mut m = MetricGraph::new(graph, lengths)?;
        let rank = m.rank();
        if rank == 0 {
            return Err(MetricError::RankTooSmall(0));
        }
        let scale = rank as f64 / m.volume();
        m.lengths.iter_mut().for_each(|x| *x *= scale);
        Ok(m)
    }

    /// Every edge of length 1.
    pub fn unit(graph: HalfEdgeGraph) -> Result<Self, MetricError> {
        let m = graph.edge_count();
        MetricGraph::new(graph, vec![1.0; m])
    }

    /// The rose `R_n`: one vertex with `n` loops of length 1.
    pub fn rose(n: usize) -> Result<Self, MetricError> {
        let mut g = HalfEdgeGraph::new(1);
        for _ in 0..n {
            g.add_edge(0, 0);
        }
        MetricGraph::unit(g)
    }

    pub fn graph(&self) -> &HalfEdgeGraph {
        &self.graph
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn rank(&self) -> usize {
        self.graph.rank().max(0) as usize
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().sum()
    }

    pub fn is_normalized(&self) -> bool {
        let n = self.rank() as f64;
        (self.volume() - n).abs() <= VOLUME_TOLERANCE * n.max(1.0)
    }

    pub fn check_normalized(&self) -> Result<(), MetricError> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(MetricError::Volume { volume: self.volume(), rank: self.rank() })
        }
    }

    pub fn is_trivalent(&self) -> bool {
        self.graph.degrees().iter().all(|&d| d == 3)
    }

    pub fn max_length(&self) -> f64 {
        self.lengths.iter().copied().fold(0.0, f64::max)
    }

    /// Length of the shortest cycle (infinite for a tree).
    pub fn thickness(&self) -> f64 {
        let g = &self.graph;
        let inc = g.incidence();
        let mut best = f64::INFINITY;
        for e in 0..g.edge_count() {
            let (u, v) = g.endpoints(e);
            if u == v {
                best = best.min(self.lengths[e]);
                continue;
            }
            // Dijkstra from u to v without e.
            let mut dist = vec![f64::INFINITY; g.vertex_count()];
            dist[u] = 0.0;
            let mut heap = BinaryHeap::from([(Reverse(Ordered(0.0)), u)]);
            while let Some((Reverse(Ordered(d)), x)) = heap.pop() {
                if d > dist[x] || d + self.lengths[e] >= best {
                    continue;
                }
                if x == v {
                    break;
                }
                for &h in &inc[x] {
                    let f = h / 2;
                    if f == e {
                        continue;
                    }
                    let y = g.ends[h ^ 1];
                    let nd = d + self.lengths[f];
                    if nd < dist[y] {
                        dist[y] = nd;
                        heap.push((Reverse(Ordered(nd)), y));
                    }
                }
            }
            best = best.min(dist[v] + self.lengths[e]);
        }
        best
    }

    pub fn check_thick(&self, eps: f64) -> Result<(), MetricError> {
        let thickness = self.thickness();
        if thickness < eps {
            return Err(MetricError::NotThick { eps, thickness });
        }
        Ok(())
    }

    pub(crate) fn as_marked(&self) -> Result<MarkedGraph, MetricError> {
        Ok(MarkedGraph::new(self.graph.clone(), vec![])?)
    }

    /// Parses the graph text format with optional `len <edge> <length>`
    /// lines (default 1). Marks are not allowed. Lengths are relative: the
    /// result is rescaled to volume equal to its rank.
    pub fn parse(text: &str) -> Result<Self, MetricError> {
        let parsed = parse_graph_text(text)?;
        if !parsed.marks.is_empty() {
            return Err(MetricError::Invalid("metric graphs carry no marks".into()));
        }
        let mut lengths = vec![1.0; parsed.graph.edge_count()];
        for &(e, x, line) in &parsed.lengths {
            if e >= lengths.len() {
                return Err(GraphError::Parse { line, msg: format!("no edge {e}") }.into());
            }
            lengths[e] = x;
        }
        let m = MetricGraph::normalized(parsed.graph, lengths)?;
        if let Some((g, p)) = parsed.header {
            if g != m.rank() || p != 0 {
                return Err(MetricError::Invalid(format!("header says g={g} p={p}, graph has g={} p=0", m.rank())));
            }
        }
        Ok(m)
    }
}

impl fmt::Display for MetricGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "graph g={} p=0", self.rank())?;
        for e in 0..self.graph.edge_count() {
            let (u, v) = self.graph.endpoints(e);
            writeln!(f, "edge {u} {v}")?;
        }
        for (e, x) in self.lengths.iter().enumerate() {
            writeln!(f, "len {e} {x}")?;
        }
        Ok(())
    }
}

/// Total order on finite floats for the Dijkstra heap.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Ordered(f64);

impl Eq for Ordered {}

impl PartialOrd for Ordered {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordered {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn barbell() -> MetricGraph {
        let mut g = HalfEdgeGraph::new(2);
        g.add_edge(0, 0);
        g.add_edge(0, 1);
        g.add_edge(1, 1);
        MetricGraph::normalized(g, vec![1.0; 3]).unwrap()
    }

    #[test]
    fn rose_and_barbell() {
        let r = MetricGraph::rose(4).unwrap();
        assert_eq!(r.rank(), 4);
        assert!(r.is_normalized());
        assert_eq!(r.thickness(), 1.0);
        let b = barbell();
        assert!(b.is_normalized());
        assert!((b.thickness() - 2.0 / 3.0).abs() < 1e-12);
        assert!(MetricGraph::rose(1).is_ok());
    }

    #[test]
    fn thickness_of_a_theta() {
        let mut g = HalfEdgeGraph::new(2);
        for _ in 0..3 {
            g.add_edge(0, 1);
        }
        let m = MetricGraph::new(g, vec![0.5, 1.0, 0.25]).unwrap();
        assert!((m.thickness() - 0.75).abs() < 1e-12);
        assert_eq!(m.rank(), 2);
        assert!(!m.is_normalized());
    }

    #[test]
    fn rejects_bad_input() {
        let mut g = HalfEdgeGraph::new(2);
        g.add_edge(0, 1);
        g.add_edge(0, 1);
        assert!(MetricGraph::unit(g.clone()).is_err());
        assert!(MetricGraph::new(g, vec![1.0]).is_err());
        assert!(MetricGraph::parse("edge 0 0\nedge 0 0\nlen 0 -1\n").is_err());
        assert!(MetricGraph::parse("edge 0 0\nedge 0 1\nmark 1 0\n").is_err());
    }

    #[test]
    fn text_round_trip() {
        let m = MetricGraph::parse("edge 0 0\nedge 0 1\nedge 1 1\nlen 1 2\n").unwrap();
        assert_eq!(m.lengths(), &[0.5, 1.0, 0.5]);
        let again = MetricGraph::parse(&m.to_string()).unwrap();
        assert_eq!(again, m);
    }
}
