//! Marked trivalent multigraphs.
//!
//! Graphs are stored as half-edges: edge `e` owns halves `2e` and `2e + 1`
//! and `ends[h]` is the vertex half `h` is attached to. Loops and parallel
//! edges are allowed. A marked graph of rank `g` has `p` labeled
//! valence-1 vertices; every other vertex is trivalent.

mod cheeger;
mod construct;
mod counting;
mod cut;
mod iso;
mod whitehead;

pub use cheeger::{boundary_ratio, cheeger, cheeger_exact, cheeger_sampled, is_expander_witness, CheegerValue, Fraction, MAX_EXACT_CHEEGER_EDGES};
pub use construct::{make_bouquet_graph, make_line_graph, random_cubic_graph, random_marked_graph};
pub use counting::{cardinality_formulas, Cardinality};
pub use cut::{cut_to_tree, default_cut, glue, CutResult};
pub use iso::is_isomorphic;
pub use whitehead::{graph_whitehead, shorten_loop, shortest_cycle, GraphDirection};

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::exec::Execution;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("edge {0} is not interior (both ends must be distinct trivalent vertices)")]
    NotInterior(usize),
    #[error("graph has no cycle")]
    NoCycle,
    #[error("exact Cheeger search refused for {0} edges (limit {max})", max = MAX_EXACT_CHEEGER_EDGES)]
    SizeGuard(usize),
    #[error("Cheeger constant needs at least 2 edges, got {0}")]
    TooFewEdges(usize),
    #[error("invalid spanning tree: {0}")]
    SpanningTree(String),
    #[error("complement labeling does not list the complement edges: {0}")]
    Labeling(String),
    #[error("malformed pairing: {0}")]
    Pairing(String),
}

/// Undirected multigraph on vertices `0..vertex_count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfEdgeGraph {
    pub(crate) ends: Vec<usize>,
    pub(crate) vertex_count: usize,
}

impl HalfEdgeGraph {
    pub fn new(vertex_count: usize) -> Self {
        HalfEdgeGraph { ends: Vec::new(), vertex_count }
    }

    pub fn add_vertex(&mut self) -> usize {
        self.vertex_count += 1;
        self.vertex_count - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> usize {
        assert!(u < self.vertex_count && v < self.vertex_count, "edge endpoint out of range");
        self.ends.push(u);
        self.ends.push(v);
        self.ends.len() / 2 - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.ends.len() / 2
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        (self.ends[2 * e], self.ends[2 * e + 1])
    }

    pub fn half_vertex(&self, h: usize) -> usize {
        self.ends[h]
    }

    pub fn twin(h: usize) -> usize {
        h ^ 1
    }

    /// Half-edges at each vertex, in increasing id order.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.vertex_count];
        for (h, &v) in self.ends.iter().enumerate() {
            inc[v].push(h);
        }
        inc
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for &v in &self.ends {
            deg[v] += 1;
        }
        deg
    }

    /// Rank of the fundamental group, `|E| - |V| + 1`.
    pub fn rank(&self) -> i64 {
        self.edge_count() as i64 - self.vertex_count as i64 + 1
    }

    /// Unweighted distances from `src` (`usize::MAX` if unreachable).
    pub fn bfs(&self, src: usize, inc: &[Vec<usize>]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            for &h in &inc[v] {
                let w = self.ends[h ^ 1];
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        let inc = self.incidence();
        self.bfs(0, &inc).iter().all(|&d| d != usize::MAX)
    }

    /// Largest distance between two vertices, edges of length 1.
    pub fn diameter(&self, exec: Execution) -> usize {
        let inc = self.incidence();
        exec.map_range(self.vertex_count, |v| self.bfs(v, &inc).into_iter().max().unwrap_or(0))
            .into_iter()
            .max()
            .unwrap_or(0)
    }
}

/// A connected graph whose vertices are trivalent or marked with valence 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedGraph {
    pub(crate) graph: HalfEdgeGraph,
    /// `marks[l]` is the vertex carrying label `l`.
    pub(crate) marks: Vec<usize>,
}

impl MarkedGraph {
    pub fn new(graph: HalfEdgeGraph, marks: Vec<usize>) -> Result<Self, GraphError> {
        let m = MarkedGraph { graph, marks };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let g = &self.graph;
        let deg = g.degrees();
        let mut marked = vec![false; g.vertex_count];
        for (l, &v) in self.marks.iter().enumerate() {
            if v >= g.vertex_count {
                return Err(GraphError::Invalid(format!("mark {l} on missing vertex {v}")));
            }
            if std::mem::replace(&mut marked[v], true) {
                return Err(GraphError::Invalid(format!("vertex {v} carries two marks")));
            }
        }
        for v in 0..g.vertex_count {
            let want = if marked[v] { 1 } else { 3 };
            if deg[v] != want {
                return Err(GraphError::Invalid(format!("vertex {v} has valence {} (expected {want})", deg[v])));
            }
        }
        if !g.is_connected() {
            return Err(GraphError::Invalid("graph is disconnected".into()));
        }
        if self.trivalent_count() == 0 {
            return Err(GraphError::Invalid("no trivalent vertex (2g - 2 + p must be positive)".into()));
        }
        Ok(())
    }

    pub fn graph(&self) -> &HalfEdgeGraph {
        &self.graph
    }

    pub fn marks(&self) -> &[usize] {
        &self.marks
    }

    pub fn rank(&self) -> usize {
        self.graph.rank() as usize
    }

    pub fn p(&self) -> usize {
        self.marks.len()
    }

    pub fn trivalent_count(&self) -> usize {
        self.graph.vertex_count - self.marks.len()
    }

    pub fn is_marked(&self, v: usize) -> bool {
        self.marks.contains(&v)
    }

    pub fn mark_of(&self, v: usize) -> Option<usize> {
        self.marks.iter().position(|&m| m == v)
    }

    pub fn has_loop(&self) -> bool {
        (0..self.graph.edge_count()).any(|e| {
            let (u, v) = self.graph.endpoints(e);
            u == v
        })
    }

    pub fn diameter(&self, exec: Execution) -> usize {
        self.graph.diameter(exec)
    }

    /// Sorted valence sequence, used to check that moves preserve it.
    pub fn valence_profile(&self) -> Vec<usize> {
        let mut d = self.graph.degrees();
        d.sort_unstable();
        d
    }

    /// Parses the graph text format: a `graph g=<g> p=<p>` header, then
    /// `edge <u> <v>` and `mark <v> <label>` lines.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let parsed = parse_graph_text(text)?;
        if !parsed.lengths.is_empty() {
            return Err(GraphError::Parse { line: parsed.lengths[0].2, msg: "'len' lines need a metric graph".into() });
        }
        let m = MarkedGraph::new(parsed.graph, parsed.marks)?;
        if let Some((g, p)) = parsed.header {
            if g != m.rank() || p != m.p() {
                return Err(GraphError::Invalid(format!(
                    "header says g={g} p={p}, graph has g={} p={}",
                    m.rank(),
                    m.p()
                )));
            }
        }
        Ok(m)
    }
}

impl fmt::Display for MarkedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "graph g={} p={}", self.rank(), self.p())?;
        for e in 0..self.graph.edge_count() {
            let (u, v) = self.graph.endpoints(e);
            writeln!(f, "edge {u} {v}")?;
        }
        for (l, v) in self.marks.iter().enumerate() {
            writeln!(f, "mark {v} {l}")?;
        }
        Ok(())
    }
}

pub(crate) struct ParsedGraph {
    pub graph: HalfEdgeGraph,
    pub marks: Vec<usize>,
    pub header: Option<(usize, usize)>,
    /// `(edge, length, line)` triples.
    pub lengths: Vec<(usize, f64, usize)>,
}

pub(crate) fn parse_graph_text(text: &str) -> Result<ParsedGraph, GraphError> {
    let mut edges = Vec::new();
    let mut mark_pairs = Vec::new();
    let mut header = None;
    let mut lengths = Vec::new();
    let mut max_vertex: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |msg: String| GraphError::Parse { line, msg };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = body.split_whitespace().collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| err(format!("expected a non-negative integer, got '{s}'")));
        match tokens.as_slice() {
            ["graph", rest @ ..] => {
                let mut g = None;
                let mut p = None;
                for kv in rest {
                    match kv.split_once('=') {
                        Some(("g", v)) => g = Some(num(v)?),
                        Some(("p", v)) => p = Some(num(v)?),
                        _ => return Err(err(format!("unknown header field '{kv}'"))),
                    }
                }
                match (g, p) {
                    (Some(g), Some(p)) => header = Some((g, p)),
                    _ => return Err(err("header needs g=<g> p=<p>".into())),
                }
            }
            ["edge", u, v] => {
                let (u, v) = (num(u)?, num(v)?);
                max_vertex = max_vertex.max(Some(u.max(v)));
                edges.push((u, v));
            }
            ["mark", v, l] => {
                let (v, l) = (num(v)?, num(l)?);
                max_vertex = max_vertex.max(Some(v));
                mark_pairs.push((l, v, line));
            }
            ["len", e, x] => {
                let e = num(e)?;
                let x: f64 = x.parse().map_err(|_| err(format!("bad length '{x}'")))?;
                if !(x.is_finite() && x > 0.0) {
                    return Err(err(format!("length must be positive, got {x}")));
                }
                lengths.push((e, x, line));
            }
            _ => return Err(err(format!("unrecognized line '{body}'"))),
        }
    }
    let mut graph = HalfEdgeGraph::new(max_vertex.map_or(0, |m| m + 1));
    for (u, v) in edges {
        graph.add_edge(u, v);
    }
    mark_pairs.sort_unstable();
    let mut marks = Vec::with_capacity(mark_pairs.len());
    for (i, &(l, v, line)) in mark_pairs.iter().enumerate() {
        if l != i {
            return Err(GraphError::Parse { line, msg: format!("mark labels must be 0..p-1; missing {i}") });
        }
        marks.push(v);
    }
    Ok(ParsedGraph { graph, marks, header, lengths })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn k4() -> MarkedGraph {
        let mut g = HalfEdgeGraph::new(4);
        for (u, v) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            g.add_edge(u, v);
        }
        MarkedGraph::new(g, vec![]).unwrap()
    }

    #[test]
    fn k4_basics() {
        let k = k4();
        assert_eq!(k.rank(), 3);
        assert_eq!(k.diameter(Execution::Sequential), 1);
        assert_eq!(k.trivalent_count(), 4);
    }

    #[test]
    fn text_round_trip() {
        let text = "graph g=1 p=1\nedge 0 0\nedge 0 1\nmark 1 0\n";
        let g = MarkedGraph::parse(text).unwrap();
        assert_eq!(g.to_string(), text);
        assert_eq!(g.diameter(Execution::Sequential), 1);
        assert!(MarkedGraph::parse("graph g=2 p=1\nedge 0 0\nedge 0 1\nmark 1 0\n").is_err());
        assert!(MarkedGraph::parse("edge 0 1\n").is_err());
        assert!(matches!(MarkedGraph::parse("edge x 1"), Err(GraphError::Parse { line: 1, .. })));
    }
}
