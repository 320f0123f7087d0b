//! Exact distances over all of `Tree(n)` by breadth-first search, for
//! small `n`.
//!
//! The move graph is built once per `(n, metric)`: every tree is
//! enumerated, keyed by its canonical string, and linked to its
//! neighbors. Relabeling leaves is an automorphism of the move graph, so
//! eccentricity only depends on the unlabeled shape and the diameter can
//! be read off one BFS per shape.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::exec::Execution;
use crate::rewriting::{neighbors_s, neighbors_w};
use crate::sort::build_tn;
use crate::tree::{enumerate_trees, LabeledTree};

pub const MAX_ORACLE_W: usize = 7;
pub const MAX_ORACLE_S: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    /// One Whitehead step per move.
    W,
    /// One simultaneous move (steps on disjoint edges) per move.
    S,
}

impl Metric {
    pub fn guard(self) -> usize {
        match self {
            Metric::W => MAX_ORACLE_W,
            Metric::S => MAX_ORACLE_S,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::W => "W",
            Metric::S => "S",
        })
    }
}

impl FromStr for Metric {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "W" | "w" => Ok(Metric::W),
            "S" | "s" => Ok(Metric::S),
            _ => Err(OracleError::UnknownMetric(s.to_string())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("exact {metric} distances are limited to n <= {max}, got n = {n}")]
    Guard { n: usize, metric: Metric, max: usize },
    #[error("tree has complexity {got}, expected {want}")]
    Complexity { got: usize, want: usize },
    #[error("unknown metric '{0}' (expected W or S)")]
    UnknownMetric(String),
    #[error("tree {0} is not reachable")]
    Unreachable(String),
}

/// The move graph on `Tree(n)` with trees indexed by enumeration order.
pub struct MoveGraph {
    pub n: usize,
    pub metric: Metric,
    keys: Vec<String>,
    index: HashMap<String, u32>,
    shapes: Vec<String>,
    adj: Vec<Vec<u32>>,
}

/// Unlabeled shape of a tree, children sorted.
fn shape_key(t: &LabeledTree) -> String {
    let mut key: Vec<String> = vec![String::new(); t.node_count()];
    for id in t.postorder() {
        key[id.index()] = match t.children(id) {
            None => "x".into(),
            Some([a, b]) => {
                let (ka, kb) = (&key[a.index()], &key[b.index()]);
                let (lo, hi) = if ka <= kb { (ka, kb) } else { (kb, ka) };
                format!("({lo},{hi})")
            }
        };
    }
    std::mem::take(&mut key[t.top().index()])
}

fn check_guard(n: usize, metric: Metric) -> Result<(), OracleError> {
    if n > metric.guard() {
        return Err(OracleError::Guard { n, metric, max: metric.guard() });
    }
    Ok(())
}

impl MoveGraph {
    pub fn build(n: usize, metric: Metric, exec: Execution) -> Result<Self, OracleError> {
        check_guard(n, metric)?;
        let trees: Vec<LabeledTree> = enumerate_trees(n).expect("guarded").collect();
        let keys: Vec<String> = exec.map(&trees, |t| t.canonical());
        let shapes: Vec<String> = exec.map(&trees, shape_key);
        let index: HashMap<String, u32> = keys.iter().enumerate().map(|(i, k)| (k.clone(), i as u32)).collect();
        let adj = exec.map(&trees, |t| {
            let nb = match metric {
                Metric::W => neighbors_w(t),
                Metric::S => neighbors_s(t).expect("guard is below the neighbor limit"),
            };
            let mut ids: Vec<u32> = nb.iter().map(|u| index[&u.canonical()]).collect();
            ids.sort_unstable();
            ids
        });
        Ok(MoveGraph { n, metric, keys, index, shapes, adj })
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn index_of(&self, t: &LabeledTree) -> Result<u32, OracleError> {
        if t.complexity() != self.n {
            return Err(OracleError::Complexity { got: t.complexity(), want: self.n });
        }
        self.index.get(&t.canonical()).copied().ok_or_else(|| OracleError::Unreachable(t.canonical()))
    }

    pub fn key(&self, i: u32) -> &str {
        &self.keys[i as usize]
    }

    pub fn neighbors(&self, i: u32) -> &[u32] {
        &self.adj[i as usize]
    }

    /// Distances from `src` (`u32::MAX` where unreachable).
    pub fn bfs(&self, src: u32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.len()];
        dist[src as usize] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v as usize] + 1;
            for &w in &self.adj[v as usize] {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = d;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn eccentricity(&self, src: u32) -> Result<u32, OracleError> {
        let d = self.bfs(src);
        match d.iter().position(|&x| x == u32::MAX) {
            Some(i) => Err(OracleError::Unreachable(self.keys[i].clone())),
            None => Ok(d.into_iter().max().unwrap_or(0)),
        }
    }

    /// One tree per unlabeled shape, in enumeration order.
    pub fn shape_representatives(&self) -> Vec<u32> {
        let mut seen = HashMap::new();
        for (i, s) in self.shapes.iter().enumerate() {
            seen.entry(s.as_str()).or_insert(i as u32);
        }
        let mut reps: Vec<u32> = seen.into_values().collect();
        reps.sort_unstable();
        reps
    }

    /// Diameter from one BFS per shape.
    pub fn diameter(&self, exec: Execution) -> Result<u32, OracleError> {
        let reps = self.shape_representatives();
        let ecc = exec.map(&reps, |&r| self.eccentricity(r));
        ecc.into_iter().try_fold(0, |m, e| e.map(|e| m.max(e)))
    }

    /// Diameter from a BFS at every tree; the cross-check for
    /// [`MoveGraph::diameter`].
    pub fn diameter_all_pairs(&self, exec: Execution) -> Result<u32, OracleError> {
        let ecc = exec.map_range(self.len(), |i| self.eccentricity(i as u32));
        ecc.into_iter().try_fold(0, |m, e| e.map(|e| m.max(e)))
    }
}

/// Exact single-source distances over `Tree(n)`.
#[derive(Clone, Debug)]
pub struct DistanceTable {
    pub n: usize,
    pub metric: Metric,
    pub base: String,
    /// Canonical form to distance from `base`.
    pub distances: HashMap<String, usize>,
    /// Largest distance from `base`.
    pub eccentricity: usize,
}

impl DistanceTable {
    pub fn get(&self, t: &LabeledTree) -> Option<usize> {
        self.distances.get(&t.canonical()).copied()
    }
}

pub fn bfs_distances(n: usize, base: &LabeledTree, metric: Metric) -> Result<DistanceTable, OracleError> {
    let g = MoveGraph::build(n, metric, Execution::default())?;
    table_from(&g, base)
}

pub fn table_from(g: &MoveGraph, base: &LabeledTree) -> Result<DistanceTable, OracleError> {
    let src = g.index_of(base)?;
    let d = g.bfs(src);
    let mut distances = HashMap::with_capacity(g.len());
    let mut eccentricity = 0;
    for (i, &x) in d.iter().enumerate() {
        if x == u32::MAX {
            return Err(OracleError::Unreachable(g.keys[i].clone()));
        }
        eccentricity = eccentricity.max(x as usize);
        distances.insert(g.keys[i].clone(), x as usize);
    }
    Ok(DistanceTable { n: g.n, metric: g.metric, base: base.canonical(), distances, eccentricity })
}

/// Exact distance between two trees of the same complexity.
pub fn exact_distance(t1: &LabeledTree, t2: &LabeledTree, metric: Metric) -> Result<usize, OracleError> {
    if t1.complexity() != t2.complexity() {
        return Err(OracleError::Complexity { got: t2.complexity(), want: t1.complexity() });
    }
    let g = MoveGraph::build(t1.complexity(), metric, Execution::default())?;
    let d = g.bfs(g.index_of(t1)?);
    Ok(d[g.index_of(t2)? as usize] as usize)
}

pub fn exact_diameter(n: usize, metric: Metric) -> Result<usize, OracleError> {
    let g = MoveGraph::build(n, metric, Execution::default())?;
    Ok(g.diameter(Execution::default())? as usize)
}

/// `(r, |B_r|)` around `T_n` for `r = 0..=r_max`, or up to the
/// eccentricity of `T_n` when `r_max` is `None`.
pub fn ball_growth(n: usize, r_max: Option<usize>, metric: Metric) -> Result<Vec<(usize, usize)>, OracleError> {
    let g = MoveGraph::build(n, metric, Execution::default())?;
    ball_growth_in(&g, r_max)
}

pub fn ball_growth_in(g: &MoveGraph, r_max: Option<usize>) -> Result<Vec<(usize, usize)>, OracleError> {
    let d = g.bfs(g.index_of(&build_tn(g.n))?);
    if let Some(i) = d.iter().position(|&x| x == u32::MAX) {
        return Err(OracleError::Unreachable(g.keys[i].clone()));
    }
    let ecc = d.iter().copied().max().unwrap_or(0) as usize;
    let top = r_max.unwrap_or(ecc);
    let mut per_layer = vec![0usize; ecc.max(top) + 1];
    for &x in &d {
        per_layer[x as usize] += 1;
    }
    let mut out = Vec::with_capacity(top + 1);
    let mut acc = 0;
    for (r, &c) in per_layer.iter().enumerate().take(top + 1) {
        acc += c;
        out.push((r, acc));
    }
    Ok(out)
}
