use super::{LabeledTree, NodeId};

/// Number of binary digits of `x` (0 for 0).
pub fn digits_needed(x: u64) -> u32 {
    u64::BITS - x.leading_zeros()
}

/// `d` for a tree of complexity `n`: the digit count of `n`, and 1 when
/// `n <= 1`.
pub fn digit_count(n: usize) -> u32 {
    digits_needed(n as u64).max(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeStat {
    /// Number of edges of `T_e`, counting `e` itself.
    pub size: u32,
    /// The root edge has height 1.
    pub height: u32,
    /// Number of ends of `T_e`.
    pub ends: u32,
    /// Binary digit count of `ends`.
    pub digits: u32,
    /// Smallest `k >= 1` with `ends <= 2^k`; the level at which `T_e` is
    /// sorted in `T_n`.
    pub level: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeStats {
    stats: Vec<EdgeStat>,
    pub height: u32,
}

impl EdgeStats {
    pub fn get(&self, id: NodeId) -> EdgeStat {
        self.stats[id.index()]
    }

    pub fn as_slice(&self) -> &[EdgeStat] {
        &self.stats
    }
}

impl std::ops::Index<NodeId> for EdgeStats {
    type Output = EdgeStat;

    fn index(&self, id: NodeId) -> &EdgeStat {
        &self.stats[id.index()]
    }
}

/// Computes size, height and end counts for every edge in two linear
/// passes.
pub fn edge_stats(t: &LabeledTree) -> EdgeStats {
    let mut stats = vec![EdgeStat { size: 0, height: 0, ends: 0, digits: 0, level: 0 }; t.node_count()];
    let heights = t.heights();
    for id in t.postorder() {
        let (size, ends) = match t.children(id) {
            None => (1, 1),
            Some([a, b]) => {
                let (sa, sb) = (stats[a.index()], stats[b.index()]);
                (sa.size + sb.size + 1, sa.ends + sb.ends)
            }
        };
        stats[id.index()] = EdgeStat {
            size,
            height: heights[id.index()],
            ends,
            digits: digits_needed(ends as u64),
            level: digits_needed(ends as u64 - 1).max(1),
        };
    }
    let height = heights.iter().copied().max().unwrap_or(1);
    EdgeStats { stats, height }
}
