//! Sortedness, pre-sortedness and ripeness in closed form.
//!
//! For an internal edge `e`, let `m = hb(e)` be the highest digit (from the
//! right, 1-based) in which two labels of `T_e` differ. Digits above `m`
//! agree, so `e` is `k`-sorted for every `k > m`, never for `k < m`, and
//! at `k = m` exactly when both children are pure at digit `m`, that is
//! `hb(child) < m`. Leaves are 1-sorted.

use crate::tree::{digit_count, edge_stats, EdgeRef, LabeledTree, NodeId};

/// Per-edge digit data for one tree state, indexed by node.
#[derive(Clone, Debug)]
pub struct DigitView {
    /// Digit count of the complexity (at least 1).
    pub d: u32,
    /// Highest differing digit of the labels below each edge; 0 for ends.
    pub hb: Vec<u32>,
    /// Minimal `k` with the edge `k`-sorted.
    pub sortedness: Vec<u32>,
    /// The level `k` at which the edge is `k`-pre-sorted, or 0.
    pub presorted: Vec<u32>,
    /// Whether `T_e` is ripe.
    pub ripe: Vec<bool>,
    /// Sortedness level each edge has in `T_n`: `ceil(log2 n_e)`, at least 1.
    pub level: Vec<u32>,
}

/// `k`-th binary digit of `label`, counting from 1 at the right.
pub fn digit(label: u32, k: u32) -> u32 {
    if k == 0 || k > 32 {
        return 0;
    }
    (label >> (k - 1)) & 1
}

fn top_bit(x: u32) -> u32 {
    u32::BITS - x.leading_zeros()
}

impl DigitView {
    pub fn new(t: &LabeledTree) -> Self {
        let len = t.node_count();
        let mut min = vec![0u32; len];
        let mut max = vec![0u32; len];
        let mut hb = vec![0u32; len];
        let mut sortedness = vec![1u32; len];
        let mut presorted = vec![0u32; len];
        let mut ripe = vec![true; len];
        let stats = edge_stats(t);
        let level = stats.as_slice().iter().map(|s| s.level).collect();
        for id in t.postorder() {
            let i = id.index();
            match t.children(id) {
                None => {
                    let l = t.label(id).expect("leaf");
                    min[i] = l;
                    max[i] = l;
                }
                Some([a, b]) => {
                    let (a, b) = (a.index(), b.index());
                    min[i] = min[a].min(min[b]);
                    max[i] = max[a].max(max[b]);
                    let m = top_bit(min[i] ^ max[i]);
                    hb[i] = m;
                    let pure = hb[a] < m && hb[b] < m;
                    sortedness[i] = if pure { m } else { m + 1 };
                    if !pure && sortedness[a] <= m && sortedness[b] <= m {
                        presorted[i] = m;
                    }
                    let s = sortedness[i];
                    let child_ok = |c: usize| {
                        t.is_leaf(NodeId::from_index(c))
                            || sortedness[c] < s
                            || presorted[c] + 1 == s
                    };
                    ripe[i] = ripe[a] && ripe[b] && child_ok(a) && child_ok(b);
                }
            }
        }
        DigitView { d: digit_count(t.complexity()), hb, sortedness, presorted, ripe, level }
    }

    pub fn is_fully_sorted(&self) -> bool {
        self.sortedness.iter().zip(&self.level).all(|(s, l)| s <= l)
    }

    pub fn presorted_level(&self, id: NodeId) -> Option<u32> {
        let k = self.presorted[id.index()];
        (k > 0).then_some(k)
    }

    /// Edges that are pre-sorted and ripe.
    pub fn selected(&self) -> Vec<NodeId> {
        (0..self.presorted.len())
            .filter(|&i| self.presorted[i] > 0 && self.ripe[i])
            .map(NodeId::from_index)
            .collect()
    }

    /// Largest sortedness among edges not yet at their `T_n` level, or 0.
    pub fn max_unsorted_level(&self) -> u32 {
        self.sortedness
            .iter()
            .zip(&self.level)
            .filter(|(s, l)| s > l)
            .map(|(s, _)| *s)
            .max()
            .unwrap_or(0)
    }

    /// All sortedness values in decreasing order; a sort round must make
    /// this vector lexicographically smaller.
    pub fn profile(&self) -> Vec<u32> {
        let mut v = self.sortedness.clone();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }
}

pub fn sortedness(t: &LabeledTree, e: EdgeRef) -> Option<u32> {
    let id = t.resolve(e)?;
    Some(DigitView::new(t).sortedness[id.index()])
}

pub fn is_fully_sorted(t: &LabeledTree) -> bool {
    DigitView::new(t).is_fully_sorted()
}

pub fn presorted_level(t: &LabeledTree, e: EdgeRef) -> Option<u32> {
    let id = t.resolve(e)?;
    DigitView::new(t).presorted_level(id)
}

pub fn is_ripe(t: &LabeledTree, e: EdgeRef) -> Option<bool> {
    let id = t.resolve(e)?;
    Some(DigitView::new(t).ripe[id.index()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sort::build_tn;
    use crate::tree::{enumerate_trees, parse_tree, random_tree};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Sortedness straight from the definition: the least `k` in `1..=d+1`
    /// such that digits above `k` agree and either digit `k` agrees or one
    /// child holds exactly the 0-digit labels.
    fn brute_sorted(t: &LabeledTree, e: NodeId, k: u32, d: u32) -> bool {
        if k > d {
            return true;
        }
        let labels = t.labels_below(e);
        let high = |l: u32| (k + 1..=d).map(|j| digit(l, j)).collect::<Vec<_>>();
        if labels.iter().any(|&l| high(l) != high(labels[0])) {
            return false;
        }
        if labels.iter().all(|&l| digit(l, k) == digit(labels[0], k)) {
            return true;
        }
        let Some(kids) = t.children(e) else { return false };
        kids.iter().any(|&c| {
            let below = t.labels_below(c);
            let zeros = labels.iter().filter(|&&l| digit(l, k) == 0).count();
            below.len() == zeros && below.iter().all(|&l| digit(l, k) == 0)
        })
    }

    fn brute_sortedness(t: &LabeledTree, e: NodeId, d: u32) -> u32 {
        (1..=d + 1).find(|&k| brute_sorted(t, e, k, d)).unwrap()
    }

    fn brute_presorted(t: &LabeledTree, e: NodeId, d: u32) -> Option<u32> {
        let kids = t.children(e)?;
        (1..=d + 1).find(|&k| {
            let labels = t.labels_below(e);
            let high = |l: u32| (k + 1..=d).map(|j| digit(l, j)).collect::<Vec<_>>();
            kids.iter().all(|&c| brute_sorted(t, c, k, d))
                && labels.iter().all(|&l| high(l) == high(labels[0]))
                && !brute_sorted(t, e, k, d)
        })
    }

    #[test]
    fn closed_form_matches_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut trees: Vec<LabeledTree> = (0..=5).flat_map(|n| enumerate_trees(n).unwrap()).collect();
        trees.extend((0..300).map(|_| {
            let n = rng.gen_range(6..40);
            random_tree(n, &mut rng)
        }));
        for t in &trees {
            let v = DigitView::new(t);
            for id in t.node_ids() {
                assert_eq!(v.sortedness[id.index()], brute_sortedness(t, id, v.d), "{t} at {}", t.address_of(id));
                assert_eq!(v.presorted_level(id), brute_presorted(t, id, v.d), "{t} at {}", t.address_of(id));
            }
        }
    }

    #[test]
    fn fixtures() {
        let t = parse_tree("((0,2),1)").unwrap();
        assert_eq!(sortedness(&t, t.root_edge()), Some(3));
        assert!(!is_fully_sorted(&t));
        let leaf = t.leaf_of_label(1).unwrap();
        assert_eq!(sortedness(&t, t.edge(leaf)), Some(1));

        let t = parse_tree("((0,2),(1,3))").unwrap();
        assert_eq!(presorted_level(&t, t.root_edge()), Some(2));
        assert!(is_fully_sorted(&parse_tree("0").unwrap()));

        let t5 = build_tn(5);
        let v = DigitView::new(&t5);
        let stats = edge_stats(&t5);
        for id in t5.node_ids() {
            assert_eq!(v.sortedness[id.index()], stats[id].level);
            assert_eq!(v.presorted_level(id), None);
            assert!(v.ripe[id.index()]);
        }
    }

    #[test]
    fn tn_is_fully_sorted_and_ripe() {
        for n in 0..=64 {
            let v = DigitView::new(&build_tn(n));
            assert!(v.is_fully_sorted(), "T_{n}");
            assert!(v.ripe.iter().all(|&r| r), "T_{n}");
        }
    }

    #[test]
    fn unripe_presorted_fixture_exists() {
        // Exhaustive scan for a pre-sorted edge excluded from the selection.
        let found = (2..=6).flat_map(|n| enumerate_trees(n).unwrap()).find_map(|t| {
            let v = DigitView::new(&t);
            t.node_ids()
                .find(|&id| v.presorted[id.index()] > 0 && !v.ripe[id.index()])
                .map(|id| (t.canonical(), t.address_of(id)))
        });
        let (tree, addr) = found.expect("some pre-sorted edge is not ripe");
        let t = parse_tree(&tree).unwrap();
        let e = t.edge(t.resolve_address(&addr).unwrap());
        assert!(presorted_level(&t, e).is_some());
        assert_eq!(is_ripe(&t, e), Some(false));
    }
}
