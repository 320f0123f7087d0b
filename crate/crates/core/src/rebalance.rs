//! Balance moves and logarithmic height reduction.
//!
//! A balance move at an edge compares the four grandchild subtrees and, if
//! one is strictly the largest, pulls it up one level. A balance round
//! applies the move at every edge of odd height at once; rounds repeat
//! until the height is at most `6 log2(n)`.

use thiserror::Error;

use crate::rewriting::{apply_local, find_conflict, LocalStep, MoveError, SimultaneousMove};
use crate::tree::{edge_stats, EdgeRef, LabeledTree, NodeId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RebalanceError {
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error("height {height} still above threshold after {rounds} rounds (budget {budget})")]
    BudgetExceeded { rounds: usize, budget: usize, height: u32, trace: Vec<HeightRow> },
    #[error("balance invariant violated: {0}")]
    Invariant(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BalanceAction {
    None,
    Step(LocalStep),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BalanceDecision {
    pub edge: EdgeRef,
    pub action: BalanceAction,
}

/// One row of the height-reduction trace; row 0 is the input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeightRow {
    pub round: usize,
    pub height: u32,
    pub steps_fired: usize,
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub tree: LabeledTree,
    pub rounds: usize,
    pub trace: Vec<HeightRow>,
    /// The fired steps of each round, in node form on the tree they
    /// applied to.
    pub moves: Vec<Vec<LocalStep>>,
}

/// `6 log2(n)`, the target height.
pub fn height_threshold(n: usize) -> f64 {
    6.0 * (n as f64).log2()
}

/// `ceil(log_{6/5}(n + 1))`, the round budget of [`reduce_height`].
pub fn round_budget(n: usize) -> usize {
    ((n as f64 + 1.0).ln() / 1.2f64.ln()).ceil() as usize
}

fn decide(t: &LabeledTree, e: NodeId, size: &[u32]) -> Option<LocalStep> {
    let kids = t.children(e)?;
    let mut best: Option<(u32, NodeId, NodeId)> = None;
    let mut tied = false;
    for c in kids {
        let Some(grand) = t.children(c) else { continue };
        for g in grand {
            let s = size[g.index()];
            match best {
                Some((b, _, _)) if s < b => {}
                Some((b, _, _)) if s == b => tied = true,
                _ => {
                    best = Some((s, c, g));
                    tied = false;
                }
            }
        }
    }
    // A leaf child contributes two empty grandchildren, which tie only
    // when every grandchild is empty.
    let (_, c, g) = best.filter(|_| !tied)?;
    Some(LocalStep { edge: c, pulled: g })
}

pub fn balance_move(t: &LabeledTree, e: EdgeRef) -> Result<BalanceDecision, MoveError> {
    let node = t.resolve(e).ok_or(MoveError::StaleEdge)?;
    let stats = edge_stats(t);
    let size: Vec<u32> = stats.as_slice().iter().map(|s| s.size).collect();
    let action = decide(t, node, &size).map_or(BalanceAction::None, BalanceAction::Step);
    Ok(BalanceDecision { edge: e, action })
}

/// Steps fired by one balance round, in node form.
pub fn balance_steps(t: &LabeledTree) -> Result<Vec<LocalStep>, RebalanceError> {
    let stats = edge_stats(t);
    let size: Vec<u32> = stats.as_slice().iter().map(|s| s.size).collect();
    let steps: Vec<LocalStep> = t
        .node_ids()
        .filter(|&id| stats[id].height % 2 == 1)
        .filter_map(|id| decide(t, id, &size))
        .collect();
    let edges: Vec<NodeId> = steps.iter().map(|s| s.edge).collect();
    if let Some((a, b)) = find_conflict(t, &edges) {
        return Err(RebalanceError::Invariant(format!(
            "balance steps at '{}' and '{}' share a vertex",
            t.address_of(a),
            t.address_of(b)
        )));
    }
    Ok(steps)
}

/// Applies balance moves at every odd-height edge as one simultaneous move.
/// The returned move is expressed against the input tree.
pub fn balance_round(t: &LabeledTree) -> Result<(LabeledTree, SimultaneousMove), RebalanceError> {
    let steps = balance_steps(t)?;
    let min = t.min_labels();
    let public = SimultaneousMove {
        steps: steps.iter().map(|&s| crate::rewriting::globalize(t, s, &min)).collect(),
    };
    let mut out = t.clone();
    apply_local(&mut out, &steps);
    Ok((out, public))
}

/// Balance rounds until the height is at most `6 log2(n)`. Each round is
/// checked for the per-edge contraction `h' <= ceil(5h/6)` on edges above
/// the threshold; the round budget is `ceil(log_{6/5}(n + 1))`.
pub fn reduce_height(t: &LabeledTree) -> Result<Reduction, RebalanceError> {
    let n = t.complexity();
    let mut tree = t.clone();
    let mut heights = tree.heights();
    let mut height = heights.iter().copied().max().unwrap_or(1);
    let mut trace = vec![HeightRow { round: 0, height, steps_fired: 0 }];
    let mut moves = Vec::new();
    if n <= 1 {
        return Ok(Reduction { tree, rounds: 0, trace, moves });
    }
    let threshold = height_threshold(n);
    let budget = round_budget(n);
    let mut rounds = 0;
    while height as f64 > threshold {
        if rounds == budget {
            return Err(RebalanceError::BudgetExceeded { rounds, budget, height, trace });
        }
        let steps = balance_steps(&tree)?;
        apply_local(&mut tree, &steps);
        rounds += 1;
        let after = tree.heights();
        for (id, (&h0, &h1)) in heights.iter().zip(&after).enumerate() {
            if h0 as f64 > threshold && h1 > (5 * h0).div_ceil(6) {
                return Err(RebalanceError::Invariant(format!(
                    "round {rounds}: edge {} went from height {h0} to {h1}",
                    tree.address_of(NodeId::from_index(id))
                )));
            }
        }
        heights = after;
        height = heights.iter().copied().max().unwrap_or(1);
        trace.push(HeightRow { round: rounds, height, steps_fired: steps.len() });
        moves.push(steps);
    }
    Ok(Reduction { tree, rounds, trace, moves })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{caterpillar, parse_tree, random_tree};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tree(s: &str) -> LabeledTree {
        parse_tree(s).unwrap()
    }

    #[test]
    fn balance_move_fixtures() {
        let t = tree("(((0,1),2),3)");
        let d = balance_move(&t, t.root_edge()).unwrap();
        let BalanceAction::Step(s) = d.action else { panic!("expected a step") };
        let mut u = t.clone();
        apply_local(&mut u, &[s]);
        assert_eq!(u, tree("((0,1),(2,3))"));
        assert_eq!(u.height(), 3);

        let t = tree("((0,1),(2,3))");
        assert_eq!(balance_move(&t, t.root_edge()).unwrap().action, BalanceAction::None);
        let t7 = tree("(((0,1),(2,3)),((4,5),(6,7)))");
        for id in t7.node_ids() {
            assert_eq!(balance_move(&t7, t7.edge(id)).unwrap().action, BalanceAction::None);
        }
    }

    #[test]
    fn balance_round_fixtures() {
        let (u, m) = balance_round(&tree("(((0,1),2),3)")).unwrap();
        assert_eq!(m.steps.len(), 1);
        assert_eq!(u, tree("((0,1),(2,3))"));
        let t7 = tree("(((0,1),(2,3)),((4,5),(6,7)))");
        let (u, m) = balance_round(&t7).unwrap();
        assert!(m.steps.is_empty());
        assert_eq!(u, t7);
        let c = caterpillar(20);
        let (u, m) = balance_round(&c).unwrap();
        assert!(!m.steps.is_empty());
        assert!(u.height() <= c.height());
    }

    #[test]
    fn reduce_height_fixtures() {
        let r = reduce_height(&tree("(((0,1),2),3)")).unwrap();
        assert_eq!(r.rounds, 0);
        let t15 = crate::sort::build_tn(15);
        assert_eq!(reduce_height(&t15).unwrap().rounds, 0);
        let r = reduce_height(&caterpillar(64)).unwrap();
        assert_eq!(round_budget(64), 23);
        assert!(r.rounds <= 23);
        assert!(r.tree.height() <= 36);
        assert_eq!(r.trace.last().unwrap().height, r.tree.height());
    }

    #[test]
    fn deep_caterpillar() {
        let n = 1 << 14;
        let r = reduce_height(&caterpillar(n)).unwrap();
        assert!(r.tree.height() as f64 <= height_threshold(n));
        assert!(r.rounds <= round_budget(n));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn reduce_height_meets_bounds(exp in 1u32..13, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range((1usize << (exp - 1))..=(1usize << exp));
            let t = random_tree(n, &mut rng);
            let r = reduce_height(&t).unwrap();
            r.tree.validate().unwrap();
            prop_assert_eq!(r.tree.complexity(), n);
            if n >= 2 {
                prop_assert!(r.tree.height() as f64 <= height_threshold(n));
            }
            prop_assert!(r.rounds <= round_budget(n));
        }
    }

    use rand::Rng;
}
