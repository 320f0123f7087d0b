use crate::rewriting::LocalStep;
use crate::tree::{EdgeRef, LabeledTree, NodeId};

use super::digits::{digit, DigitView};
use super::SortError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SortMoveType {
    /// Both children are split at digit `k`: three steps.
    One,
    /// The first child (canonical order) is pure, the second split.
    Two,
    /// The first child is split, the second pure.
    Three,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortMovePlan {
    pub edge: NodeId,
    pub level: u32,
    pub kind: SortMoveType,
    /// Steps to run in phases 1, 2, 3; type 2 and 3 plans have one step.
    pub steps: Vec<LocalStep>,
}

/// Digit `k` shared by every label below `c`, which must be pure at `k`.
fn block_digit(c: NodeId, k: u32, min: &[u32]) -> u32 {
    digit(min[c.index()], k)
}

/// Plans the sort move at an edge pre-sorted at level `k`.
pub fn plan_sort_move(t: &LabeledTree, e: EdgeRef, k: u32) -> Result<SortMovePlan, SortError> {
    let edge = t.resolve(e).ok_or(SortError::Precondition("stale edge reference".into()))?;
    let view = DigitView::new(t);
    let min = t.min_labels();
    plan_with(t, &view, &min, edge, k)
}

pub(crate) fn plan_with(
    t: &LabeledTree,
    view: &DigitView,
    min: &[u32],
    edge: NodeId,
    k: u32,
) -> Result<SortMovePlan, SortError> {
    if view.presorted_level(edge) != Some(k) {
        return Err(SortError::Precondition(format!(
            "edge '{}' is not {k}-pre-sorted",
            t.address_of(edge)
        )));
    }
    let [first, second] = t.canonical_children(edge, min).expect("pre-sorted edges are internal");
    let pure = |c: NodeId| view.hb[c.index()] < k;
    // The child of a split node holding the labels with digit `want`.
    let block = |c: NodeId, want: u32| -> NodeId {
        let [x, y] = t.children(c).expect("split child is internal");
        if block_digit(x, k, min) == want {
            x
        } else {
            y
        }
    };
    let (kind, steps) = match (pure(first), pure(second)) {
        (true, false) => {
            let other = 1 - block_digit(first, k, min);
            (SortMoveType::Two, vec![LocalStep { edge: second, pulled: block(second, other) }])
        }
        (false, true) => {
            let other = 1 - block_digit(second, k, min);
            (SortMoveType::Three, vec![LocalStep { edge: first, pulled: block(first, other) }])
        }
        (false, false) => {
            // L = (A, B), R = (C, D) with A, C the 0-blocks. Pull B to the
            // top, then D next to it, then lift (A, C): ((A,C),(B,D)).
            let (l, r) = (first, second);
            let b = block(l, 1);
            let d = block(r, 1);
            let steps = vec![
                LocalStep { edge: l, pulled: b },
                LocalStep { edge: r, pulled: d },
                LocalStep { edge: l, pulled: r },
            ];
            (SortMoveType::One, steps)
        }
        (true, true) => {
            return Err(SortError::Invariant(format!(
                "pre-sorted edge '{}' has two pure children",
                t.address_of(edge)
            )))
        }
    };
    Ok(SortMovePlan { edge, level: k, kind, steps })
}
