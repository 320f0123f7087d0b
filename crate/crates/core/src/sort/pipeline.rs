use crate::rebalance::height_threshold;
use crate::rewriting::{apply_local, is_disjoint, LocalStep, MoveScript};
use crate::tree::{digit_count, LabeledTree, NodeId, TreeBuilder};

use super::digits::DigitView;
use super::plan::{plan_with, SortMovePlan};
use super::SortError;

/// The fully-sorted tree: a full tree on `0..2^m` beside `T_{n - 2^m}`
/// shifted by `2^m`, where `2^m <= n < 2^(m+1)`.
pub fn build_tn(n: usize) -> LabeledTree {
    fn build(b: &mut TreeBuilder, n: usize, offset: u32) -> NodeId {
        if n == 0 {
            return b.leaf(offset);
        }
        let m = usize::BITS - 1 - n.leading_zeros();
        let half = 1usize << m;
        let left = build(b, half - 1, offset);
        let right = build(b, n - half, offset + half as u32);
        b.join(left, right)
    }
    let mut b = TreeBuilder::with_capacity(2 * n + 1);
    let top = build(&mut b, n, 0);
    b.finish(top).expect("T_n is valid")
}

/// `(h - 3) + d + 2`: the sort round budget for an input of height `h`.
pub fn sort_round_budget(height: u32, n: usize) -> i64 {
    height as i64 - 3 + digit_count(n) as i64 + 2
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortRound {
    /// Pre-sorted ripe edges the round acts on.
    pub selected: Vec<NodeId>,
    pub plans: Vec<SortMovePlan>,
    /// Steps of phases 1 to 3, each applied as one simultaneous move.
    pub phases: [Vec<LocalStep>; 3],
    /// Edges whose children were ripe before the round but which are not
    /// ripe after it.
    pub unripe: Vec<NodeId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SortTraceRow {
    pub round: usize,
    pub phase: u8,
    pub steps: usize,
    /// Largest sortedness among edges above their `T_n` level.
    pub max_unsorted_level: u32,
    pub height: u32,
}

#[derive(Clone, Debug)]
pub struct SortOutcome {
    pub tree: LabeledTree,
    pub rounds: usize,
    pub budget: i64,
    pub trace: Vec<SortTraceRow>,
    /// Nonempty simultaneous moves in application order, in node form.
    pub moves: Vec<Vec<LocalStep>>,
    /// Ripeness propagation failures as `(round, edge address)`.
    pub ripeness_violations: Vec<(usize, String)>,
}

impl SortOutcome {
    /// Number of nonempty simultaneous Whitehead moves used.
    pub fn sim_moves(&self) -> usize {
        self.moves.len()
    }

    pub fn script(&self, input: &LabeledTree) -> MoveScript {
        let mut s = MoveScript::default();
        let mut cur = input.clone();
        for m in &self.moves {
            s.push_local(&cur, m);
            apply_local(&mut cur, m);
        }
        s
    }
}

/// Runs one round in place. Phase disjointness and the strict decrease of
/// the sortedness profile are enforced; edges that lose ripeness although
/// their children were ripe are reported in [`SortRound::unripe`].
fn round_in_place(
    tree: &mut LabeledTree,
    view: &DigitView,
    round: usize,
    trace: &mut Vec<SortTraceRow>,
    moves: &mut Vec<Vec<LocalStep>>,
) -> Result<(SortRound, DigitView), SortError> {
    if view.is_fully_sorted() {
        return Err(SortError::AlreadySorted);
    }
    let selected = view.selected();
    if selected.is_empty() {
        return Err(SortError::Invariant(format!(
            "no ripe pre-sorted edge in unsorted tree {}",
            tree.canonical()
        )));
    }
    let min = tree.min_labels();
    let plans = selected
        .iter()
        .map(|&e| plan_with(tree, view, &min, e, view.presorted[e.index()]))
        .collect::<Result<Vec<_>, _>>()?;
    let mut phases: [Vec<LocalStep>; 3] = Default::default();
    for p in &plans {
        for (j, s) in p.steps.iter().enumerate() {
            phases[j].push(*s);
        }
    }
    let ripe_children: Vec<bool> = tree
        .node_ids()
        .map(|id| match tree.children(id) {
            Some([a, b]) => view.ripe[a.index()] && view.ripe[b.index()],
            None => false,
        })
        .collect();

    let mut scratch = Vec::new();
    let mut after = None;
    for (j, steps) in phases.iter().enumerate() {
        for s in steps {
            if !tree.is_interior(s.edge) || tree.parent(s.pulled) != Some(s.edge) {
                return Err(SortError::Invariant(format!("round {round} phase {}: invalid step", j + 1)));
            }
        }
        let edges: Vec<NodeId> = steps.iter().map(|s| s.edge).collect();
        if !is_disjoint(tree, &edges, &mut scratch) {
            return Err(SortError::Invariant(format!(
                "round {round} phase {}: steps share a vertex",
                j + 1
            )));
        }
        apply_local(tree, steps);
        if !steps.is_empty() {
            moves.push(steps.clone());
        }
        let v = DigitView::new(tree);
        trace.push(SortTraceRow {
            round,
            phase: j as u8 + 1,
            steps: steps.len(),
            max_unsorted_level: v.max_unsorted_level(),
            height: tree.height(),
        });
        after = Some(v);
    }
    let after = after.expect("three phases ran");

    let unripe: Vec<NodeId> = ripe_children
        .iter()
        .enumerate()
        .filter(|&(i, &had)| had && !after.ripe[i])
        .map(|(i, _)| NodeId::from_index(i))
        .collect();
    if after.profile() >= view.profile() {
        return Err(SortError::Invariant(format!(
            "round {round}: sortedness profile did not decrease"
        )));
    }
    Ok((SortRound { selected, plans, phases, unripe }, after))
}

/// One simultaneous sort move.
pub fn sort_round(t: &LabeledTree) -> Result<(LabeledTree, SortRound), SortError> {
    let mut tree = t.clone();
    let view = DigitView::new(&tree);
    let (round, _) = round_in_place(&mut tree, &view, 1, &mut Vec::new(), &mut Vec::new())?;
    Ok((tree, round))
}

/// Sorts `t` to `T_n`. Inputs with `n >= 2` must have height at most
/// `6 log2(n)`; the number of rounds may not exceed `(h - 3) + d + 2`.
pub fn sort(t: &LabeledTree) -> Result<SortOutcome, SortError> {
    let n = t.complexity();
    let mut tree = t.clone();
    let height = tree.height();
    let budget = sort_round_budget(height, n);
    let mut outcome = SortOutcome { tree: tree.clone(), rounds: 0, budget, trace: Vec::new(), moves: Vec::new(), ripeness_violations: Vec::new() };
    if n <= 1 {
        return Ok(outcome);
    }
    if height as f64 > height_threshold(n) {
        return Err(SortError::Precondition(format!(
            "height {height} exceeds 6 log2({n}); reduce the height first"
        )));
    }
    let mut view = DigitView::new(&tree);
    let mut rounds = 0usize;
    while !view.is_fully_sorted() {
        if rounds as i64 >= budget {
            return Err(SortError::BudgetExceeded { budget, trace: outcome.trace });
        }
        rounds += 1;
        let (r, next) = round_in_place(&mut tree, &view, rounds, &mut outcome.trace, &mut outcome.moves)?;
        let min = tree.min_labels();
        outcome
            .ripeness_violations
            .extend(r.unripe.iter().map(|&e| (rounds, tree.address_with(e, &min))));
        view = next;
    }
    if tree != build_tn(n) {
        return Err(SortError::Invariant("fully-sorted result differs from T_n".into()));
    }
    outcome.tree = tree;
    outcome.rounds = rounds;
    Ok(outcome)
}
