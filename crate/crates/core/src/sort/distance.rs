use crate::rebalance::{reduce_height, Reduction};
use crate::rewriting::{apply_local, LocalStep, MoveScript};
use crate::tree::LabeledTree;

use super::pipeline::{sort, SortOutcome};
use super::SortError;

/// Height reduction followed by sorting, with every simultaneous move
/// kept in node form against the input's node ids.
#[derive(Clone, Debug)]
pub struct Normalization {
    pub reduction: Reduction,
    pub sorting: SortOutcome,
}

impl Normalization {
    /// All nonempty simultaneous moves from the input to `T_n`.
    pub fn moves(&self) -> impl Iterator<Item = &Vec<LocalStep>> {
        self.reduction
            .moves
            .iter()
            .filter(|m| !m.is_empty())
            .chain(self.sorting.moves.iter())
    }

    pub fn sim_moves(&self) -> usize {
        self.moves().count()
    }

    /// Script taking the input to `T_n`.
    pub fn script(&self, input: &LabeledTree) -> MoveScript {
        let mut s = MoveScript::default();
        let mut cur = input.clone();
        for m in self.moves() {
            s.push_local(&cur, m);
            apply_local(&mut cur, m);
        }
        s
    }

    /// Script taking `T_n` back to the input.
    pub fn inverse_script(&self, input: &LabeledTree) -> MoveScript {
        let mut cur = input.clone();
        let mut inverses = Vec::new();
        for m in self.moves() {
            inverses.push(m.iter().map(|s| s.inverse(&cur)).collect::<Vec<_>>());
            apply_local(&mut cur, m);
        }
        let mut s = MoveScript::default();
        for m in inverses.iter().rev() {
            s.push_local(&cur, m);
            apply_local(&mut cur, m);
        }
        s
    }
}

pub fn normalize(t: &LabeledTree) -> Result<Normalization, SortError> {
    let reduction = reduce_height(t)?;
    let sorting = sort(&reduction.tree)?;
    Ok(Normalization { reduction, sorting })
}

#[derive(Clone, Debug)]
pub struct UpperBound {
    pub bound: usize,
    /// Replays `t1` to `t2` through `T_n`.
    pub script: MoveScript,
}

/// Constructive `d_S` upper bound through `T_n` (zero for equal trees):
/// `3 (sort rounds of t1 + t2) + reduce rounds of t1 + t2`.
pub fn distance_upper(t1: &LabeledTree, t2: &LabeledTree) -> Result<UpperBound, SortError> {
    if t1.complexity() != t2.complexity() {
        return Err(SortError::ComplexityMismatch(t1.complexity(), t2.complexity()));
    }
    if t1 == t2 {
        return Ok(UpperBound { bound: 0, script: MoveScript::default() });
    }
    let a = normalize(t1)?;
    let b = normalize(t2)?;
    let bound = 3 * (a.sorting.rounds + b.sorting.rounds) + a.reduction.rounds + b.reduction.rounds;
    let mut script = a.script(t1);
    script.extend(b.inverse_script(t2));
    Ok(UpperBound { bound, script })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sort::build_tn;
    use crate::tree::{parse_tree, random_tree};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fixtures() {
        let t = build_tn(6);
        let u = distance_upper(&t, &t).unwrap();
        assert_eq!(u.bound, 0);
        assert!(u.script.is_empty());

        let a = parse_tree("((0,1),2)").unwrap();
        let b = parse_tree("((0,2),1)").unwrap();
        let u = distance_upper(&a, &b).unwrap();
        assert!(u.bound >= 1);
        assert_eq!(u.script.replay(&a).unwrap(), b);
        assert!(distance_upper(&a, &build_tn(3)).is_err());
    }

    #[test]
    fn scripts_replay_between_random_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [3usize, 10, 50, 200] {
            let a = random_tree(n, &mut rng);
            let b = random_tree(n, &mut rng);
            let u = distance_upper(&a, &b).unwrap();
            assert_eq!(u.script.replay(&a).unwrap(), b);
            assert!(u.script.len() <= u.bound);
        }
    }
}
