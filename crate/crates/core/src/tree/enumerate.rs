use super::{LabeledTree, NodeId, TreeError, MAX_ENUMERATION_COMPLEXITY};

/// `k!!` for odd or even `k`; `(-1)!! = 0!! = 1`.
pub fn double_factorial(k: i64) -> u128 {
    let mut acc: u128 = 1;
    let mut x = k;
    while x > 1 {
        acc *= x as u128;
        x -= 2;
    }
    acc
}

/// `|Tree(n)| = (2n - 1)!!`, and 1 for `n = 0`.
pub fn tree_count(n: usize) -> u128 {
    double_factorial(2 * n as i64 - 1)
}

/// Decodes a mixed-radix index into a tree: digit `i` (radix `2i - 1`)
/// picks the edge above which leaf `i` is inserted. Distinct indices in
/// `0..tree_count(n)` give distinct trees.
pub fn tree_from_index(n: usize, mut index: u128) -> LabeledTree {
    let mut t = LabeledTree::single_leaf();
    for i in 1..=n {
        let radix = (2 * i - 1) as u128;
        let choice = (index % radix) as usize;
        index /= radix;
        t.graft_above(NodeId::from_index(choice), i as u32);
    }
    t
}

/// Every tree of complexity `n`, each exactly once.
pub struct TreeEnumerator {
    n: usize,
    next: u128,
    end: u128,
}

impl Iterator for TreeEnumerator {
    type Item = LabeledTree;

    fn next(&mut self) -> Option<LabeledTree> {
        if self.next >= self.end {
            return None;
        }
        let t = tree_from_index(self.n, self.next);
        self.next += 1;
        Some(t)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for TreeEnumerator {}

pub fn enumerate_trees(n: usize) -> Result<TreeEnumerator, TreeError> {
    if n > MAX_ENUMERATION_COMPLEXITY {
        return Err(TreeError::EnumerationGuard(n));
    }
    Ok(TreeEnumerator { n, next: 0, end: tree_count(n) })
}
