use rand::Rng;

use super::{LabeledTree, NodeId, TreeBuilder};

/// Uniform sample from `Tree(n)`: leaf `i` is inserted above an edge chosen
/// uniformly among the `2i - 1` edges present.
pub fn random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> LabeledTree {
    let mut t = LabeledTree::single_leaf();
    for i in 1..=n {
        let choice = rng.gen_range(0..2 * i - 1);
        t.graft_above(NodeId::from_index(choice), i as u32);
    }
    t
}

/// The maximally unbalanced tree `(((0,1),2),...,n)` of height `n + 1`.
pub fn caterpillar(n: usize) -> LabeledTree {
    let mut b = TreeBuilder::with_capacity(2 * n + 1);
    let mut top = b.leaf(0);
    for i in 1..=n {
        let leaf = b.leaf(i as u32);
        top = b.join(top, leaf);
    }
    b.finish(top).expect("caterpillar is valid")
}
