//! Whitehead-move rewriting on labeled binary trees and trivalent graphs.
//!
//! The crate covers tree representation ([`tree`]), single and
//! simultaneous Whitehead moves ([`rewriting`]), height reduction by
//! balance moves ([`rebalance`]), digit sorting to the canonical tree
//! `T_n` ([`sort`]), marked trivalent graphs ([`graph`]), exact BFS
//! oracles over `Tree(n)` ([`oracle`]) and the staged Lipschitz bound
//! for metric graphs ([`metric`]).

pub mod exec;
pub mod fit;
pub mod graph;
pub mod metric;
pub mod oracle;
pub mod rebalance;
pub mod rewriting;
pub mod sort;
pub mod tree;

pub use exec::Execution;
pub use tree::{parse_tree, EdgeRef, LabeledTree, NodeId, TreeError};
