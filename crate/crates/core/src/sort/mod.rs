//! Sorting a tree to the canonical tree `T_n` with simultaneous sort moves.

mod digits;
mod distance;
mod pipeline;
mod plan;

pub use digits::{digit, is_fully_sorted, is_ripe, presorted_level, sortedness, DigitView};
pub use distance::{distance_upper, normalize, Normalization, UpperBound};
pub use pipeline::{build_tn, sort, sort_round_budget, sort_round, SortOutcome, SortRound, SortTraceRow};
pub use plan::{plan_sort_move, SortMovePlan, SortMoveType};

use thiserror::Error;

use crate::rebalance::RebalanceError;
use crate::rewriting::MoveError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SortError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("tree is already fully sorted")]
    AlreadySorted,
    #[error("sort invariant violated: {0}")]
    Invariant(String),
    #[error("sort did not finish within {budget} rounds")]
    BudgetExceeded { budget: i64, trace: Vec<SortTraceRow> },
    #[error("complexities differ: {0} vs {1}")]
    ComplexityMismatch(usize, usize),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Rebalance(#[from] RebalanceError),
}
