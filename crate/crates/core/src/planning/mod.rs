//! Exact and optimistic planning.

mod flat;
mod optimistic;
mod smdp;

pub use flat::{flat_backward_induction, flat_evi, flat_policy_value, FlatPolicy, FlatSolution};
pub use optimistic::optimistic_row;
pub use smdp::{exact_backward_induction, extended_value_iteration, OptimisticSolution};
