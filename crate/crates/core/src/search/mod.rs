//! Deterministic backtracking searches for the structures of
//! [`crate::structures`].
//!
//! Every search returns the canonical-first witness: candidates are tried in
//! shortlex order and child continuations in lexicographic order, with
//! feasibility memoized per `(image, remaining depth)`. Since the subtrees
//! below distinct vertices are independent, greedy choice of the first
//! feasible image at each address yields the lexicographically first map.

mod array;
mod budget;
mod grid;
mod product;
mod tree;

pub use array::{construct_tree_array, select_dense_indices, PipelineOutcome, PipelineStage, StageFailure};
pub use budget::{Outcome, SearchBudget};
pub use grid::{find_ap_grid, GridApWitness};
pub use product::{find_cartesian_product, find_product_tree, product_tree_rooted_at, CartesianProduct, IncrementMode};
pub use tree::{find_arithmetic_subtree, find_regular_embedding};
