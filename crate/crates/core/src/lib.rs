//! Arithmetic subtrees, tree arrays and arithmetic product trees in finite
//! subsets of products of regular trees, together with finite Markov
//! systems on which the associated recurrence functions can be evaluated.

mod bits;
pub mod error;
pub mod formats;
pub mod markov;
pub mod search;
pub mod semigroup;
pub mod sets;

pub use error::{Error, Result};
pub mod structures;
