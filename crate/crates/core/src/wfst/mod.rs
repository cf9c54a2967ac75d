//! Weighted finite-state transducers over the tropical semiring.
//!
//! Graphs are assembled with [`FstBuilder`] and validated into immutable
//! [`Fst`] values by [`FstBuilder::freeze`]; the algorithms ([`compose`],
//! [`shortest_path`], [`trim`]) only accept frozen graphs. Label 0 is epsilon
//! on both tapes.

mod compose;
mod fst;
mod shortest_path;
mod trim;
mod weight;

pub use compose::compose;
pub use fst::{freeze, Arc, Fst, FstBuilder, Label, StateId, TokenSpace, EPSILON};
pub use shortest_path::{shortest_path, Path, PathArc};
pub use trim::trim;
pub use weight::Weight;
