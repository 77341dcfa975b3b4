//! The free noncommutative unital algebra over Z2 on named generators.

mod gen;
mod map;
mod poly;
mod text;

pub use gen::{validate_prefix, Gen, NAMESPACE_SEP};
pub use map::AlgebraMap;
pub use poly::{Poly, Word};
