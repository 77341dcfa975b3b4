//! Exact Z2 calculator for Chekanov–Eliashberg DGAs of Legendrian knots.

pub mod abbrev;
pub mod algebra;
pub mod dga;
pub mod error;
pub mod holonomy;
pub mod knots;
pub mod obstruction;
pub mod schema;
pub mod verify;

pub use algebra::{AlgebraMap, Gen, Poly, Word};
pub use dga::{Dga, Generator};
pub use error::{Error, Result};
