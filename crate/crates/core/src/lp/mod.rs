//! Exact rational linear programming and the class/prefactor derivation.

mod derive;
mod simplex;

pub use derive::*;
pub use simplex::*;
