//! Quasipinning analysis for fermionic natural occupation numbers.
//!
//! Modules follow the specification: [`catalog`] holds the embedded
//! generalized-Pauli-constraint tables, [`spectra`] validates spectra and
//! evaluates constraints, [`geometry`] computes facet distances and the
//! Q-parameter, [`lp`] re-derives the tables with an exact rational simplex,
//! [`selection`] handles Slater-determinant selection rules and 1RDMs, and
//! [`truncation`] relates settings of different size.

pub mod catalog;
pub mod geometry;
pub mod lp;
pub mod rational;
pub mod selection;
pub mod spectra;
pub mod truncation;

pub use catalog::{load_setting, ClassBound, ConstraintCatalog, FacetPair, GPConstraint, Setting};
pub use rational::Rational;

/// Default numerical tolerance for validation and membership tests.
pub const DEFAULT_TOL: f64 = 1e-10;
