//! Meaningful aggregation on ordinal scales.
//!
//! A scale is an interval of the rationals, normalised to have endpoints 0
//! and 1, on which only the order matters. This crate enumerates the orbits
//! of `E^n` under order automorphisms, works with lattice polynomials in
//! normal form, represents aggregation functions on finite chains as tables,
//! and decides (with replayable counterexamples) whether a table or function
//! is order invariant or has meaningful comparisons.
//!
//! ```
//! use ordagg::{chain::{discrete_representative, Chain}, lattice::LatticePolynomial,
//!              meaningfulness::check_order_invariant, scale::IntervalSpec};
//!
//! let median = LatticePolynomial::median(3).unwrap();
//! let table = discrete_representative(&median, Chain::new(3).unwrap(), IntervalSpec::OPEN).unwrap();
//! assert!(check_order_invariant(&table, IntervalSpec::OPEN).unwrap().is_member());
//! ```

pub mod chain;
pub mod cli;
pub mod document;
pub mod error;
pub mod functions;
pub mod lattice;
pub mod meaningfulness;
pub mod orbits;
pub mod scale;

pub use error::{Error, Result};
