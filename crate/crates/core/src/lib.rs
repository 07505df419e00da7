//! Exact valuation invariants, key-polynomial successors and framed blow-up
//! sequences for monomializing polynomials under a valuation.

pub mod algebra;
pub mod blowup;
pub mod error;
pub mod group;
pub mod lattice;
pub mod orchestrator;
pub mod puiseux;
pub mod successors;
pub mod valuation;

pub use error::{Error, Result};

pub type Rational = num_rational::BigRational;
