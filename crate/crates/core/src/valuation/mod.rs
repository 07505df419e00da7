//! Valuations given by monomial weights and key-polynomial towers, and the
//! invariants derived from them.

pub mod fixtures;
mod invariants;
mod json;
mod nondegenerate;
mod residue;
mod spec;

pub use invariants::{EpsilonReport, InitialPart, TruncationReport};
pub use nondegenerate::{minimal_generators, non_degeneracy, NonDegeneracy};
pub use residue::initial_terms;
pub use spec::{SpecKind, ValuationSpec};
