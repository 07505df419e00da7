//! Ordered value groups: lexicographic tuples of exact real scalars built
//! over `1` and a finite set of independent irrational generators.

mod element;
mod generator;
mod scalar;

pub use element::{min_value, GroupElement};
pub use generator::{GenRef, Generator, GeneratorKind, Interval, Refiner, ValueGroup, MAX_LEVEL};
pub use scalar::Scalar;
