//! Ready-made valuations on `ℚ(x, y, z)` used by tests, the CLI self-test
//! and the Python bindings.

use crate::algebra::{parse_rf, vars_of, UniPoly};
use crate::group::{GroupElement, ValueGroup};
use crate::valuation::ValuationSpec;

/// Monomial valuation with weights `x ↦ 1`, `y ↦ 2π`, `z ↦ 1 + π`.
pub fn weighted_xyz() -> ValuationSpec {
    let g = ValueGroup::default();
    let vars = vars_of(&["x", "y", "z"]);
    let w = ["1", "2*pi", "1 + pi"].iter().map(|s| GroupElement::parse(s, &g).expect("fixed weight")).collect();
    ValuationSpec::monomial(g, vars, w).expect("fixed weights are positive")
}

/// `weighted_xyz` composed with the `(z² − x²y)`-adic order.
pub fn keyed_xyz() -> ValuationSpec {
    let inner = weighted_xyz();
    let key = poly(&inner, "z^2 - x^2*y");
    ValuationSpec::composite(inner, key).expect("monic key")
}

/// `weighted_xyz` augmented by `z² − x²y ↦ 3 + 2π`.
pub fn augmented_key_xyz() -> ValuationSpec {
    let base = weighted_xyz();
    let key = poly(&base, "z^2 - x^2*y");
    let v = base.parse_value("3 + 2*pi").expect("fixed value");
    ValuationSpec::augmented(base, key, v).expect("value exceeds the key's")
}

/// Weights `x ↦ π`, `y ↦ 1`, `z ↦ π` augmented by `z − x ↦ π + 1/2`.
pub fn limit_xyz() -> ValuationSpec {
    let g = ValueGroup::default();
    let vars = vars_of(&["x", "y", "z"]);
    let w = ["pi", "1", "pi"].iter().map(|s| GroupElement::parse(s, &g).expect("fixed weight")).collect();
    let base = ValuationSpec::monomial(g, vars, w).expect("fixed weights are positive");
    let key = poly(&base, "z - x");
    let v = base.parse_value("pi + 1/2").expect("fixed value");
    ValuationSpec::augmented(base, key, v).expect("value exceeds the key's")
}

/// Parse an expression as a polynomial in the spec's distinguished variable.
pub fn poly(spec: &ValuationSpec, s: &str) -> UniPoly {
    let f = parse_rf(s, spec.vars()).expect("fixture expression parses");
    UniPoly::from_rf(&f, spec.x_var()).expect("fixture is polynomial in X")
}
