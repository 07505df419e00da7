//! Exact arithmetic over ℚ: Laurent polynomials, rational functions and
//! univariate polynomials over rational-function coefficients.

mod gcd;
mod multipoly;
mod parse;
mod ratfunc;
mod unipoly;

pub use gcd::{content, gcd};
pub use multipoly::{exp_add, exp_le, exp_sub, grlex, vars_of, Exp, MultiPoly, Vars};
pub use parse::{
    fmt_poly, fmt_poly_by, fmt_rational, fmt_rf, fmt_uni, parse_poly, parse_rational, parse_rf, rf_from_json, rf_to_json,
    uni_from_any, uni_from_json, uni_to_json, var_index,
};
pub use ratfunc::{eval_poly, RationalFunction};
pub use unipoly::UniPoly;
