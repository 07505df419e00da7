use std::cmp::Ordering;

use super::spec::{monomial_value, ValuationSpec};
use crate::algebra::{exp_le, Exp, MultiPoly};
use crate::error::Result;
use crate::group::{min_value, GroupElement};

/// Minimal elements of a set of exponent vectors under `⪯`, duplicates
/// removed, in their original relative order.
pub fn minimal_generators(exps: &[Exp]) -> Vec<Exp> {
    let mut out: Vec<Exp> = Vec::new();
    for (i, e) in exps.iter().enumerate() {
        if out.contains(e) {
            continue;
        }
        let dominated = exps.iter().enumerate().any(|(k, f)| k != i && f != e && exp_le(f, e));
        if !dominated {
            out.push(e.clone());
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct NonDegeneracy {
    pub holds: bool,
    /// Value under the monomial valuation with the given weights.
    pub monomial_value: GroupElement,
    pub true_value: GroupElement,
    /// Generators of the monomial ideal spanned by the support, when
    /// `holds`.
    pub witness: Option<Vec<Exp>>,
}

/// Compare the monomial value of `f` under `weights` with a known value.
pub fn non_degeneracy(weights: &[GroupElement], f: &MultiPoly, true_value: GroupElement) -> Result<NonDegeneracy> {
    let rank = weights.first().and_then(|w| w.rank()).unwrap_or(1);
    let vals = f.terms().map(|(e, _)| monomial_value(weights, e, rank)).collect::<Result<Vec<_>>>()?;
    let mv = min_value(&vals)?;
    let holds = mv.compare(&true_value)? == Ordering::Equal;
    let witness = holds.then(|| minimal_generators(&f.terms().map(|(e, _)| e.clone()).collect::<Vec<_>>()));
    Ok(NonDegeneracy { holds, monomial_value: mv, true_value, witness })
}

impl ValuationSpec {
    /// Non-degeneracy of a polynomial in this spec's variables with respect
    /// to the monomial valuation with `weights`.
    pub fn is_non_degenerate(&self, weights: &[GroupElement], f: &MultiPoly) -> Result<NonDegeneracy> {
        non_degeneracy(weights, f, self.value_poly(f)?)
    }
}

#[cfg(test)]
mod tests {
    use crate::algebra::parse_poly;
    use crate::valuation::fixtures;

    #[test]
    fn witness_is_minimalized() {
        let nu2 = fixtures::weighted_xyz();
        let v = nu2.vars().clone();
        let w: Vec<_> = (0..3).map(|i| nu2.var_value(i).unwrap()).collect();
        let r = nu2.is_non_degenerate(&w, &parse_poly("x + y + x*y", &v).unwrap()).unwrap();
        assert!(r.holds);
        assert_eq!(r.witness.unwrap().len(), 2);
        let aug = fixtures::augmented_key_xyz();
        let r = aug.is_non_degenerate(&w, &parse_poly("z^2 - x^2*y", &v).unwrap()).unwrap();
        assert!(!r.holds);
    }
}
