use std::cmp::Ordering;

use serde_json::{json, Value};

use super::divide::principalize;
use super::frame::Frame;
use crate::algebra::{fmt_rf, rf_to_json, Exp, MultiPoly, RationalFunction};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::valuation::non_degeneracy;

/// `f = w^monomial · unit` in the parameters of a frame.
#[derive(Clone, Debug)]
pub struct MonomialCertificate {
    pub params: Vec<String>,
    pub monomial: Exp,
    /// Explicit unit in the parameters.
    pub unit: RationalFunction,
    pub value: GroupElement,
    pub unit_value: GroupElement,
    pub residue: crate::Rational,
}

impl MonomialCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "params": self.params,
            "monomial": self.monomial,
            "unit": rf_to_json(&self.unit),
            "value": self.value.to_string(),
            "unit_value": self.unit_value.to_string(),
            "residue": crate::algebra::fmt_rational(&self.residue),
        })
    }
}

/// Certify `f` (in the original variables) as a monomial times a unit in
/// the current frame, if it already is one.
pub fn certify_monomial(frame: &Frame, f: &RationalFunction) -> Result<Option<MonomialCertificate>> {
    let g = frame.substitute(f)?;
    let (e, unit) = frame.split(&g)?;
    let unit_value = frame.value_of(&unit)?;
    if !unit_value.is_zero() {
        return Ok(None);
    }
    let residue = frame.spec().residue(&frame.pull_back(&unit)?)?;
    let value = frame.monomial_value(&e)?;
    let expected = frame.spec().value(f)?;
    if value.compare(&expected)? != Ordering::Equal {
        return Err(Error::InvariantViolation(format!("monomial value {value} differs from {expected}")));
    }
    Ok(Some(MonomialCertificate {
        params: frame.params().as_ref().clone(),
        monomial: e,
        unit,
        value,
        unit_value,
        residue,
    }))
}

/// Principalize the support of a non-degenerate `f` and factor it as a
/// monomial times a unit.
pub fn monomialize_nondegenerate(frame: &mut Frame, f: &RationalFunction) -> Result<MonomialCertificate> {
    if let Some(c) = certify_monomial(frame, f)? {
        return Ok(c);
    }
    let g = frame.substitute(f)?;
    if !g.den().is_constant() {
        let (_, u) = frame.split(&RationalFunction::from_poly(g.den().clone()))?;
        if !frame.value_of(&u)?.is_zero() {
            return Err(Error::DegenerateInput);
        }
    }
    let num: &MultiPoly = g.num();
    let nd = non_degeneracy(frame.values(), num, frame.value_of(&RationalFunction::from_poly(num.clone()))?)?;
    if !nd.holds {
        return Err(Error::DegenerateInput);
    }
    let witness = nd.witness.unwrap_or_default();
    principalize(frame, &witness)?;
    certify_monomial(frame, f)?
        .ok_or_else(|| Error::InvariantViolation(format!("`{}` is not monomial after principalization", fmt_rf(f))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_rf, vars_of};
    use crate::group::ValueGroup;
    use crate::valuation::ValuationSpec;

    #[test]
    fn sum_becomes_monomial_times_unit() {
        let g = ValueGroup::default();
        let w = vec![GroupElement::parse("1", &g).unwrap(), GroupElement::parse("pi", &g).unwrap()];
        let spec = ValuationSpec::monomial(g, vars_of(&["x", "y"]), w).unwrap();
        let mut frame = Frame::new(spec).unwrap();
        let f = parse_rf("x + y", frame.spec().vars()).unwrap();
        let c = monomialize_nondegenerate(&mut frame, &f).unwrap();
        assert_eq!(frame.blowups(), 1);
        assert_eq!(c.monomial, vec![1, 0]);
        assert!(c.unit_value.is_zero());
        let m = parse_rf("x^2*y", frame.spec().vars()).unwrap();
        let c = monomialize_nondegenerate(&mut frame, &m).unwrap();
        assert_eq!(c.monomial, vec![3, 1]);
    }
}
