use std::cmp::Ordering;

use num_traits::Zero;

use super::spec::{monomial_value, SpecKind, ValuationSpec};
use crate::algebra::{fmt_rf, MultiPoly, RationalFunction, UniPoly};
use crate::error::{Error, Result};
use crate::group::min_value;
use crate::Rational;

impl ValuationSpec {
    /// Residue in ℚ of a value-zero rational function, computed through the
    /// tower by comparing initial data of numerator and denominator.
    pub fn residue(&self, f: &RationalFunction) -> Result<Rational> {
        if f.is_zero() {
            return Err(Error::ResidueUndefined("zero has no residue".into()));
        }
        let v = self.value(f)?;
        if !v.is_zero() {
            return Err(Error::ResidueUndefined(format!("`{}` has value {v}", fmt_rf(f))));
        }
        let c = self.residue_pair(f.num(), f.den())?;
        if c.is_zero() {
            return Err(Error::ResidueUndefined(format!("`{}` has zero residue", fmt_rf(f))));
        }
        Ok(c)
    }

    /// `true` when `f` has value zero (it is then a unit of the valuation
    /// ring).
    pub fn is_unit(&self, f: &RationalFunction) -> Result<bool> {
        Ok(!f.is_zero() && self.value(f)?.is_zero())
    }

    fn residue_rf(&self, f: &RationalFunction) -> Result<Rational> {
        self.residue_pair(f.num(), f.den())
    }

    /// Residue of `g/h` assuming `ν(g) = ν(h)`.
    fn residue_pair(&self, g: &MultiPoly, h: &MultiPoly) -> Result<Rational> {
        match self.kind() {
            SpecKind::Monomial { weights } => {
                let ig = initial_terms(weights, g, self.rank())?;
                let ih = initial_terms(weights, h, self.rank())?;
                if let (Some((_, cg)), Some((_, ch))) = (ig.as_monomial(), ih.as_monomial()) {
                    return Ok(cg / ch);
                }
                let c = ig.leading_coeff() / ih.leading_coeff();
                if ih.scale(&c) == ig {
                    Ok(c)
                } else {
                    Err(Error::ResidueUndefined("initial forms are not proportional".into()))
                }
            }
            SpecKind::Composite { key, inner } => {
                let eg = UniPoly::from_poly(g, key.var())?.q_expansion(key)?;
                let eh = UniPoly::from_poly(h, key.var())?.q_expansion(key)?;
                let ng = eg.iter().position(|p| !p.is_zero()).ok_or(Error::ZeroPolynomial)?;
                let nh = eh.iter().position(|p| !p.is_zero()).ok_or(Error::ZeroPolynomial)?;
                if ng != nh {
                    return Err(Error::ResidueUndefined("different key orders".into()));
                }
                let ratio = eg[ng].to_rf().checked_div(&eh[nh].to_rf())?;
                inner.residue_rf(&ratio)
            }
            SpecKind::Augmented { base, key, assigned } => {
                let eg = UniPoly::from_poly(g, key.var())?.q_expansion(key)?;
                let eh = UniPoly::from_poly(h, key.var())?.q_expansion(key)?;
                let sg = minimal_indices(base, assigned, &eg)?;
                let sh = minimal_indices(base, assigned, &eh)?;
                if sg != sh {
                    return Err(Error::ResidueUndefined("initial forms involve different key powers".into()));
                }
                let mut out: Option<Rational> = None;
                for j in sg {
                    let ratio = eg[j].to_rf().checked_div(&eh[j].to_rf())?;
                    let c = base.residue_rf(&ratio)?;
                    match &out {
                        None => out = Some(c),
                        Some(prev) if *prev == c => {}
                        Some(_) => {
                            return Err(Error::ResidueUndefined("initial forms are not proportional".into()))
                        }
                    }
                }
                out.ok_or(Error::ZeroPolynomial)
            }
        }
    }
}

fn minimal_indices(
    base: &ValuationSpec,
    assigned: &crate::group::GroupElement,
    parts: &[UniPoly],
) -> Result<Vec<usize>> {
    let mut vals = Vec::new();
    for (j, p) in parts.iter().enumerate() {
        vals.push(if p.is_zero() {
            crate::group::GroupElement::PlusInfinity
        } else {
            base.value_uni(p)?.add(&assigned.mul_int(j as i64))?
        });
    }
    let m = min_value(&vals)?;
    let mut out = Vec::new();
    for (j, v) in vals.iter().enumerate() {
        if v.compare(&m)? == Ordering::Equal {
            out.push(j);
        }
    }
    Ok(out)
}

/// Terms of minimal weighted degree.
pub fn initial_terms(weights: &[crate::group::GroupElement], p: &MultiPoly, rank: usize) -> Result<MultiPoly> {
    let vals = p
        .terms()
        .map(|(e, _)| monomial_value(weights, e, rank))
        .collect::<Result<Vec<_>>>()?;
    let m = min_value(&vals)?;
    let mut out = MultiPoly::zero(p.vars());
    for ((e, c), v) in p.terms().zip(&vals) {
        if v.compare(&m)? == Ordering::Equal {
            out.add_term(e.clone(), c.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use crate::algebra::parse_rf;
    use crate::valuation::fixtures;
    use crate::Rational;

    #[test]
    fn residues_through_the_tower() {
        let nu3 = fixtures::keyed_xyz();
        let v = nu3.vars().clone();
        let r = nu3.residue(&parse_rf("z^2/(x^2*y)", &v).unwrap()).unwrap();
        assert_eq!(r, Rational::from_integer(1.into()));
        let r = nu3.residue(&parse_rf("(3*z^2 + x^9)/(x^2*y)", &v).unwrap()).unwrap();
        assert_eq!(r, Rational::from_integer(3.into()));
        assert!(nu3.residue(&parse_rf("z/x", &v).unwrap()).is_err());
        let nu2 = fixtures::weighted_xyz();
        let r = nu2.residue(&parse_rf("-2*z^2/(x^2*y)", &v).unwrap()).unwrap();
        assert_eq!(r, Rational::from_integer((-2).into()));
    }
}
