use std::cmp::Ordering;

use serde::Serialize;

use super::spec::ValuationSpec;
use crate::algebra::UniPoly;
use crate::error::{Error, Result};
use crate::group::{min_value, GroupElement};

/// Data of the `Q`-truncation of a valuation at `P`.
#[derive(Clone, Debug)]
pub struct TruncationReport {
    pub value: GroupElement,
    /// Indices `j` whose term `p_j·Q^j` reaches the minimum.
    pub argmin: Vec<usize>,
    /// Largest element of `argmin`.
    pub delta: usize,
    /// Value of each expansion term, `+inf` for vanishing coefficients.
    pub term_values: Vec<GroupElement>,
    pub expansion: Vec<UniPoly>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EpsilonReport {
    #[serde(serialize_with = "ser_display")]
    pub epsilon: GroupElement,
    /// Smallest maximizing order, absent when `epsilon` is `-inf`.
    pub b: Option<usize>,
    /// All maximizing orders.
    pub maximizers: Vec<usize>,
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug)]
pub struct InitialPart {
    pub value: GroupElement,
    /// `Σ_{j ∈ argmin} p_j·Q^j`.
    pub minimal_terms: UniPoly,
    pub indices: Vec<usize>,
}

fn as_x(spec: &ValuationSpec, p: &UniPoly) -> Result<UniPoly> {
    if p.var() == spec.x_var() {
        Ok(p.clone())
    } else {
        UniPoly::from_rf(&p.to_rf(), spec.x_var())
    }
}

impl ValuationSpec {
    /// `ν_Q(P) = min_j ν(p_j·Q^j)` over the `Q`-expansion of `P`.
    pub fn truncated_value(&self, q: &UniPoly, p: &UniPoly) -> Result<TruncationReport> {
        if !q.is_monic() {
            return Err(Error::NonMonicKey);
        }
        let p = if p.var() == q.var() { p.clone() } else { UniPoly::from_rf(&p.to_rf(), q.var())? };
        let expansion = p.q_expansion(q)?;
        let vq = self.value_uni(q)?;
        let mut term_values = Vec::with_capacity(expansion.len());
        for (j, pj) in expansion.iter().enumerate() {
            term_values.push(if pj.is_zero() {
                GroupElement::PlusInfinity
            } else {
                self.value_uni(pj)?.add(&vq.mul_int(j as i64))?
            });
        }
        let value = min_value(&term_values)?;
        let mut argmin = Vec::new();
        if value.is_finite() {
            for (j, t) in term_values.iter().enumerate() {
                if t.compare(&value)? == Ordering::Equal {
                    argmin.push(j);
                }
            }
        }
        let delta = argmin.last().copied().unwrap_or(0);
        Ok(TruncationReport { value, argmin, delta, term_values, expansion })
    }

    /// `ε(P) = max_b (ν(P) − ν(∂_b P))/b` over `1 ≤ b ≤ deg P`.
    pub fn epsilon(&self, p: &UniPoly) -> Result<EpsilonReport> {
        let p = as_x(self, p)?;
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let vp = self.value_uni(&p)?;
        let mut best = GroupElement::MinusInfinity;
        let mut maximizers = Vec::new();
        for b in 1..=p.deg() {
            let d = p.divided_derivative(b);
            if d.is_zero() {
                continue;
            }
            let e = vp.sub(&self.value_uni(&d)?)?.div_by_positive_int(b as i64)?;
            match e.compare(&best)? {
                Ordering::Greater => {
                    best = e;
                    maximizers = vec![b];
                }
                Ordering::Equal => maximizers.push(b),
                Ordering::Less => {}
            }
        }
        Ok(EpsilonReport { b: maximizers.first().copied(), epsilon: best, maximizers })
    }

    pub fn initial_part(&self, q: &UniPoly, p: &UniPoly) -> Result<InitialPart> {
        let rep = self.truncated_value(q, p)?;
        let parts: Vec<UniPoly> = rep
            .expansion
            .iter()
            .enumerate()
            .map(|(j, pj)| if rep.argmin.contains(&j) { pj.clone() } else { pj.zero_like() })
            .collect();
        Ok(InitialPart { value: rep.value, minimal_terms: UniPoly::from_expansion(&parts, q), indices: rep.argmin })
    }
}

#[cfg(test)]
mod tests {
    use crate::valuation::fixtures;

    #[test]
    fn epsilon_of_key_example() {
        let nu3 = fixtures::keyed_xyz();
        let q = fixtures::poly(&nu3, "z^2 - x^2*y");
        let e = nu3.epsilon(&q).unwrap();
        assert_eq!(e.epsilon.to_string(), "(1, -1 - pi)");
        assert_eq!(e.b, Some(1));
        assert_eq!(e.maximizers, vec![1]);
        let x = fixtures::poly(&nu3, "x");
        assert_eq!(nu3.epsilon(&x).unwrap().epsilon.to_string(), "-inf");
    }

    #[test]
    fn truncation_by_x() {
        let nu3 = fixtures::keyed_xyz();
        let q = fixtures::poly(&nu3, "z^2 - x^2*y");
        let z = fixtures::poly(&nu3, "z");
        let rep = nu3.truncated_value(&z, &q).unwrap();
        assert_eq!(rep.value.to_string(), "(0, 2 + 2*pi)");
        assert_eq!(rep.argmin, vec![0, 2]);
        assert_eq!(rep.delta, 2);
        let ip = nu3.initial_part(&z, &q).unwrap();
        assert_eq!(ip.minimal_terms, q);
    }
}
