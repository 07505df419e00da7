//! Chains of key polynomials: binomial successors built from the lattice of
//! lower values, their verification, optimality and the `δ = 1` limit test.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::algebra::{fmt_rational, rf_to_json, uni_to_json, MultiPoly, RationalFunction, UniPoly};
use crate::error::{Error, Result};
use crate::group::{min_value, GroupElement};
use crate::lattice::{Lattice, Multiplier};
use crate::valuation::ValuationSpec;
use crate::Rational;

/// Where a lattice generator comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Var(usize),
    Key(usize),
}

/// Lattice of lower values, with the element realizing each generator.
#[derive(Clone, Debug)]
pub struct LowerLattice {
    pub lattice: Lattice,
    pub sources: Vec<Source>,
}

impl LowerLattice {
    /// Values of the variables other than the key variable, plus values of
    /// the keys of `chain` whose degree is below `degree`.
    pub fn new(spec: &ValuationSpec, var: usize, chain: &[UniPoly], degree: usize) -> Result<Self> {
        let mut gens = Vec::new();
        let mut sources = Vec::new();
        for i in 0..spec.vars().len() {
            if i != var {
                gens.push(spec.var_value(i)?);
                sources.push(Source::Var(i));
            }
        }
        for (k, q) in chain.iter().enumerate() {
            if q.deg() < degree {
                gens.push(spec.value_uni(q)?);
                sources.push(Source::Key(k));
            }
        }
        Ok(LowerLattice { lattice: Lattice::new(gens), sources })
    }

    /// Lattice for a first key of degree one: variable values only.
    pub fn base(spec: &ValuationSpec) -> Result<Self> {
        Self::new(spec, spec.x_var(), &[], 1)
    }
}

pub fn lattice_multiplier(v: &GroupElement, l: &Lattice) -> Result<Multiplier> {
    l.multiplier(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuccessorKind {
    Ordinary,
    Optimal,
    Limit,
}

/// How the successor received the value that exceeds its truncation.
#[derive(Clone, Debug)]
pub enum Assignment {
    /// The given spec already separates the two values.
    Spec,
    /// The spec gives the successor its truncated value (the residue of
    /// `Q_i^α/f` is transcendental there); the value is the one in the
    /// spec composed with the successor's adic order.
    AdicExtension(Arc<ValuationSpec>),
}

#[derive(Clone, Debug)]
pub struct SuccessorCertificate {
    pub kind: SuccessorKind,
    pub alpha: u64,
    /// `f` with `Q_{i+1} = Q_i^α − c·f`.
    pub multiplier: Option<RationalFunction>,
    pub residue: Option<Rational>,
    pub solution: Vec<BigInt>,
    pub delta: Option<usize>,
    pub truncated_value: GroupElement,
    pub assigned_value: GroupElement,
    pub assignment: Assignment,
}

impl SuccessorCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "kind": format!("{:?}", self.kind),
            "alpha": self.alpha,
            "multiplier": self.multiplier.as_ref().map(rf_to_json),
            "residue": self.residue.as_ref().map(fmt_rational),
            "solution": self.solution.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
            "delta": self.delta,
            "truncated_value": self.truncated_value.to_string(),
            "assigned_value": self.assigned_value.to_string(),
            "assigned_by": match &self.assignment {
                Assignment::Spec => Value::String("spec".into()),
                Assignment::AdicExtension(s) => json!({"adic_extension": s.to_json()}),
            },
        })
    }

    /// The spec in which `assigned_value` is the successor's value.
    pub fn valuation<'a>(&'a self, spec: &'a ValuationSpec) -> &'a ValuationSpec {
        match &self.assignment {
            Assignment::Spec => spec,
            Assignment::AdicExtension(s) => s,
        }
    }
}

/// Binomial candidate `Q_i^α − c·f` before certification.
#[derive(Clone, Debug)]
pub struct Proposal {
    pub alpha: u64,
    pub solution: Vec<BigInt>,
    pub multiplier: RationalFunction,
    pub residue: Rational,
    pub successor: UniPoly,
}

/// Build `Q_{i+1} = Q_i^α − c·f` from the lattice solution.
pub fn propose_successor(
    spec: &ValuationSpec,
    q: &UniPoly,
    chain: &[UniPoly],
    lower: &LowerLattice,
) -> Result<Proposal> {
    let vq = spec.value_uni(q)?;
    let m = match lower.lattice.multiplier(&vq) {
        Ok(m) => m,
        Err(Error::NotInDivisibleHull) => return Err(Error::MaximalKey),
        Err(e) => return Err(e),
    };
    let solution = reduce_key_exponents(lower, m.solution)?;
    let vars = spec.vars();
    let mut f = RationalFunction::one(vars);
    for (s, src) in solution.iter().zip(&lower.sources) {
        let k = s.to_i64().ok_or_else(|| Error::InvariantViolation("exponent overflow".into()))?;
        if k == 0 {
            continue;
        }
        let base = match src {
            Source::Var(i) => RationalFunction::var(vars, *i),
            Source::Key(j) => chain[*j].to_rf(),
        };
        f = &f * &base.pow(k)?;
    }
    let alpha = m.alpha;
    let top = q.pow(alpha as u32);
    let ratio = top.to_rf().checked_div(&f)?;
    let c = spec.residue(&ratio)?;
    let fc = UniPoly::from_rf(&f.scale(&c), q.var())?;
    if fc.degree().unwrap_or(0) >= top.deg() {
        return Err(Error::NonPolynomialMultiplier);
    }
    let successor = &top - &fc;
    Ok(Proposal { alpha, solution, multiplier: f, residue: c, successor })
}

/// Make the exponents of lower keys non-negative by adding integer
/// relations among the generators.
fn reduce_key_exponents(lower: &LowerLattice, mut sol: Vec<BigInt>) -> Result<Vec<BigInt>> {
    let key_idx: Vec<usize> =
        lower.sources.iter().enumerate().filter(|(_, s)| matches!(s, Source::Key(_))).map(|(i, _)| i).collect();
    let deficit = |s: &[BigInt]| -> BigInt { key_idx.iter().map(|&i| if s[i].is_negative() { -&s[i] } else { BigInt::zero() }).sum() };
    if deficit(&sol).is_zero() {
        return Ok(sol);
    }
    let rels = lower.lattice.relations()?;
    for _ in 0..64 {
        let cur = deficit(&sol);
        if cur.is_zero() {
            return Ok(sol);
        }
        let mut best: Option<(BigInt, Vec<BigInt>)> = None;
        for r in &rels {
            for sign in [1i64, -1] {
                let cand: Vec<BigInt> = sol.iter().zip(r).map(|(a, b)| a + b * BigInt::from(sign)).collect();
                let d = deficit(&cand);
                if d < cur && best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                    best = Some((d, cand));
                }
            }
        }
        match best {
            Some((_, cand)) => sol = cand,
            None => break,
        }
    }
    Err(Error::NonPolynomialMultiplier)
}

/// Next key of the chain ending in `q`, certified optimal.
pub fn next_successor(
    spec: &ValuationSpec,
    q: &UniPoly,
    chain: &[UniPoly],
    lower: &LowerLattice,
) -> Result<(UniPoly, SuccessorCertificate)> {
    let p = propose_successor(spec, q, chain, lower)?;
    let trunc = spec.truncated_value(q, &p.successor)?;
    let assignment = if trunc.value.compare(&spec.value_uni(&p.successor)?)? == Ordering::Less {
        Assignment::Spec
    } else {
        Assignment::AdicExtension(Arc::new(ValuationSpec::composite(spec.clone(), p.successor.clone())?))
    };
    let mut cert = SuccessorCertificate {
        kind: SuccessorKind::Optimal,
        alpha: p.alpha,
        multiplier: Some(p.multiplier),
        residue: Some(p.residue),
        solution: p.solution,
        delta: None,
        truncated_value: trunc.value,
        assigned_value: GroupElement::PlusInfinity,
        assignment,
    };
    let val = cert.valuation(spec).clone();
    cert.truncated_value = val.truncated_value(q, &p.successor)?.value;
    cert.assigned_value = val.value_uni(&p.successor)?;
    if cert.truncated_value.compare(&cert.assigned_value)? != Ordering::Less {
        return Err(Error::NotASuccessor("truncation is not below the value".into()));
    }
    if !is_optimal(&val, q, &p.successor)?.optimal {
        cert.kind = SuccessorKind::Ordinary;
    }
    Ok((p.successor, cert))
}

#[derive(Clone, Debug)]
pub struct SuccessorReport {
    pub holds: bool,
    pub truncated_value: GroupElement,
    pub value: GroupElement,
    pub value_check: bool,
    pub alpha: Option<u64>,
    pub degree_check: bool,
    /// Leading coefficient of the expansion of `Q₂` in `Q₁` is 1.
    pub leading_one: bool,
}

impl SuccessorReport {
    pub fn to_json(&self) -> Value {
        json!({
            "holds": self.holds,
            "truncated_value": self.truncated_value.to_string(),
            "value": self.value.to_string(),
            "value_check": self.value_check,
            "alpha": self.alpha,
            "degree_check": self.degree_check,
            "leading_one": self.leading_one,
        })
    }
}

pub fn verify_immediate_successor(
    spec: &ValuationSpec,
    q1: &UniPoly,
    q2: &UniPoly,
    lower: &LowerLattice,
) -> Result<SuccessorReport> {
    let trunc = spec.truncated_value(q1, q2)?;
    let value = spec.value_uni(q2)?;
    let value_check = trunc.value.compare(&value)? == Ordering::Less;
    let alpha = lower.lattice.multiplier(&spec.value_uni(q1)?).ok().map(|m| m.alpha);
    let degree_check = alpha.is_some_and(|a| q2.deg() as u64 == a * q1.deg() as u64);
    let leading_one = trunc.expansion.last().is_some_and(|p| p.is_constant_one());
    Ok(SuccessorReport {
        holds: value_check && degree_check && q2.is_monic(),
        truncated_value: trunc.value,
        value,
        value_check,
        alpha,
        degree_check,
        leading_one,
    })
}

#[derive(Clone, Debug)]
pub struct OptimalityReport {
    pub optimal: bool,
    /// Sum of the expansion terms (split into monomial pieces where no
    /// cancellation occurs) that reach the truncated value.
    pub optimalized: UniPoly,
}

pub fn is_optimal(spec: &ValuationSpec, q1: &UniPoly, q2: &UniPoly) -> Result<OptimalityReport> {
    let trunc = spec.truncated_value(q1, q2)?;
    let target = &trunc.value;
    let vq = spec.value_uni(q1)?;
    let mut optimal = true;
    let mut kept = Vec::with_capacity(trunc.expansion.len());
    for (j, pj) in trunc.expansion.iter().enumerate() {
        if pj.is_zero() {
            kept.push(pj.clone());
            continue;
        }
        if !trunc.argmin.contains(&j) {
            optimal = false;
            kept.push(pj.zero_like());
            continue;
        }
        let shift = vq.mul_int(j as i64);
        let rf = pj.to_rf();
        let mut pieces = Vec::new();
        let mut vals = Vec::new();
        for (e, c) in rf.num().terms() {
            let t = RationalFunction::new(MultiPoly::monomial(rf.vars(), e.clone(), c.clone()), rf.den().clone())?;
            vals.push(spec.value(&t)?.add(&shift)?);
            pieces.push(t);
        }
        let lowest = min_value(&vals)?;
        if lowest.compare(target)? == Ordering::Less {
            // terms cancel inside the coefficient; keep it whole
            kept.push(pj.clone());
            continue;
        }
        let mut acc = RationalFunction::zero(rf.vars());
        for (t, v) in pieces.iter().zip(&vals) {
            if v.compare(target)? == Ordering::Equal {
                acc = &acc + t;
            } else {
                optimal = false;
            }
        }
        kept.push(UniPoly::from_rf(&acc, q1.var())?);
    }
    Ok(OptimalityReport { optimal, optimalized: UniPoly::from_expansion(&kept, q1) })
}

#[derive(Clone, Debug)]
pub struct LimitReport {
    pub holds: bool,
    pub delta: usize,
    pub argmin: Vec<usize>,
    pub truncated_value: GroupElement,
    pub value: GroupElement,
}

pub fn check_limit_successor(spec: &ValuationSpec, q: &UniPoly, candidate: &UniPoly) -> Result<LimitReport> {
    let trunc = spec.truncated_value(q, candidate)?;
    let value = spec.value_uni(candidate)?;
    let below = trunc.value.compare(&value)? == Ordering::Less;
    Ok(LimitReport {
        holds: below && trunc.delta == 1,
        delta: trunc.delta,
        argmin: trunc.argmin,
        truncated_value: trunc.value,
        value,
    })
}

/// Expansion of a key in `base_key` whose terms carry unit factors.
#[derive(Clone, Debug)]
pub struct KeyElement {
    pub base_key: UniPoly,
    pub coefficients: Vec<UniPoly>,
    pub units: Vec<RationalFunction>,
}

pub fn make_key_element(
    spec: &ValuationSpec,
    base_key: UniPoly,
    coefficients: Vec<UniPoly>,
    units: Vec<RationalFunction>,
) -> Result<KeyElement> {
    if units.len() != coefficients.len() {
        return Err(Error::Precondition("one unit per expansion coefficient".into()));
    }
    for u in &units {
        if !spec.is_unit(u)? {
            return Err(Error::NonUnitFactor(crate::algebra::fmt_rf(u)));
        }
        spec.residue(u).map_err(|_| Error::NonUnitFactor(crate::algebra::fmt_rf(u)))?;
    }
    Ok(KeyElement { base_key, coefficients, units })
}

impl KeyElement {
    pub fn associated_key(&self) -> UniPoly {
        UniPoly::from_expansion(&self.coefficients, &self.base_key)
    }

    /// `Σ a_j·q_j·Q^j` as a rational function.
    pub fn to_rf(&self) -> RationalFunction {
        let q = self.base_key.to_rf();
        let mut acc = RationalFunction::zero(q.vars());
        let mut qj = RationalFunction::one(q.vars());
        for (c, u) in self.coefficients.iter().zip(&self.units) {
            acc = &acc + &(&(&c.to_rf() * u) * &qj);
            qj = &qj * &q;
        }
        acc
    }
}

/// Certified chain `X = Q_1, Q_2, ...`.
#[derive(Clone, Debug)]
pub struct SuccessorChain {
    pub keys: Vec<UniPoly>,
    pub certificates: Vec<SuccessorCertificate>,
}

impl SuccessorChain {
    pub fn start(spec: &ValuationSpec) -> Self {
        SuccessorChain { keys: vec![spec.x()], certificates: Vec::new() }
    }

    pub fn last(&self) -> &UniPoly {
        self.keys.last().expect("chain starts with a key")
    }

    pub fn lower_lattice(&self, spec: &ValuationSpec) -> Result<LowerLattice> {
        let q = self.last();
        LowerLattice::new(spec, q.var(), &self.keys, q.deg())
    }

    /// Append the next binomial successor.
    pub fn extend(&mut self, spec: &ValuationSpec) -> Result<&SuccessorCertificate> {
        let lower = self.lower_lattice(spec)?;
        let (next, cert) = next_successor(spec, self.last(), &self.keys, &lower)?;
        self.keys.push(next);
        self.certificates.push(cert);
        Ok(self.certificates.last().expect("just pushed"))
    }

    /// Append a user supplied limit successor after checking `δ = 1`.
    pub fn push_limit(&mut self, spec: &ValuationSpec, candidate: UniPoly) -> Result<&SuccessorCertificate> {
        let rep = check_limit_successor(spec, self.last(), &candidate)?;
        if rep.delta != 1 {
            return Err(Error::DeltaNotOne(rep.delta));
        }
        if !rep.holds {
            return Err(Error::NotASuccessor("truncation is not below the value".into()));
        }
        self.keys.push(candidate);
        self.certificates.push(SuccessorCertificate {
            kind: SuccessorKind::Limit,
            alpha: 1,
            multiplier: None,
            residue: None,
            solution: Vec::new(),
            delta: Some(rep.delta),
            truncated_value: rep.truncated_value,
            assigned_value: rep.value,
            assignment: Assignment::Spec,
        });
        Ok(self.certificates.last().expect("just pushed"))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "keys": self.keys.iter().map(uni_to_json).collect::<Vec<_>>(),
            "certificates": self.certificates.iter().map(SuccessorCertificate::to_json).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fmt_uni;
    use crate::valuation::fixtures;

    #[test]
    fn successor_of_z_under_weights() {
        let nu2 = fixtures::weighted_xyz();
        let z = nu2.x();
        let lower = LowerLattice::base(&nu2).unwrap();
        let (q, cert) = next_successor(&nu2, &z, std::slice::from_ref(&z), &lower).unwrap();
        assert_eq!(fmt_uni(&q), "1*z^2 - 1*x^2*y");
        assert_eq!(cert.alpha, 2);
        assert_eq!(cert.residue, Some(Rational::from_integer(1.into())));
        assert!(matches!(cert.assignment, Assignment::AdicExtension(_)));
        assert_eq!(cert.truncated_value.to_string(), "(0, 2 + 2*pi)");
        assert_eq!(cert.assigned_value.to_string(), "(1, 0)");
    }

    #[test]
    fn verification_under_keyed_spec() {
        let nu3 = fixtures::keyed_xyz();
        let z = nu3.x();
        let q = fixtures::poly(&nu3, "z^2 - x^2*y");
        let lower = LowerLattice::base(&nu3).unwrap();
        let r = verify_immediate_successor(&nu3, &z, &q, &lower).unwrap();
        assert!(r.holds && r.leading_one);
        assert_eq!(r.alpha, Some(2));
        assert!(!verify_immediate_successor(&nu3, &q, &q, &lower).unwrap().holds);
        let z2 = fixtures::poly(&nu3, "z^2");
        assert!(!verify_immediate_successor(&nu3, &z, &z2, &lower).unwrap().holds);
        let (q_next, cert) = next_successor(&nu3, &z, std::slice::from_ref(&z), &lower).unwrap();
        assert_eq!(q_next, q);
        assert!(matches!(cert.assignment, Assignment::Spec));
        let mut chain = SuccessorChain::start(&nu3);
        chain.extend(&nu3).unwrap();
        assert_eq!(chain.extend(&nu3).unwrap_err(), Error::MaximalKey);
    }

    #[test]
    fn optimality() {
        let nu3 = fixtures::keyed_xyz();
        let z = nu3.x();
        let q = fixtures::poly(&nu3, "z^2 - x^2*y");
        assert!(is_optimal(&nu3, &z, &q).unwrap().optimal);
        let r = is_optimal(&nu3, &z, &fixtures::poly(&nu3, "z^2 - x^2*y + x^9")).unwrap();
        assert!(!r.optimal);
        assert_eq!(r.optimalized, q);
    }

    #[test]
    fn key_elements() {
        let nu3 = fixtures::keyed_xyz();
        let z = nu3.x();
        let v = nu3.vars().clone();
        let parts = z.pow(2).q_expansion(&z).unwrap();
        let ones = vec![RationalFunction::one(&v); parts.len()];
        let ke = make_key_element(&nu3, z.clone(), parts.clone(), ones).unwrap();
        assert_eq!(ke.associated_key(), z.pow(2));
        let unit = crate::algebra::parse_rf("1/(1 + x)", &v).unwrap();
        let mut units = vec![RationalFunction::one(&v); parts.len()];
        units[0] = unit;
        assert!(make_key_element(&nu3, z.clone(), parts.clone(), units).is_ok());
        let bad = vec![RationalFunction::var(&v, 0); parts.len()];
        assert!(matches!(make_key_element(&nu3, z, parts, bad), Err(Error::NonUnitFactor(_))));
    }
}
