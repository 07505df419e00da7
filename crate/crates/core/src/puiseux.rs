//! Packages of blow-ups that turn a binomial key into a monomial times a new
//! parameter, and the recipe for limit successors.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::Signed;

use crate::algebra::{fmt_poly, Exp, MultiPoly, RationalFunction, UniPoly};
use crate::blowup::{
    certify_monomial, divide_monomials, monomialize_nondegenerate, Frame, FrameEvent,
    MonomialCertificate,
};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::lattice::Lattice;
use crate::successors::check_limit_successor;
use crate::Rational;

/// Steps of one package run.
#[derive(Clone, Debug)]
pub struct PackageTrace {
    pub events: Vec<usize>,
    /// `gcd` of the entries of the exponent difference before each step.
    pub gcds: Vec<i64>,
    /// Slot of the parameter created by the final step.
    pub new_slot: usize,
}

fn gcd_of(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, x| g.gcd(x))
}

/// Divisibility loop on two monomials of equal value; every step but the
/// last must be monomial and the difference must stay primitive.
fn run_package(frame: &mut Frame, a: &[i64], b: &[i64]) -> Result<PackageTrace> {
    let va = frame.monomial_value(a)?;
    if va.compare(&frame.monomial_value(b)?)? != Ordering::Equal {
        return Err(Error::NonBinomialInput("the two monomials have different values".into()));
    }
    let start = frame.history().len();
    let out = divide_monomials(frame, a, b)?;
    let mut gcds = Vec::new();
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    for &k in &out.events {
        let d: Exp = x.iter().zip(&y).map(|(p, q)| p - q).collect();
        gcds.push(gcd_of(&d));
        let g = match &frame.history()[k] {
            FrameEvent::Blowup(s) => s.matrix.clone(),
            FrameEvent::Reframe(_) => unreachable!("the loop only blows up"),
        };
        x = crate::blowup::apply_matrix(&x, &g);
        y = crate::blowup::apply_matrix(&y, &g);
    }
    if let Some(&g) = gcds.iter().find(|&&g| g != 1) {
        return Err(Error::InvariantViolation(format!("exponent difference has gcd {g}")));
    }
    let steps: Vec<&crate::blowup::TraceStep> = frame.history()[start..]
        .iter()
        .filter_map(|e| match e {
            FrameEvent::Blowup(s) => Some(s),
            FrameEvent::Reframe(_) => None,
        })
        .collect();
    let Some((last, rest)) = steps.split_last() else {
        return Err(Error::KeyNotMonomialized("the package performed no blow-up".into()));
    };
    if let Some(k) = rest.iter().position(|s| !s.monomial) {
        return Err(Error::InvariantViolation(format!("step {k} of the package is not monomial")));
    }
    if last.monomial {
        return Err(Error::KeyNotMonomialized("the last step of the package is monomial".into()));
    }
    Ok(PackageTrace { events: out.events, gcds, new_slot: last.equal[0] })
}

/// Result of a Puiseux package on a binomial key.
#[derive(Clone, Debug)]
pub struct PuiseuxOutcome {
    pub trace: PackageTrace,
    /// Exponents of the two initial monomials in the frame before the run.
    pub gamma: Exp,
    pub delta: Exp,
    /// `key = w^monomial · w_new · unit` in the final frame.
    pub monomial: Exp,
    pub unit: RationalFunction,
    /// `w^γ / w^δ` in the final frame, a unit.
    pub ratio_unit: RationalFunction,
    pub ratio_value: GroupElement,
    pub ratio_residue: Rational,
    /// Every original variable is a monomial times a unit afterwards.
    pub originals: Vec<MonomialCertificate>,
}

fn factor_with_new_param(frame: &Frame, f: &RationalFunction, slot: usize) -> Result<(Exp, RationalFunction)> {
    let g = frame.substitute(f)?;
    let (mut e, unit) = frame.split(&g)?;
    if e[slot] < 1 {
        return Err(Error::KeyNotMonomialized("the new parameter does not divide the transform".into()));
    }
    if !frame.value_of(&unit)?.is_zero() {
        return Err(Error::KeyNotMonomialized("the cofactor is not a unit".into()));
    }
    e[slot] -= 1;
    Ok((e, unit))
}

fn originals(frame: &Frame) -> Result<Vec<MonomialCertificate>> {
    let vars = frame.spec().vars().clone();
    (0..vars.len())
        .map(|i| {
            certify_monomial(frame, &RationalFunction::var(&vars, i))?
                .ok_or_else(|| Error::KeyNotMonomialized(format!("`{}` is not a monomial times a unit", vars[i])))
        })
        .collect()
}

/// Monomialize a key whose transform in `frame` has a two-term initial form.
pub fn puiseux_package(frame: &mut Frame, key: &UniPoly) -> Result<PuiseuxOutcome> {
    let f = key.to_rf();
    let g = frame.substitute(&f)?;
    let init = frame.initial_exponents(g.num())?;
    if init.len() != 2 {
        return Err(Error::NonBinomialInput(format!("{} initial terms in `{}`", init.len(), fmt_poly(g.num()))));
    }
    let (gamma, delta) = if init[0][frame.distinguished()] >= init[1][frame.distinguished()] {
        (init[0].clone(), init[1].clone())
    } else {
        (init[1].clone(), init[0].clone())
    };
    let ratio_before = {
        let one = Rational::from_integer(1.into());
        let m = |e: &Exp| RationalFunction::monomial(frame.params(), e.clone(), one.clone());
        frame.pull_back(&m(&gamma).checked_div(&m(&delta))?)?
    };
    let trace = run_package(frame, &delta, &gamma)?;
    let (monomial, unit) = factor_with_new_param(frame, &f, trace.new_slot)?;
    let ratio_unit = frame.substitute(&ratio_before)?;
    let ratio_value = frame.value_of(&ratio_unit)?;
    if !ratio_value.is_zero() {
        return Err(Error::InvariantViolation("monomial ratio is not a unit".into()));
    }
    let ratio_residue = frame.spec().residue(&ratio_before)?;
    Ok(PuiseuxOutcome {
        trace,
        gamma,
        delta,
        monomial,
        unit,
        ratio_unit,
        ratio_value,
        ratio_residue,
        originals: originals(frame)?,
    })
}

#[derive(Clone, Debug)]
pub struct JPackageOutcome {
    pub trace: PackageTrace,
    pub alpha: u64,
    /// The old parameter in the final frame.
    pub certificate: MonomialCertificate,
}

/// Package relating the parameter in `slot` to the other unprotected
/// parameters.
pub fn j_puiseux_package(frame: &mut Frame, slot: usize) -> Result<JPackageOutcome> {
    if slot >= frame.len() {
        return Err(Error::BadIndex(slot));
    }
    if frame.protected().contains(&slot) {
        return Err(Error::ProtectedCenter(slot));
    }
    let others: Vec<usize> = (0..frame.len()).filter(|&q| q != slot && !frame.protected().contains(&q)).collect();
    let lattice = Lattice::new(others.iter().map(|&q| frame.values()[q].clone()).collect());
    let m = lattice.multiplier(&frame.values()[slot])?;
    let mut gamma = frame.zero_exp();
    let mut delta = frame.zero_exp();
    gamma[slot] = m.alpha as i64;
    for (&q, s) in others.iter().zip(&m.solution) {
        let k: i64 = s.try_into().map_err(|_| Error::InvariantViolation("exponent overflow".into()))?;
        if s.is_negative() {
            gamma[q] -= k;
        } else {
            delta[q] += k;
        }
    }
    let old = frame.forward()[slot].clone();
    let trace = run_package(frame, &delta, &gamma)?;
    let certificate = certify_monomial(frame, &old)?
        .ok_or_else(|| Error::KeyNotMonomialized("old parameter is not a monomial times a unit".into()))?;
    Ok(JPackageOutcome { trace, alpha: m.alpha, certificate })
}

/// Transform of a successor after its coefficients are monomialized and
/// the previous key's monomial factor is divided out.
#[derive(Clone, Debug)]
pub struct PreparedSuccessor {
    pub transform: RationalFunction,
    /// Initial exponents of the transform when it has two.
    pub binomial: Option<(Exp, Exp)>,
    pub coefficients: Vec<Option<MonomialCertificate>>,
}

/// Check that `key` is a monomial times the distinguished parameter times a
/// unit; return the monomial.
fn monomialized_key(frame: &Frame, key: &UniPoly) -> Result<(Exp, RationalFunction)> {
    let g = frame.substitute(&key.to_rf())?;
    let (mut e, unit) = frame.split(&g)?;
    let n = frame.distinguished();
    if e[n] != 1 || !frame.value_of(&unit)?.is_zero() {
        return Err(Error::Precondition("previous key is not monomialized in this frame".into()));
    }
    e[n] = 0;
    Ok((e, unit))
}

fn with_protected<T>(frame: &mut Frame, extra: usize, f: impl FnOnce(&mut Frame) -> Result<T>) -> Result<T> {
    let saved = frame.protected().clone();
    let mut p = saved.clone();
    p.insert(extra);
    frame.set_protected(p);
    let out = f(frame);
    frame.set_protected(saved);
    out
}

pub fn prepare_successor(frame: &mut Frame, key: &UniPoly, next: &UniPoly) -> Result<PreparedSuccessor> {
    monomialized_key(frame, key)?;
    let parts = next.q_expansion(key)?;
    let n = frame.distinguished();
    let mut coefficients = Vec::with_capacity(parts.len());
    for b in &parts {
        if b.is_zero() || b.deg() > 0 {
            coefficients.push(None);
            continue;
        }
        let c = with_protected(frame, n, |fr| monomialize_nondegenerate(fr, &b.to_rf()))
            .map_err(|e| Error::RecursionBudgetExceeded(format!("coefficient: {e}")))?;
        coefficients.push(Some(c));
    }
    let (omega, unit) = monomialized_key(frame, key)?;
    let alpha = (next.deg() / key.deg().max(1)) as i64;
    let one = Rational::from_integer(1.into());
    let om = RationalFunction::monomial(frame.params(), omega, one);
    let scale = (&om * &unit).pow(alpha)?;
    let transform = frame.substitute(&next.to_rf())?.checked_div(&scale)?;
    let init = frame.initial_exponents(transform.num())?;
    let binomial = (init.len() == 2).then(|| (init[0].clone(), init[1].clone()));
    Ok(PreparedSuccessor { transform, binomial, coefficients })
}

#[derive(Clone, Debug)]
pub struct LimitOutcome {
    pub trace: PackageTrace,
    /// Slot holding the re-framed parameter.
    pub slot: usize,
    /// `P = w^monomial · (new parameter)`.
    pub monomial: Exp,
    /// The monomial in the original variables.
    pub divisor: RationalFunction,
    pub reframed: bool,
    pub divisibility_events: Vec<usize>,
}

/// Monomialize a limit successor `p` of the current key through the
/// `α = 1` package, then make `p` over a monomial the last parameter.
pub fn monomialize_limit_successor(frame: &mut Frame, key: &UniPoly, p: &UniPoly) -> Result<LimitOutcome> {
    let spec = frame.spec().clone();
    let rep = check_limit_successor(&spec, key, p)?;
    if rep.delta != 1 {
        return Err(Error::DeltaNotOne(rep.delta));
    }
    if !rep.holds {
        return Err(Error::NotASuccessor("truncation is not below the value".into()));
    }
    let n = frame.distinguished();
    monomialized_key(frame, key)?;
    let parts = p.q_expansion(key)?;
    if parts.iter().any(|b| b.deg() > 0) {
        return Err(Error::Precondition("expansion coefficients must be free of the key variable".into()));
    }
    let coeffs: Vec<Option<RationalFunction>> =
        parts.iter().map(|b| (!b.is_zero()).then(|| b.to_rf())).collect();
    if coeffs.len() < 2 || coeffs[0].is_none() || coeffs[1].is_none() {
        return Err(Error::Precondition("limit successor needs nonzero constant and linear terms".into()));
    }
    let start = frame.history().len();
    let monomials = |fr: &mut Frame| -> Result<Vec<Option<Exp>>> {
        let (omega, _) = monomialized_key(fr, key)?;
        coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| match c {
                None => Ok(None),
                Some(c) => {
                    let cert = with_protected(fr, n, |fr| monomialize_nondegenerate(fr, c))
                        .map_err(|e| Error::RecursionBudgetExceeded(format!("coefficient {j}: {e}")))?;
                    Ok(Some(cert.monomial.iter().zip(&omega).map(|(a, w)| a + (j as i64) * w).collect()))
                }
            })
            .collect()
    };
    let mut ms = monomials(frame)?;
    // b₁ | b₀ and b₁^j | b_j·b₀^(j−1)
    let mut targets: Vec<(Exp, Exp)> = Vec::new();
    let lift = |e: &Exp, k: i64| -> Exp { e.iter().map(|x| x * k).collect() };
    let add = |a: &Exp, b: &Exp| -> Exp { a.iter().zip(b).map(|(x, y)| x + y).collect() };
    for j in 0..ms.len() {
        if j == 1 {
            continue;
        }
        let (Some(m0), Some(m1)) = (&ms[0], &ms[1]) else { continue };
        let Some(mj) = &ms[j] else { continue };
        let jj = j.max(1) as i64;
        let lhs = lift(m1, jj);
        let rhs = if j == 0 { m0.clone() } else { add(mj, &lift(m0, jj - 1)) };
        targets.push((lhs, rhs));
    }
    for k in 0..targets.len() {
        if !crate::algebra::exp_le(&targets[k].0, &targets[k].1) {
            let s = frame.history().len();
            let (a, b) = targets[k].clone();
            let out = with_protected(frame, n, |fr| divide_monomials(fr, &a, &b))?;
            if !out.first_divides() {
                return Err(Error::InvariantViolation("coefficient divisibility failed".into()));
            }
            for t in targets.iter_mut() {
                t.0 = frame.transform_since(s, &t.0)?;
                t.1 = frame.transform_since(s, &t.1)?;
            }
        }
    }
    let divisibility_events: Vec<usize> = (start..frame.history().len()).collect();
    ms = monomials(frame)?;
    let (m0, m1) = (ms[0].clone().expect("checked"), ms[1].clone().expect("checked"));
    let mut a = m1;
    a[n] += 1;
    let trace = run_package(frame, &a, &m0)?;
    let f = p.to_rf();
    let g = frame.substitute(&f)?;
    let (e, t) = frame.split(&g)?;
    let one = Rational::from_integer(1.into());
    let divisor = frame.pull_back(&RationalFunction::monomial(frame.params(), e.clone(), one))?;
    let slot = trace.new_slot;
    if frame.value_of(&t)?.is_zero() {
        return Ok(LimitOutcome { trace, slot, monomial: e, divisor, reframed: false, divisibility_events });
    }
    if !t.den().is_constant() {
        return Err(Error::KeyNotMonomialized("cofactor is not a polynomial".into()));
    }
    let tp: MultiPoly = t.num().scale(&t.den().as_constant().expect("constant").recip());
    frame.reframe(slot, tp, f.checked_div(&divisor)?)?;
    Ok(LimitOutcome { trace, slot, monomial: e, divisor, reframed: true, divisibility_events })
}

/// Protected set helper for callers that run packages on a sub-frame.
pub fn protect_all_but(frame: &mut Frame, keep: &[usize]) {
    let p: BTreeSet<usize> = (0..frame.len()).filter(|q| !keep.contains(q)).collect();
    frame.set_protected(p);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{fmt_rf, parse_rf};
    use crate::valuation::fixtures;

    #[test]
    fn binomial_key_under_keyed_spec() {
        let spec = fixtures::keyed_xyz();
        let q = fixtures::poly(&spec, "z^2 - x^2*y");
        let mut frame = Frame::new(spec).unwrap();
        let out = puiseux_package(&mut frame, &q).unwrap();
        assert_eq!(out.gamma, vec![0, 0, 2]);
        assert_eq!(out.delta, vec![2, 1, 0]);
        assert_eq!(out.trace.events.len(), 3);
        assert!(out.trace.gcds.iter().all(|&g| g == 1));
        assert!(out.ratio_value.is_zero());
        assert_eq!(out.ratio_residue, Rational::from_integer(1.into()));
        assert_eq!(out.originals.len(), 3);
        // the key is the new parameter times the transform of x²y
        let x2y = parse_rf("x^2*y", frame.spec().vars()).unwrap();
        let base = certify_monomial(&frame, &x2y).unwrap().unwrap();
        let mut e = base.monomial.clone();
        e[out.trace.new_slot] += 1;
        let mut m = out.monomial.clone();
        m[out.trace.new_slot] += 1;
        assert_eq!(m, e);
    }

    #[test]
    fn binomial_key_fails_under_weights() {
        let spec = fixtures::weighted_xyz();
        let q = fixtures::poly(&spec, "z^2 - x^2*y");
        let mut frame = Frame::new(spec).unwrap();
        assert!(matches!(puiseux_package(&mut frame, &q), Err(Error::ResidueFieldExtension(_))));
    }

    #[test]
    fn non_binomial_is_rejected() {
        let spec = fixtures::keyed_xyz();
        let q = fixtures::poly(&spec, "z");
        let mut frame = Frame::new(spec).unwrap();
        assert!(matches!(puiseux_package(&mut frame, &q), Err(Error::NonBinomialInput(_))));
    }

    #[test]
    fn j_package_on_equal_values() {
        let spec = fixtures::limit_xyz();
        let mut frame = Frame::new(spec).unwrap();
        frame.set_protected([1].into_iter().collect());
        let out = j_puiseux_package(&mut frame, 2).unwrap();
        assert_eq!(out.alpha, 1);
        assert_eq!(out.trace.events.len(), 1);
        assert!(out.certificate.unit_value.is_zero());
        assert_eq!(j_puiseux_package(&mut frame, 1).unwrap_err(), Error::ProtectedCenter(1));
    }

    #[test]
    fn limit_successor_recipe() {
        let spec = fixtures::limit_xyz();
        let key = fixtures::poly(&spec, "z");
        let p = fixtures::poly(&spec, "z^2 + y*z - x*y");
        let mut frame = Frame::new(spec).unwrap();
        let out = monomialize_limit_successor(&mut frame, &key, &p).unwrap();
        assert!(out.reframed);
        assert_eq!(out.slot, 2);
        assert_eq!(out.divisibility_events.len(), 1);
        assert_eq!(out.trace.events.len(), 2);
        assert_eq!(fmt_rf(&out.divisor), "1*x*y");
        assert!(frame.backward().is_none());
        let fwd = &frame.forward()[out.slot];
        assert_eq!(fwd, &p.to_rf().checked_div(&out.divisor).unwrap());
        assert!(frame.values()[out.slot].is_positive());
    }

    #[test]
    fn limit_successor_needs_delta_one() {
        let spec = fixtures::keyed_xyz();
        let key = fixtures::poly(&spec, "z");
        let p = fixtures::poly(&spec, "z^2 - x^2*y");
        let mut frame = Frame::new(spec).unwrap();
        assert!(matches!(monomialize_limit_successor(&mut frame, &key, &p), Err(Error::DeltaNotOne(d)) if d >= 2));
    }
}
