use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::Zero;

use crate::algebra::{fmt_rf, vars_of, Exp, MultiPoly, RationalFunction, Vars};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::valuation::ValuationSpec;
use crate::Rational;

pub type Matrix = Vec<Vec<i64>>;

pub(crate) fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub(crate) fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n).map(|i| (0..m).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

/// Row vector times matrix.
pub fn apply(e: &[i64], g: &Matrix) -> Exp {
    let n = g.first().map_or(0, Vec::len);
    (0..n).map(|j| e.iter().zip(g).map(|(x, row)| x * row[j]).sum()).collect()
}

/// One framed blow-up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub center: Vec<usize>,
    pub chosen: usize,
    /// Parameters of the center with value strictly above the chosen one.
    pub strict: Vec<usize>,
    /// Parameters of the center with the same value as the chosen one.
    pub equal: Vec<usize>,
    pub monomial: bool,
    pub residues: Vec<(usize, Rational)>,
    pub params_before: Vec<String>,
    pub params_after: Vec<String>,
    pub beta_before: Vec<GroupElement>,
    pub beta_after: Vec<GroupElement>,
    /// `e ↦ e·G` on exponent row vectors.
    pub matrix: Matrix,
}

/// Replacement of one parameter by another regular parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reframe {
    pub slot: usize,
    pub params_before: Vec<String>,
    pub params_after: Vec<String>,
    pub beta_before: Vec<GroupElement>,
    pub beta_after: Vec<GroupElement>,
    /// New parameter in terms of the previous ones.
    pub in_params: MultiPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameEvent {
    Blowup(TraceStep),
    Reframe(Reframe),
}

impl FrameEvent {
    pub fn params_after(&self) -> &[String] {
        match self {
            FrameEvent::Blowup(s) => &s.params_after,
            FrameEvent::Reframe(r) => &r.params_after,
        }
    }
}

/// Regular system of parameters reached by a sequence of framed blow-ups.
#[derive(Clone, Debug)]
pub struct Frame {
    spec: Arc<ValuationSpec>,
    params: Vars,
    values: Vec<GroupElement>,
    /// Each parameter as a function of the original variables.
    forward: Vec<RationalFunction>,
    /// Each original variable as a polynomial in the parameters; lost
    /// after a re-framing.
    backward: Option<Vec<MultiPoly>>,
    protected: BTreeSet<usize>,
    distinguished: usize,
    history: Vec<FrameEvent>,
    matrix: Matrix,
    inverse: Option<Matrix>,
    units: Vec<(String, MultiPoly)>,
    step_limit: Option<usize>,
    blowups: usize,
}

impl Frame {
    pub fn new(spec: impl Into<Arc<ValuationSpec>>) -> Result<Self> {
        let spec: Arc<ValuationSpec> = spec.into();
        let vars = spec.vars().clone();
        let n = vars.len();
        let values = (0..n).map(|i| spec.var_value(i)).collect::<Result<Vec<_>>>()?;
        for (v, name) in values.iter().zip(vars.iter()) {
            if !v.is_positive() {
                return Err(Error::Precondition(format!("`{name}` has non-positive value {v}")));
            }
        }
        Ok(Frame {
            forward: (0..n).map(|i| RationalFunction::var(&vars, i)).collect(),
            backward: Some((0..n).map(|i| MultiPoly::var(&vars, i)).collect()),
            distinguished: spec.x_var(),
            params: vars,
            values,
            protected: BTreeSet::new(),
            history: Vec::new(),
            matrix: identity(n),
            inverse: Some(identity(n)),
            units: Vec::new(),
            step_limit: None,
            blowups: 0,
            spec,
        })
    }

    pub fn spec(&self) -> &Arc<ValuationSpec> {
        &self.spec
    }

    pub fn params(&self) -> &Vars {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    pub fn forward(&self) -> &[RationalFunction] {
        &self.forward
    }

    pub fn backward(&self) -> Option<&[MultiPoly]> {
        self.backward.as_deref()
    }

    pub fn protected(&self) -> &BTreeSet<usize> {
        &self.protected
    }

    pub fn set_protected(&mut self, p: BTreeSet<usize>) {
        self.protected = p;
    }

    pub fn distinguished(&self) -> usize {
        self.distinguished
    }

    pub fn history(&self) -> &[FrameEvent] {
        &self.history
    }

    pub fn steps(&self) -> impl Iterator<Item = &TraceStep> {
        self.history.iter().filter_map(|e| match e {
            FrameEvent::Blowup(s) => Some(s),
            FrameEvent::Reframe(_) => None,
        })
    }

    pub fn blowups(&self) -> usize {
        self.blowups
    }

    /// Cumulative exponent matrix: original exponents times it give the
    /// exponents of the monomial part in the current parameters.
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Inverse of [`Frame::matrix`], present while every step is monomial.
    pub fn inverse(&self) -> Option<&Matrix> {
        self.inverse.as_ref()
    }

    pub fn units(&self) -> &[(String, MultiPoly)] {
        &self.units
    }

    pub fn set_step_limit(&mut self, limit: Option<usize>) {
        self.step_limit = limit;
    }

    pub fn step_limit(&self) -> Option<usize> {
        self.step_limit
    }

    pub fn zero_exp(&self) -> Exp {
        vec![0; self.len()]
    }

    /// `Σ e_q·β_q`.
    pub fn monomial_value(&self, e: &[i64]) -> Result<GroupElement> {
        let mut acc = self.spec.zero_value();
        for (k, b) in e.iter().zip(&self.values) {
            if *k != 0 {
                acc = acc.add(&b.mul_int(*k))?;
            }
        }
        Ok(acc)
    }

    /// Express a function of the original variables in the parameters.
    pub fn substitute(&self, f: &RationalFunction) -> Result<RationalFunction> {
        let bw = self
            .backward
            .as_ref()
            .ok_or_else(|| Error::Precondition("substitution is unavailable after re-framing".into()))?;
        if f.vars() != self.spec.vars() {
            return Err(Error::UnknownVariable(f.vars().join(",")));
        }
        let images: Vec<RationalFunction> = bw.iter().map(|p| RationalFunction::from_poly(p.clone())).collect();
        if images.is_empty() {
            return Ok(f.clone());
        }
        f.compose(&images)
    }

    /// Express a function of the parameters in the original variables.
    pub fn pull_back(&self, g: &RationalFunction) -> Result<RationalFunction> {
        g.compose(&self.forward)
    }

    /// Value of a function of the parameters.
    pub fn value_of(&self, g: &RationalFunction) -> Result<GroupElement> {
        self.spec.value(&self.pull_back(g)?)
    }

    /// `g = w^e · unit` with `e` the monomial content of numerator minus
    /// that of the denominator.
    pub fn split(&self, g: &RationalFunction) -> Result<(Exp, RationalFunction)> {
        if g.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let e: Exp = g.num().min_exponents().iter().zip(g.den().min_exponents()).map(|(a, b)| a - b).collect();
        let m = RationalFunction::monomial(&self.params, e.clone(), Rational::from_integer(1.into()));
        Ok((e, g.checked_div(&m)?))
    }

    /// Transform an exponent vector over the parameters at event `since`
    /// through all later blow-ups.
    pub fn transform_since(&self, since: usize, e: &[i64]) -> Result<Exp> {
        let mut e = e.to_vec();
        for ev in &self.history[since..] {
            match ev {
                FrameEvent::Blowup(s) => e = apply(&e, &s.matrix),
                FrameEvent::Reframe(r) => {
                    if e[r.slot] != 0 {
                        return Err(Error::Precondition("monomial involves a re-framed parameter".into()));
                    }
                }
            }
        }
        Ok(e)
    }

    /// Exponents of the terms of `p` (in the parameters) of least value.
    pub fn initial_exponents(&self, p: &MultiPoly) -> Result<Vec<Exp>> {
        let mut best: Option<GroupElement> = None;
        let mut out = Vec::new();
        for (e, _) in p.terms() {
            let v = self.monomial_value(e)?;
            match best.as_ref().map(|b| v.compare(b)).transpose()? {
                None | Some(Ordering::Less) => {
                    best = Some(v);
                    out = vec![e.clone()];
                }
                Some(Ordering::Equal) => out.push(e.clone()),
                Some(Ordering::Greater) => {}
            }
        }
        Ok(out)
    }

    fn fresh_name(&self, slot: usize) -> String {
        format!("{}_{}", self.spec.vars()[slot], self.history.len() + 1)
    }

    /// Framed blow-up along the parameters `center`.
    pub fn blowup(&mut self, center: &[usize]) -> Result<&TraceStep> {
        if self.step_limit.is_some_and(|l| self.blowups >= l) {
            return Err(Error::BudgetExceeded);
        }
        let n = self.len();
        let center: Vec<usize> = center.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        if let Some(&q) = center.iter().find(|&&q| q >= n) {
            return Err(Error::BadIndex(q));
        }
        if let Some(&q) = center.iter().find(|q| self.protected.contains(q)) {
            return Err(Error::ProtectedCenter(q));
        }
        if center.len() < 2 {
            return Err(Error::EmptyCenter);
        }
        let mut j = center[0];
        for &q in &center[1..] {
            if self.values[q].compare(&self.values[j])? == Ordering::Less {
                j = q;
            }
        }
        let mut strict = Vec::new();
        let mut equal = Vec::new();
        for &q in center.iter().filter(|&&q| q != j) {
            match self.values[q].compare(&self.values[j])? {
                Ordering::Greater => strict.push(q),
                _ => equal.push(q),
            }
        }
        let mut forward = self.forward.clone();
        let mut values = self.values.clone();
        let mut residues = Vec::new();
        for &q in &strict {
            forward[q] = self.forward[q].checked_div(&self.forward[j])?;
            values[q] = self.values[q].sub(&self.values[j])?;
        }
        for &q in &equal {
            let ratio = self.forward[q].checked_div(&self.forward[j])?;
            let c = self.spec.residue(&ratio).map_err(|e| Error::ResidueFieldExtension(format!("{}: {e}", fmt_rf(&ratio))))?;
            let shifted = &ratio - &RationalFunction::constant(ratio.vars(), c.clone());
            let v = self.spec.value(&shifted)?;
            if !v.is_positive() {
                return Err(Error::ResidueFieldExtension(format!(
                    "residue of `{}` is not rational",
                    fmt_rf(&ratio)
                )));
            }
            forward[q] = shifted;
            values[q] = v;
            residues.push((q, c));
        }
        let mut names: Vec<String> = self.params.as_ref().clone();
        for &q in strict.iter().chain(&equal) {
            names[q] = self.fresh_name(q);
        }
        let new_vars = vars_of(&names);
        let backward = match &self.backward {
            Some(bw) => {
                let images: Vec<MultiPoly> = (0..n)
                    .map(|i| {
                        let ni = MultiPoly::var(&new_vars, i);
                        let nj = MultiPoly::var(&new_vars, j);
                        if strict.contains(&i) {
                            &ni * &nj
                        } else if let Some((_, c)) = residues.iter().find(|(q, _)| *q == i) {
                            &nj * &(&ni + &MultiPoly::constant(&new_vars, c.clone()))
                        } else {
                            ni
                        }
                    })
                    .collect();
                Some(bw.iter().map(|p| p.compose(&images)).collect::<Result<Vec<_>>>()?)
            }
            None => None,
        };
        let mut g = identity(n);
        for &q in strict.iter().chain(&equal) {
            g[q][j] = 1;
        }
        for &q in &equal {
            g[q][q] = 0;
        }
        let monomial = equal.is_empty();
        self.inverse = match (&self.inverse, monomial) {
            (Some(inv), true) => {
                let mut gi = identity(n);
                for &q in &strict {
                    gi[q][j] = -1;
                }
                Some(mat_mul(&gi, inv))
            }
            _ => None,
        };
        self.matrix = mat_mul(&self.matrix, &g);
        for (q, c) in &residues {
            let u = &MultiPoly::var(&new_vars, *q) + &MultiPoly::constant(&new_vars, c.clone());
            self.units.push((format!("unit_{}", names[*q]), u));
        }
        if !equal.is_empty() && self.distinguished == j {
            self.distinguished = equal[0];
        }
        let step = TraceStep {
            center,
            chosen: j,
            strict,
            equal,
            monomial,
            residues,
            params_before: self.params.as_ref().clone(),
            params_after: names,
            beta_before: self.values.clone(),
            beta_after: values.clone(),
            matrix: g,
        };
        self.params = new_vars;
        self.values = values;
        self.forward = forward;
        self.backward = backward;
        self.blowups += 1;
        self.history.push(FrameEvent::Blowup(step));
        match self.history.last() {
            Some(FrameEvent::Blowup(s)) => Ok(s),
            _ => unreachable!("a blow-up was just recorded"),
        }
    }

    /// Replace the parameter in `slot` by `t`, a polynomial in the current
    /// parameters that agrees with it up to the other parameters and a
    /// unit; `original` is `t` in the original variables.
    pub fn reframe(&mut self, slot: usize, t: MultiPoly, original: RationalFunction) -> Result<()> {
        if slot >= self.len() {
            return Err(Error::BadIndex(slot));
        }
        if t.vars() != &self.params || !t.is_laurent_free() {
            return Err(Error::Precondition("new parameter must be a polynomial in the parameters".into()));
        }
        if !t.coeff(&self.zero_exp()).is_zero() {
            return Err(Error::Precondition("new parameter has a constant term".into()));
        }
        let mut e = self.zero_exp();
        e[slot] = 1;
        if t.coeff(&e).is_zero() {
            return Err(Error::Precondition("new parameter does not replace the old one".into()));
        }
        let v = self.spec.value(&original)?;
        if !v.is_positive() {
            return Err(Error::Precondition(format!("new parameter has value {v}")));
        }
        let check = self.pull_back(&RationalFunction::from_poly(t.clone()))?;
        if check != original {
            return Err(Error::InvariantViolation("new parameter does not match its definition".into()));
        }
        let mut names: Vec<String> = self.params.as_ref().clone();
        names[slot] = self.fresh_name(slot);
        let mut values = self.values.clone();
        values[slot] = v;
        let ev = Reframe {
            slot,
            params_before: self.params.as_ref().clone(),
            params_after: names.clone(),
            beta_before: self.values.clone(),
            beta_after: values.clone(),
            in_params: t,
        };
        self.params = vars_of(&names);
        self.values = values;
        self.forward[slot] = original;
        self.backward = None;
        self.inverse = None;
        self.history.push(FrameEvent::Reframe(ev));
        Ok(())
    }
}

/// Functional form of [`Frame::blowup`].
pub fn framed_blowup(frame: &Frame, center: &[usize]) -> Result<Frame> {
    let mut f = frame.clone();
    f.blowup(center)?;
    Ok(f)
}

/// Functional form of [`Frame::substitute`].
pub fn substitute(frame: &Frame, f: &RationalFunction) -> Result<RationalFunction> {
    frame.substitute(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{fmt_rf, parse_rf};
    use crate::group::ValueGroup;

    fn two_vars() -> ValuationSpec {
        let g = ValueGroup::default();
        let vars = vars_of(&["a", "b"]);
        let w = vec![GroupElement::parse("1", &g).unwrap(), GroupElement::parse("pi", &g).unwrap()];
        ValuationSpec::monomial(g, vars, w).unwrap()
    }

    #[test]
    fn one_monomial_step() {
        let mut f = Frame::new(two_vars()).unwrap();
        let s = f.blowup(&[0, 1]).unwrap().clone();
        assert_eq!(s.chosen, 0);
        assert!(s.monomial);
        assert_eq!(f.values()[1].to_string(), "-1 + pi");
        let b = parse_rf("b", f.spec().vars()).unwrap();
        assert_eq!(fmt_rf(&f.substitute(&b).unwrap()), "1*a*b_1");
        assert_eq!(mat_mul(f.matrix(), f.inverse().unwrap()), identity(2));
        assert_eq!(apply(&[0, 1], f.matrix()), vec![1, 1]);
    }

    #[test]
    fn center_errors() {
        let mut f = Frame::new(two_vars()).unwrap();
        assert_eq!(f.blowup(&[0]).unwrap_err(), Error::EmptyCenter);
        assert_eq!(f.blowup(&[0, 5]).unwrap_err(), Error::BadIndex(5));
        f.set_protected([1].into());
        assert_eq!(f.blowup(&[0, 1]).unwrap_err(), Error::ProtectedCenter(1));
        f.set_protected(BTreeSet::new());
        f.set_step_limit(Some(0));
        assert_eq!(f.blowup(&[0, 1]).unwrap_err(), Error::BudgetExceeded);
    }
}
