use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// Shared, ordered list of variable names.
pub type Vars = Arc<Vec<String>>;

pub fn vars_of<S: AsRef<str>>(names: &[S]) -> Vars {
    Arc::new(names.iter().map(|s| s.as_ref().to_string()).collect())
}

/// Exponent vector, one entry per variable. Negative entries are Laurent
/// exponents.
pub type Exp = Vec<i64>;

/// Graded lexicographic comparison.
pub fn grlex(a: &[i64], b: &[i64]) -> Ordering {
    let da: i64 = a.iter().sum();
    let db: i64 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

/// Componentwise `a ⪯ b`.
pub fn exp_le(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub fn exp_add(a: &[i64], b: &[i64]) -> Exp {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn exp_sub(a: &[i64], b: &[i64]) -> Exp {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Laurent polynomial with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    vars: Vars,
    terms: BTreeMap<Exp, Rational>,
}

impl MultiPoly {
    pub fn zero(vars: &Vars) -> Self {
        MultiPoly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn constant(vars: &Vars, c: Rational) -> Self {
        Self::monomial(vars, vec![0; vars.len()], c)
    }

    pub fn monomial(vars: &Vars, e: Exp, c: Rational) -> Self {
        assert_eq!(e.len(), vars.len(), "exponent length must match variable count");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        MultiPoly { vars: vars.clone(), terms }
    }

    pub fn var(vars: &Vars, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::monomial(vars, e, Rational::one())
    }

    pub fn from_terms(vars: &Vars, terms: impl IntoIterator<Item = (Exp, Rational)>) -> Self {
        let mut p = MultiPoly::zero(vars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exp, &Rational)> {
        self.terms.iter()
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next()?;
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// The single term, if there is exactly one.
    pub fn as_monomial(&self) -> Option<(&Exp, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn coeff(&self, e: &[i64]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, e: Exp, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.vars);
        }
        MultiPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect() }
    }

    /// Multiply by the Laurent monomial `vars^e`.
    pub fn shift(&self, e: &[i64]) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(f, c)| (exp_add(f, e), c.clone())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> MultiPoly {
        let mut out = MultiPoly::one(&self.vars);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                out = &out * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// Largest exponent of variable `i`, or `None` for the zero polynomial.
    pub fn degree_in(&self, i: usize) -> Option<i64> {
        self.terms.keys().map(|e| e[i]).max()
    }

    pub fn min_degree_in(&self, i: usize) -> Option<i64> {
        self.terms.keys().map(|e| e[i]).min()
    }

    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e[i] != 0)
    }

    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Componentwise minimum of the support.
    pub fn min_exponents(&self) -> Exp {
        let mut m: Option<Exp> = None;
        for e in self.terms.keys() {
            m = Some(match m {
                None => e.clone(),
                Some(cur) => cur.iter().zip(e).map(|(a, b)| *a.min(b)).collect(),
            });
        }
        m.unwrap_or_else(|| vec![0; self.nvars()])
    }

    pub fn is_laurent_free(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x >= 0))
    }

    /// Leading term under graded lexicographic order.
    pub fn leading_term(&self) -> Option<(&Exp, &Rational)> {
        self.terms.iter().max_by(|a, b| grlex(a.0, b.0))
    }

    pub fn leading_coeff(&self) -> Rational {
        self.leading_term().map(|(_, c)| c.clone()).unwrap_or_default()
    }

    /// Scale so the graded-lex leading coefficient is one.
    pub fn monic(&self) -> MultiPoly {
        let lc = self.leading_coeff();
        if lc.is_zero() || lc.is_one() {
            return self.clone();
        }
        self.scale(&lc.recip())
    }

    /// Coefficient of `vars[i]^d`, as a polynomial with `vars[i]` removed.
    pub fn coeff_in(&self, i: usize, d: i64) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] == d {
                let mut f = e.clone();
                f[i] = 0;
                out.terms.insert(f, c.clone());
            }
        }
        out
    }

    /// Exact division of polynomials with non-negative exponents.
    pub fn divide_exact(&self, d: &MultiPoly) -> Option<MultiPoly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        if let Some((de, dc)) = d.as_monomial() {
            let inv = dc.recip();
            let strict = self.is_laurent_free();
            let mut out = MultiPoly::zero(&self.vars);
            for (e, c) in &self.terms {
                let f = exp_sub(e, de);
                if strict && f.iter().any(|&x| x < 0) {
                    return None;
                }
                out.terms.insert(f, c * &inv);
            }
            return Some(out);
        }
        let (lde, ldc) = d.leading_term().map(|(e, c)| (e.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quo = MultiPoly::zero(&self.vars);
        while let Some((e, c)) = rem.leading_term().map(|(e, c)| (e.clone(), c.clone())) {
            if !exp_le(&lde, &e) {
                return None;
            }
            let qe = exp_sub(&e, &lde);
            let qc = c / &ldc;
            rem = &rem - &d.shift(&qe).scale(&qc);
            quo.add_term(qe, qc);
        }
        Some(quo)
    }

    /// Substitute each variable by a polynomial. Negative exponents need
    /// the corresponding image to be a monomial.
    pub fn compose(&self, images: &[MultiPoly]) -> Result<MultiPoly> {
        let target = images.first().map(|p| p.vars.clone()).unwrap_or_else(|| self.vars.clone());
        let mut out = MultiPoly::zero(&target);
        for (e, c) in &self.terms {
            let mut t = MultiPoly::constant(&target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = &t * &images[i].pow(k as u32);
                } else if k < 0 {
                    let (me, mc) = images[i]
                        .as_monomial()
                        .ok_or_else(|| Error::NotPolynomial(self.vars[i].clone()))?;
                    let inv = MultiPoly::monomial(&target, me.iter().map(|x| -x).collect(), mc.recip());
                    t = &t * &inv.pow((-k) as u32);
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Polynomial over a different variable list that contains all of ours.
    pub fn reembed(&self, target: &Vars) -> Result<MultiPoly> {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| target.iter().position(|t| t == v).ok_or_else(|| Error::UnknownVariable(v.clone())))
            .collect::<Result<_>>()?;
        let mut out = MultiPoly::zero(target);
        for (e, c) in &self.terms {
            let mut f = vec![0; target.len()];
            for (i, &k) in e.iter().enumerate() {
                if k != 0 {
                    f[map[i]] = k;
                }
            }
            out.add_term(f, c.clone());
        }
        Ok(out)
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            match out.terms.get_mut(e) {
                Some(x) => {
                    *x += c;
                    if x.is_zero() {
                        out.terms.remove(e);
                    }
                }
                None => {
                    out.terms.insert(e.clone(), c.clone());
                }
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut terms: BTreeMap<Exp, Rational> = BTreeMap::new();
        for (e, c) in &self.terms {
            for (f, d) in &rhs.terms {
                *terms.entry(exp_add(e, f)).or_default() += c * d;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        MultiPoly { vars: self.vars.clone(), terms }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn arithmetic_and_division() {
        let v = vars_of(&["x", "y"]);
        let x = MultiPoly::var(&v, 0);
        let y = MultiPoly::var(&v, 1);
        let a = &(&x + &y) * &(&x - &y);
        let b = &(&x * &x) - &(&y * &y);
        assert_eq!(a, b);
        assert_eq!(b.divide_exact(&(&x + &y)), Some(&x - &y));
        assert_eq!((&x + &y).divide_exact(&(&x - &y)), None);
        assert_eq!(x.pow(3).degree_in(0), Some(3));
        assert_eq!(b.leading_coeff(), q(1));
    }

    #[test]
    fn laurent_shift() {
        let v = vars_of(&["x", "y"]);
        let p = MultiPoly::var(&v, 0).shift(&[-3, 1]);
        assert_eq!(p.min_exponents(), vec![-2, 1]);
        assert!(!p.is_laurent_free());
    }
}
