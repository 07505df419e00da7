use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::multipoly::{MultiPoly, Vars};
use super::ratfunc::RationalFunction;
use crate::error::{Error, Result};
use crate::Rational;

/// Polynomial in the variable `vars[var]` whose coefficients are rational
/// functions not involving that variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly {
    vars: Vars,
    var: usize,
    coeffs: Vec<RationalFunction>,
}

impl UniPoly {
    pub fn zero(vars: &Vars, var: usize) -> Self {
        UniPoly { vars: vars.clone(), var, coeffs: Vec::new() }
    }

    pub fn constant(vars: &Vars, var: usize, c: RationalFunction) -> Self {
        Self::from_coeffs(vars, var, vec![c])
    }

    pub fn one(vars: &Vars, var: usize) -> Self {
        Self::constant(vars, var, RationalFunction::one(vars))
    }

    /// The variable itself.
    pub fn x(vars: &Vars, var: usize) -> Self {
        Self::from_coeffs(vars, var, vec![RationalFunction::zero(vars), RationalFunction::one(vars)])
    }

    pub fn from_coeffs(vars: &Vars, var: usize, coeffs: Vec<RationalFunction>) -> Self {
        debug_assert!(coeffs.iter().all(|c| !c.involves(var)), "coefficient involves the main variable");
        let mut p = UniPoly { vars: vars.clone(), var, coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// View a rational function as a polynomial in `vars[var]`.
    pub fn from_rf(f: &RationalFunction, var: usize) -> Result<Self> {
        let vars = f.vars().clone();
        if f.den().involves(var) {
            return Err(Error::NotPolynomial(vars[var].clone()));
        }
        let num = f.num();
        if num.is_zero() {
            return Ok(Self::zero(&vars, var));
        }
        let top = num.degree_in(var).unwrap_or(0);
        let mut coeffs = Vec::with_capacity(top as usize + 1);
        for d in 0..=top {
            let c = num.coeff_in(var, d);
            coeffs.push(RationalFunction::new(c, f.den().clone())?);
        }
        Ok(Self::from_coeffs(&vars, var, coeffs))
    }

    pub fn from_poly(p: &MultiPoly, var: usize) -> Result<Self> {
        Self::from_rf(&RationalFunction::from_poly(p.clone()), var)
    }

    pub fn to_rf(&self) -> RationalFunction {
        let mut acc = RationalFunction::zero(&self.vars);
        let x = RationalFunction::var(&self.vars, self.var);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &x) + c;
        }
        acc
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn var(&self) -> usize {
        self.var
    }

    pub fn var_name(&self) -> &str {
        &self.vars[self.var]
    }

    pub fn coeffs(&self) -> &[RationalFunction] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> RationalFunction {
        self.coeffs.get(i).cloned().unwrap_or_else(|| RationalFunction::zero(&self.vars))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree, with `0` for the zero polynomial.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading_coeff(&self) -> RationalFunction {
        self.coeffs.last().cloned().unwrap_or_else(|| RationalFunction::zero(&self.vars))
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn scale(&self, c: &RationalFunction) -> Self {
        Self::from_coeffs(&self.vars, self.var, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn scale_q(&self, c: &Rational) -> Self {
        Self::from_coeffs(&self.vars, self.var, self.coeffs.iter().map(|a| a.scale(c)).collect())
    }

    /// Multiply by `X^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![RationalFunction::zero(&self.vars); k];
        coeffs.extend(self.coeffs.iter().cloned());
        UniPoly { vars: self.vars.clone(), var: self.var, coeffs }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one(&self.vars, self.var);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// `(1/b!)·d^b/dX^b`.
    pub fn divided_derivative(&self, b: usize) -> Self {
        if b == 0 {
            return self.clone();
        }
        let coeffs = (b..self.coeffs.len())
            .map(|d| self.coeffs[d].scale(&Rational::from_integer(binomial(d, b))))
            .collect();
        Self::from_coeffs(&self.vars, self.var, coeffs)
    }

    /// Euclidean division by a monic divisor of positive degree.
    pub fn euclid_div(&self, q: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        if q.is_zero() || q.deg() == 0 {
            return Err(Error::ConstantDivisor);
        }
        if !q.is_monic() {
            return Err(Error::NonMonicDivisor);
        }
        let dq = q.deg();
        let mut rem = self.coeffs.clone();
        let mut quo = vec![RationalFunction::zero(&self.vars); rem.len().saturating_sub(dq)];
        while rem.len() > dq {
            let top = rem.len() - 1;
            let c = rem[top].clone();
            if !c.is_zero() {
                let k = top - dq;
                for (i, qc) in q.coeffs.iter().enumerate() {
                    rem[k + i] = &rem[k + i] - &(&c * qc);
                }
                quo[k] = c;
            }
            rem.pop();
        }
        Ok((Self::from_coeffs(&self.vars, self.var, quo), Self::from_coeffs(&self.vars, self.var, rem)))
    }

    /// Coefficients `p_j` with `self = Σ p_j·q^j` and `deg p_j < deg q`.
    pub fn q_expansion(&self, q: &UniPoly) -> Result<Vec<UniPoly>> {
        if q.is_zero() || q.deg() == 0 {
            return Err(Error::ConstantDivisor);
        }
        if !q.is_monic() {
            return Err(Error::NonMonicDivisor);
        }
        let mut out = Vec::new();
        let mut cur = self.clone();
        while !cur.is_zero() {
            let (quo, rem) = cur.euclid_div(q)?;
            out.push(rem);
            cur = quo;
        }
        if out.is_empty() {
            out.push(Self::zero(&self.vars, self.var));
        }
        Ok(out)
    }

    /// Inverse of [`UniPoly::q_expansion`].
    pub fn from_expansion(parts: &[UniPoly], q: &UniPoly) -> UniPoly {
        let mut acc = Self::zero(&q.vars, q.var);
        for p in parts.iter().rev() {
            acc = &(&acc * q) + p;
        }
        acc
    }

    /// Evaluate at `X = value`.
    pub fn eval(&self, value: &RationalFunction) -> RationalFunction {
        let mut acc = RationalFunction::zero(&self.vars);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * value) + c;
        }
        acc
    }

    /// Substitute `X = s` for another polynomial in the same variable.
    pub fn compose(&self, s: &UniPoly) -> UniPoly {
        let mut acc = Self::zero(&self.vars, self.var);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * s) + &Self::constant(&self.vars, self.var, c.clone());
        }
        acc
    }
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

fn zip_with(a: &UniPoly, b: &UniPoly, f: impl Fn(&RationalFunction, &RationalFunction) -> RationalFunction) -> UniPoly {
    assert_eq!(a.var, b.var, "polynomials in different variables");
    let n = a.coeffs.len().max(b.coeffs.len());
    let z = RationalFunction::zero(&a.vars);
    let coeffs = (0..n).map(|i| f(a.coeffs.get(i).unwrap_or(&z), b.coeffs.get(i).unwrap_or(&z))).collect();
    UniPoly::from_coeffs(&a.vars, a.var, coeffs)
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly { vars: self.vars.clone(), var: self.var, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        assert_eq!(self.var, rhs.var, "polynomials in different variables");
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero(&self.vars, self.var);
        }
        let mut coeffs = vec![RationalFunction::zero(&self.vars); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = &coeffs[i + j] + &(a * b);
                }
            }
        }
        UniPoly::from_coeffs(&self.vars, self.var, coeffs)
    }
}

impl UniPoly {
    pub fn is_constant_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn as_constant(&self) -> Option<&RationalFunction> {
        match self.coeffs.len() {
            1 => Some(&self.coeffs[0]),
            _ => None,
        }
    }

    pub fn is_zero_poly(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn zero_like(&self) -> Self {
        Self::zero(&self.vars, self.var)
    }

    pub fn rational_coeff(&self, i: usize) -> Option<Rational> {
        self.coeffs.get(i).and_then(|c| c.as_constant()).or_else(|| (i >= self.coeffs.len()).then(Rational::zero))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::multipoly::vars_of;

    fn setup() -> (Vars, UniPoly, UniPoly) {
        let v = vars_of(&["x", "y", "z"]);
        let z = UniPoly::x(&v, 2);
        let x2y = RationalFunction::monomial(&v, vec![2, 1, 0], Rational::one());
        let q = &z.pow(2) - &UniPoly::constant(&v, 2, x2y);
        (v, z, q)
    }

    #[test]
    fn derivative_examples() {
        let (_, z, q) = setup();
        assert_eq!(z.pow(2).divided_derivative(1), z.scale_q(&Rational::from_integer(2.into())));
        assert!(z.pow(2).divided_derivative(2).is_constant_one());
        assert_eq!(q.divided_derivative(1), z.scale_q(&Rational::from_integer(2.into())));
        assert!(q.divided_derivative(3).is_zero());
    }

    #[test]
    fn division_and_expansion() {
        let (v, z, q) = setup();
        let (quo, rem) = z.pow(3).euclid_div(&q).unwrap();
        assert_eq!(quo, z);
        let x2y = RationalFunction::monomial(&v, vec![2, 1, 0], Rational::one());
        assert_eq!(rem, z.scale(&x2y));
        let parts = z.pow(4).q_expansion(&q).unwrap();
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[0], UniPoly::constant(&v, 2, x2y.pow(2).unwrap()));
        assert_eq!(parts[1], UniPoly::constant(&v, 2, x2y.scale(&Rational::from_integer(2.into()))));
        assert!(parts[2].is_constant_one());
        assert_eq!(UniPoly::from_expansion(&parts, &q), z.pow(4));
        let bad = q.scale_q(&Rational::from_integer(2.into()));
        assert_eq!(z.euclid_div(&bad), Err(Error::NonMonicDivisor));
    }
}
