use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::gcd::gcd;
use super::multipoly::{Exp, MultiPoly, Vars};
use crate::error::{Error, Result};
use crate::Rational;

/// Quotient of two polynomials in canonical form: numerator and
/// denominator have non-negative exponents, no common factor, and the
/// denominator is monic under graded-lex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: MultiPoly,
    den: MultiPoly,
}

impl RationalFunction {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        if p.is_laurent_free() {
            let den = MultiPoly::one(p.vars());
            RationalFunction { num: p, den }
        } else {
            let den = MultiPoly::one(p.vars());
            Self::normalize(p, den)
        }
    }

    pub fn zero(vars: &Vars) -> Self {
        Self::from_poly(MultiPoly::zero(vars))
    }

    pub fn one(vars: &Vars) -> Self {
        Self::from_poly(MultiPoly::one(vars))
    }

    pub fn constant(vars: &Vars, c: Rational) -> Self {
        Self::from_poly(MultiPoly::constant(vars, c))
    }

    pub fn var(vars: &Vars, i: usize) -> Self {
        Self::from_poly(MultiPoly::var(vars, i))
    }

    /// Laurent monomial `c·vars^e`.
    pub fn monomial(vars: &Vars, e: Exp, c: Rational) -> Self {
        Self::from_poly(MultiPoly::monomial(vars, e, c))
    }

    fn normalize(num: MultiPoly, den: MultiPoly) -> Self {
        let vars = num.vars().clone();
        if num.is_zero() {
            return RationalFunction { num, den: MultiPoly::one(&vars) };
        }
        let mn = num.min_exponents();
        let md = den.min_exponents();
        let mut n = num.shift(&mn.iter().map(|x| -x).collect::<Vec<_>>());
        let mut d = den.shift(&md.iter().map(|x| -x).collect::<Vec<_>>());
        if !d.is_constant() && !n.is_constant() {
            let g = gcd(&n, &d);
            if !g.is_one() {
                n = n.divide_exact(&g).expect("gcd divides numerator");
                d = d.divide_exact(&g).expect("gcd divides denominator");
            }
        }
        // redistribute the monomial part
        let m: Vec<i64> = mn.iter().zip(&md).map(|(a, b)| a - b).collect();
        let pos: Vec<i64> = m.iter().map(|&x| x.max(0)).collect();
        let neg: Vec<i64> = m.iter().map(|&x| (-x).max(0)).collect();
        n = n.shift(&pos);
        d = d.shift(&neg);
        let lc = d.leading_coeff();
        if !lc.is_one() {
            let inv = lc.recip();
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        RationalFunction { num: n, den: d }
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &MultiPoly {
        &self.den
    }

    pub fn vars(&self) -> &Vars {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// `Some((e, c))` when this is a Laurent monomial `c·vars^e`.
    pub fn as_laurent_monomial(&self) -> Option<(Exp, Rational)> {
        let (ne, nc) = self.num.as_monomial()?;
        let (de, dc) = self.den.as_monomial()?;
        Some((ne.iter().zip(de).map(|(a, b)| a - b).collect(), nc / dc))
    }

    /// Laurent polynomial equal to this function, when the denominator is a
    /// monomial.
    pub fn as_laurent_poly(&self) -> Option<MultiPoly> {
        let (de, dc) = self.den.as_monomial()?;
        Some(self.num.shift(&de.iter().map(|x| -x).collect::<Vec<_>>()).scale(&dc.recip()))
    }

    pub fn involves(&self, i: usize) -> bool {
        self.num.involves(i) || self.den.involves(i)
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(self.den.clone(), self.num.clone()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars());
        }
        RationalFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.recip()?.pow(-k);
        }
        Ok(RationalFunction { num: self.num.pow(k as u32), den: self.den.pow(k as u32) })
    }

    /// Substitute every variable by a rational function.
    pub fn compose(&self, images: &[RationalFunction]) -> Result<Self> {
        let n = eval_poly(&self.num, images)?;
        let d = eval_poly(&self.den, images)?;
        n.checked_div(&d)
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(&self.num * &other.den, &self.den * &other.num))
    }
}

/// Evaluate a Laurent polynomial at rational functions.
pub fn eval_poly(p: &MultiPoly, images: &[RationalFunction]) -> Result<RationalFunction> {
    let vars = images.first().map(|r| r.vars().clone()).unwrap_or_else(|| p.vars().clone());
    let mut acc = RationalFunction::zero(&vars);
    for (e, c) in p.terms() {
        let mut t = RationalFunction::constant(&vars, c.clone());
        for (i, &k) in e.iter().enumerate() {
            if k != 0 {
                t = &t * &images[i].pow(k)?;
            }
        }
        acc = &acc + &t;
    }
    Ok(acc)
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.den == rhs.den {
            if self.den.is_one() {
                return RationalFunction::from_poly(&self.num + &rhs.num);
            }
            return RationalFunction::normalize(&self.num + &rhs.num, self.den.clone());
        }
        RationalFunction::normalize(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.den.is_one() && rhs.den.is_one() {
            return RationalFunction::from_poly(&self.num * &rhs.num);
        }
        RationalFunction::normalize(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &RationalFunction {
    type Output = RationalFunction;
    /// Panics on division by zero; see [`RationalFunction::checked_div`].
    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        self.checked_div(rhs).expect("division by zero rational function")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::multipoly::vars_of;

    #[test]
    fn canonical_form() {
        let v = vars_of(&["x", "y"]);
        let x = MultiPoly::var(&v, 0);
        let y = MultiPoly::var(&v, 1);
        let a = RationalFunction::new(&(&x * &x) - &(&y * &y), (&x + &y).scale(&Rational::from_integer(2.into())))
            .unwrap();
        let want = RationalFunction::from_poly((&x - &y).scale(&Rational::new(1.into(), 2.into())));
        assert_eq!(a, want);
        let b = RationalFunction::new(x.clone(), &x * &y).unwrap();
        assert_eq!(b.num(), &MultiPoly::one(&v));
        assert_eq!(b.den(), &y);
        let lm = RationalFunction::from_poly(x.shift(&[-3, 2]));
        assert_eq!(lm.as_laurent_monomial(), Some((vec![-2, 2], Rational::one())));
    }
}
