//! Multivariate gcd over ℚ by recursive primitive pseudo-remainder
//! sequences. Inputs must have non-negative exponents.

use num_traits::Zero;

use super::multipoly::MultiPoly;
use crate::Rational;

/// Variable involved in both inputs of least degree, else any involved one.
fn main_var(a: &MultiPoly, b: &MultiPoly) -> Option<usize> {
    let both = (0..a.nvars())
        .filter(|&i| a.involves(i) && b.involves(i))
        .min_by_key(|&i| a.degree_in(i).max(b.degree_in(i)));
    both.or_else(|| (0..a.nvars()).find(|&i| a.involves(i) || b.involves(i)))
}

const POINTS: [i64; 6] = [2, 3, 5, 7, 11, 13];

/// `a` as a univariate polynomial in `v` after fixing every other variable.
fn specialize(a: &MultiPoly, v: usize, at: &[Rational]) -> Vec<Rational> {
    let d = a.degree_in(v).unwrap_or(0) as usize;
    let mut out = vec![Rational::zero(); d + 1];
    for (e, c) in a.terms() {
        let mut t = c.clone();
        for (i, &k) in e.iter().enumerate() {
            if i != v && k != 0 {
                t *= at[i].pow(k as i32);
            }
        }
        out[e[v] as usize] += t;
    }
    out
}

fn trim(p: &mut Vec<Rational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn uni_gcd_degree(mut a: Vec<Rational>, mut b: Vec<Rational>) -> usize {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a mod b
        let lb = b.last().expect("nonzero").clone();
        while a.len() >= b.len() {
            let q = a.last().expect("nonzero").clone() / &lb;
            let off = a.len() - b.len();
            for (k, c) in b.iter().enumerate() {
                a[off + k] -= &q * c;
            }
            a.pop();
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Exact test that `a` and `b` share no factor of positive degree: a
/// specialization that keeps both leading coefficients cannot lower the
/// degree of the gcd.
fn provably_coprime(a: &MultiPoly, b: &MultiPoly) -> bool {
    let n = a.nvars();
    for v in 0..n {
        if !(a.involves(v) && b.involves(v)) {
            continue;
        }
        let mut settled = false;
        for shift in 0..POINTS.len() {
            let at: Vec<Rational> =
                (0..n).map(|i| Rational::from_integer(POINTS[(i + shift) % POINTS.len()].into())).collect();
            let pa = specialize(a, v, &at);
            let pb = specialize(b, v, &at);
            if pa.last().is_some_and(|c| c.is_zero()) || pb.last().is_some_and(|c| c.is_zero()) {
                continue;
            }
            if uni_gcd_degree(pa, pb) > 0 {
                return false;
            }
            settled = true;
            break;
        }
        if !settled {
            return false;
        }
    }
    true
}

/// Gcd of the coefficients of `a` seen as a polynomial in variable `v`.
pub fn content(a: &MultiPoly, v: usize) -> MultiPoly {
    let lo = a.min_degree_in(v).unwrap_or(0);
    let hi = a.degree_in(v).unwrap_or(0);
    let mut g = MultiPoly::zero(a.vars());
    for d in lo..=hi {
        let c = a.coeff_in(v, d);
        if c.is_zero() {
            continue;
        }
        g = gcd(&g, &c);
        if g.is_constant() {
            break;
        }
    }
    g
}

fn primitive_part(a: &MultiPoly, v: usize) -> MultiPoly {
    let c = content(a, v);
    a.divide_exact(&c).expect("content divides")
}

fn leading_in(a: &MultiPoly, v: usize) -> (i64, MultiPoly) {
    let d = a.degree_in(v).unwrap_or(0);
    (d, a.coeff_in(v, d))
}

/// Pseudo-remainder of `a` by `b` in variable `v`.
fn prem(a: &MultiPoly, b: &MultiPoly, v: usize) -> MultiPoly {
    let (db, lb) = leading_in(b, v);
    let mut r = a.clone();
    while !r.is_zero() {
        let (dr, lr) = leading_in(&r, v);
        if dr < db {
            break;
        }
        let mut shift = vec![0; a.nvars()];
        shift[v] = dr - db;
        r = &(&lb * &r) - &(&lr * &b.shift(&shift));
    }
    r
}

/// Monic (graded-lex) gcd; `gcd(0, 0) = 0`.
pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one(a.vars());
    }
    if let (Some((ea, _)), Some((eb, _))) = (a.as_monomial(), b.as_monomial()) {
        let e: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| *x.min(y)).collect();
        return MultiPoly::monomial(a.vars(), e, crate::Rational::from_integer(1.into()));
    }
    let v = main_var(a, b).expect("non-constant input involves a variable");
    if a.min_exponents().iter().all(|&x| x == 0) && b.min_exponents().iter().all(|&x| x == 0) && provably_coprime(a, b) {
        return MultiPoly::one(a.vars());
    }
    if !a.involves(v) {
        return gcd(a, &content(b, v));
    }
    if !b.involves(v) {
        return gcd(&content(a, v), b);
    }
    let ca = content(a, v);
    let cb = content(b, v);
    let g = gcd(&ca, &cb);
    let mut p = a.divide_exact(&ca).expect("content divides");
    let mut q = b.divide_exact(&cb).expect("content divides");
    if p.degree_in(v) < q.degree_in(v) {
        std::mem::swap(&mut p, &mut q);
    }
    loop {
        let r = prem(&p, &q, v);
        if r.is_zero() {
            break;
        }
        if !r.involves(v) {
            q = MultiPoly::one(a.vars());
            break;
        }
        p = q;
        q = primitive_part(&r, v);
    }
    (&g * &primitive_part(&q, v)).monic()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::multipoly::vars_of;

    #[test]
    fn gcd_recovers_common_factor() {
        let v = vars_of(&["x", "y", "z"]);
        let x = MultiPoly::var(&v, 0);
        let y = MultiPoly::var(&v, 1);
        let z = MultiPoly::var(&v, 2);
        let common = &(&x * &y) + &z;
        let a = &common * &(&x + &MultiPoly::one(&v));
        let b = &common * &(&(&y * &y) - &z);
        let g = gcd(&a, &b);
        assert_eq!(g, common.monic());
        assert!(gcd(&(&x + &y), &(&x - &y)).is_one());
        let one = MultiPoly::one(&v);
        let a = &x * &(&y + &one);
        let b = &x * &(&z + &one);
        assert_eq!(gcd(&a, &b), x);
        let c = &(&y + &one) * &(&x - &z);
        assert_eq!(gcd(&(&c * &(&x + &one)), &(&c * &(&z * &z))), c.monic());
    }
}
