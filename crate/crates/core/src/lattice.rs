//! Exact membership of multiples of a value in a finitely generated
//! subgroup of the value group, via column Hermite reduction.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::Rational;

/// Subgroup of the value group generated by finitely many values.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub generators: Vec<GroupElement>,
}

/// `alpha·v = Σ solution_i·generators_i` with `alpha ≥ 1` minimal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multiplier {
    pub alpha: u64,
    pub solution: Vec<BigInt>,
}

impl Lattice {
    pub fn new(generators: Vec<GroupElement>) -> Self {
        Lattice { generators }
    }

    /// Integer coordinate matrix (one column per generator) and the
    /// target vector, after clearing all denominators.
    fn coordinates(&self, v: &GroupElement) -> Result<(Vec<Vec<BigInt>>, Vec<BigInt>)> {
        let rank = v.rank().ok_or(Error::SentinelOperand)?;
        let mut names = BTreeSet::new();
        for g in self.generators.iter().chain(std::iter::once(v)) {
            let entries = g.entries().ok_or(Error::SentinelOperand)?;
            if entries.len() != rank {
                return Err(Error::RankMismatch(entries.len(), rank));
            }
            for s in entries {
                for gen in s.irrational_parts().keys() {
                    names.insert(gen.name().to_string());
                }
            }
        }
        let names: Vec<String> = names.into_iter().collect();
        let flat = |g: &GroupElement| -> Vec<Rational> {
            g.entries().unwrap_or_default().iter().flat_map(|s| s.coordinates(&names)).collect()
        };
        let cols: Vec<Vec<Rational>> = self.generators.iter().map(flat).collect();
        let target = flat(v);
        let mut den = BigInt::one();
        for q in cols.iter().flatten().chain(target.iter()) {
            den = den.lcm(q.denom());
        }
        let scale = |q: &Rational| (q * Rational::from_integer(den.clone())).to_integer();
        let rows = target.len();
        let matrix = (0..rows).map(|r| cols.iter().map(|c| scale(&c[r])).collect()).collect();
        Ok((matrix, target.iter().map(scale).collect()))
    }

    /// Smallest `h ≥ 1` with `h·v` in the lattice, with one solution vector.
    pub fn multiplier(&self, v: &GroupElement) -> Result<Multiplier> {
        if self.generators.is_empty() {
            if v.is_zero() {
                return Ok(Multiplier { alpha: 1, solution: Vec::new() });
            }
            return Err(Error::NotInDivisibleHull);
        }
        let (b, t) = self.coordinates(v)?;
        let m = self.generators.len();
        let (h, u, pivots) = column_hermite(&b, m);
        // forward substitution on the pivot rows
        let mut y: Vec<Rational> = Vec::with_capacity(pivots.len());
        for (p, &row) in pivots.iter().enumerate() {
            let mut acc = Rational::from_integer(t[row].clone());
            for (q, yq) in y.iter().enumerate() {
                acc -= yq * Rational::from_integer(h[row][q].clone());
            }
            y.push(acc / Rational::from_integer(h[row][p].clone()));
        }
        for (row, tr) in t.iter().enumerate() {
            let mut acc = Rational::zero();
            for (q, yq) in y.iter().enumerate() {
                acc += yq * Rational::from_integer(h[row][q].clone());
            }
            if acc != Rational::from_integer(tr.clone()) {
                return Err(Error::NotInDivisibleHull);
            }
        }
        let mut alpha = BigInt::one();
        for q in &y {
            alpha = alpha.lcm(q.denom());
        }
        let scaled: Vec<BigInt> =
            y.iter().map(|q| (q * Rational::from_integer(alpha.clone())).to_integer()).collect();
        let solution = (0..m)
            .map(|i| scaled.iter().enumerate().map(|(p, s)| &u[i][p] * s).sum::<BigInt>())
            .collect();
        let alpha = u64::try_from(alpha).map_err(|_| Error::InvariantViolation("multiplier overflow".into()))?;
        Ok(Multiplier { alpha, solution })
    }

    /// Integer relations among the generators (a basis of the kernel).
    pub fn relations(&self) -> Result<Vec<Vec<BigInt>>> {
        let Some(first) = self.generators.first() else { return Ok(Vec::new()) };
        let (b, _) = self.coordinates(first)?;
        let m = self.generators.len();
        let (_, u, pivots) = column_hermite(&b, m);
        Ok((pivots.len()..m).map(|c| (0..m).map(|i| u[i][c].clone()).collect()).collect())
    }

    pub fn contains(&self, v: &GroupElement) -> Result<bool> {
        match self.multiplier(v) {
            Ok(m) => Ok(m.alpha == 1),
            Err(Error::NotInDivisibleHull) => Ok(false),
            Err(e) => Err(e),
        }
    }
}

/// Column-style Hermite reduction: returns `H = B·U`, the unimodular `U`
/// and the pivot row of each of the leading non-zero columns of `H`.
fn column_hermite(b: &[Vec<BigInt>], m: usize) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>, Vec<usize>) {
    let rows = b.len();
    let mut h: Vec<Vec<BigInt>> = b.to_vec();
    let mut u: Vec<Vec<BigInt>> =
        (0..m).map(|i| (0..m).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    let mut pivots = Vec::new();
    let mut k = 0;
    for r in 0..rows {
        if k >= m {
            break;
        }
        // fold every column c > k into column k on row r
        for c in (k + 1)..m {
            if h[r][c].is_zero() {
                continue;
            }
            let a = h[r][k].clone();
            let bb = h[r][c].clone();
            let eg = a.extended_gcd(&bb);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let (p, q) = (&a / &g, &bb / &g);
            // [col_k, col_c] <- [x·col_k + y·col_c, -q·col_k + p·col_c]
            combine(&mut h, k, c, &x, &y, &q, &p);
            combine(&mut u, k, c, &x, &y, &q, &p);
        }
        if h[r][k].is_zero() {
            continue;
        }
        if h[r][k].is_negative() {
            for row in h.iter_mut() {
                row[k] = -row[k].clone();
            }
            for row in u.iter_mut() {
                row[k] = -row[k].clone();
            }
        }
        // reduce earlier pivot columns modulo this one
        for c in 0..k {
            let f = h[r][c].div_floor(&h[r][k]);
            if !f.is_zero() {
                for row in h.iter_mut() {
                    let d = &f * &row[k];
                    row[c] -= d;
                }
                for row in u.iter_mut() {
                    let d = &f * &row[k];
                    row[c] -= d;
                }
            }
        }
        pivots.push(r);
        k += 1;
    }
    (h, u, pivots)
}

fn combine(mat: &mut [Vec<BigInt>], k: usize, c: usize, x: &BigInt, y: &BigInt, q: &BigInt, p: &BigInt) {
    for row in mat.iter_mut() {
        let a = row[k].clone();
        let b = row[c].clone();
        row[k] = x * &a + y * &b;
        row[c] = p * &b - q * &a;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::ValueGroup;

    fn ge(s: &str) -> GroupElement {
        GroupElement::parse(s, &ValueGroup::default()).unwrap()
    }

    #[test]
    fn multiplier_of_one_plus_pi() {
        let l = Lattice::new(vec![ge("1"), ge("2*pi")]);
        let m = l.multiplier(&ge("1 + pi")).unwrap();
        assert_eq!(m.alpha, 2);
        assert_eq!(m.solution, vec![BigInt::from(2), BigInt::from(1)]);
        assert_eq!(l.multiplier(&ge("3")).unwrap().alpha, 1);
        assert_eq!(Lattice::new(vec![ge("1")]).multiplier(&ge("pi")), Err(Error::NotInDivisibleHull));
    }

    #[test]
    fn relations_of_dependent_generators() {
        let l = Lattice::new(vec![ge("(0, 2)"), ge("(0, 3)"), ge("(1, 0)")]);
        let rel = l.relations().unwrap();
        assert_eq!(rel.len(), 1);
        let r = &rel[0];
        assert_eq!(&r[0] * BigInt::from(2) + &r[1] * BigInt::from(3), BigInt::zero());
        assert!(r[2].is_zero());
    }
}
