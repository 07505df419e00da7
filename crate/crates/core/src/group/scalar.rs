use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};

use super::generator::{sign_of_interval, GenRef, Interval, ValueGroup, MAX_LEVEL};
use crate::error::{Error, Result};
use crate::Rational;

impl Hash for GenRef {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.name().hash(state)
    }
}

/// Real number of the form `q0 + Σ q_g·g` over declared independent
/// generators `g`. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    rat: Rational,
    irr: BTreeMap<GenRef, Rational>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn rational(q: Rational) -> Self {
        Scalar { rat: q, irr: BTreeMap::new() }
    }

    pub fn int(n: i64) -> Self {
        Scalar::rational(Rational::from_integer(n.into()))
    }

    pub fn generator(g: &GenRef, coeff: Rational) -> Self {
        let mut s = Scalar::zero();
        if !coeff.is_zero() {
            s.irr.insert(g.clone(), coeff);
        }
        s
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rat
    }

    pub fn irrational_parts(&self) -> &BTreeMap<GenRef, Rational> {
        &self.irr
    }

    pub fn coeff_of(&self, name: &str) -> Rational {
        self.irr.iter().find(|(g, _)| g.name() == name).map(|(_, c)| c.clone()).unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.irr.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.irr.is_empty()
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        let mut out = self.clone();
        out.rat += &other.rat;
        for (g, c) in &other.irr {
            let e = out.irr.entry(g.clone()).or_default();
            *e += c;
            if e.is_zero() {
                out.irr.remove(g);
            }
        }
        out
    }

    pub fn neg(&self) -> Scalar {
        Scalar { rat: -&self.rat, irr: self.irr.iter().map(|(g, c)| (g.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar { rat: &self.rat * c, irr: self.irr.iter().map(|(g, q)| (g.clone(), q * c)).collect() }
    }

    pub fn enclosure(&self, level: u32) -> Interval {
        let mut iv = Interval::point(self.rat.clone());
        for (g, c) in &self.irr {
            iv = iv.add(&g.0.enclosure(level).scale(c));
        }
        iv
    }

    /// Sign of the real value. Exact when rational; otherwise refines the
    /// generator enclosures until the interval excludes zero.
    pub fn sign(&self) -> Result<Sign> {
        if self.irr.is_empty() {
            return Ok(if self.rat.is_zero() {
                Sign::NoSign
            } else if self.rat.is_positive() {
                Sign::Plus
            } else {
                Sign::Minus
            });
        }
        for level in 0..=MAX_LEVEL {
            if let Some(s) = sign_of_interval(&self.enclosure(level)) {
                return Ok(s);
            }
        }
        Err(Error::Undecidable)
    }

    pub fn compare(&self, other: &Scalar) -> Result<Ordering> {
        if self == other {
            return Ok(Ordering::Equal);
        }
        Ok(match self.sub(other).sign()? {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        })
    }

    /// Coordinates over `1` followed by the given generator names.
    pub fn coordinates(&self, names: &[String]) -> Vec<Rational> {
        let mut v = vec![self.rat.clone()];
        for n in names {
            v.push(self.coeff_of(n));
        }
        v
    }

    pub fn parse(s: &str, group: &ValueGroup) -> Result<Scalar> {
        parse_scalar(s, group)
    }
}

fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(bool, String)> = Vec::new();
        if !self.rat.is_zero() || self.irr.is_empty() {
            parts.push((self.rat.is_negative(), fmt_rational(&self.rat.abs())));
        }
        for (g, c) in &self.irr {
            let a = c.abs();
            let body = if a.is_one() { g.name().to_string() } else { format!("{}*{}", fmt_rational(&a), g.name()) };
            parts.push((c.is_negative(), body));
        }
        for (i, (neg, body)) in parts.iter().enumerate() {
            match (i, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

fn parse_scalar(s: &str, group: &ValueGroup) -> Result<Scalar> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty scalar".into()));
    }
    // split into signed terms, keeping the sign with each term
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for ch in compact.chars() {
        if ch == '+' || ch == '-' {
            if !cur.is_empty() {
                terms.push((neg, std::mem::take(&mut cur)));
                neg = false;
            }
            if ch == '-' {
                neg = !neg;
            }
        } else {
            cur.push(ch);
        }
    }
    terms.push((neg, cur));
    let mut out = Scalar::zero();
    for (neg, t) in terms {
        if t.is_empty() {
            return Err(Error::Parse(format!("dangling sign in `{s}`")));
        }
        let mut term = parse_term(&t, group)?;
        if neg {
            term = term.neg();
        }
        out = out.add(&term);
    }
    Ok(out)
}

fn parse_term(t: &str, group: &ValueGroup) -> Result<Scalar> {
    let mut coeff = Rational::one();
    let mut gen: Option<GenRef> = None;
    for factor in t.split('*') {
        if factor.is_empty() {
            return Err(Error::Parse(format!("empty factor in `{t}`")));
        }
        // a factor may carry a trailing division: `pi/2`, `3/4`
        let mut pieces = factor.split('/');
        let head = pieces.next().unwrap_or_default();
        if head.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
            if gen.is_some() {
                return Err(Error::Parse(format!("product of generators in `{t}`")));
            }
            gen = Some(group.get(head)?);
        } else {
            coeff *= Rational::from_integer(parse_int(head)?);
        }
        for d in pieces {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            coeff /= Rational::from_integer(d);
        }
    }
    Ok(match gen {
        Some(g) => Scalar::generator(&g, coeff),
        None => Scalar::rational(coeff),
    })
}

fn parse_int(s: &str) -> Result<BigInt> {
    s.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad integer `{s}`")))
}
