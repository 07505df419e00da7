use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Signed;

use super::generator::ValueGroup;
use super::scalar::Scalar;
use crate::error::{Error, Result};
use crate::Rational;

/// Element of a lexicographically ordered group `ℝ^rank` (real entries
/// restricted to [`Scalar`]s), extended by two infinite sentinels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupElement {
    MinusInfinity,
    Finite(Vec<Scalar>),
    PlusInfinity,
}

impl GroupElement {
    pub fn zero(rank: usize) -> Self {
        GroupElement::Finite(vec![Scalar::zero(); rank])
    }

    pub fn from_scalars(v: Vec<Scalar>) -> Self {
        assert!(!v.is_empty(), "group elements have rank at least one");
        GroupElement::Finite(v)
    }

    /// Rank-one element.
    pub fn scalar(s: Scalar) -> Self {
        GroupElement::Finite(vec![s])
    }

    pub fn int(rank: usize, last: i64) -> Self {
        let mut v = vec![Scalar::zero(); rank];
        v[rank - 1] = Scalar::int(last);
        GroupElement::Finite(v)
    }

    pub fn rank(&self) -> Option<usize> {
        match self {
            GroupElement::Finite(v) => Some(v.len()),
            _ => None,
        }
    }

    pub fn entries(&self) -> Option<&[Scalar]> {
        match self {
            GroupElement::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, GroupElement::Finite(_))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, GroupElement::Finite(v) if v.iter().all(Scalar::is_zero))
    }

    pub fn compare(&self, other: &GroupElement) -> Result<Ordering> {
        use GroupElement::*;
        match (self, other) {
            (MinusInfinity, MinusInfinity) | (PlusInfinity, PlusInfinity) => Ok(Ordering::Equal),
            (MinusInfinity, _) | (_, PlusInfinity) => Ok(Ordering::Less),
            (_, MinusInfinity) | (PlusInfinity, _) => Ok(Ordering::Greater),
            (Finite(a), Finite(b)) => {
                if a.len() != b.len() {
                    return Err(Error::RankMismatch(a.len(), b.len()));
                }
                for (x, y) in a.iter().zip(b) {
                    match x.compare(y)? {
                        Ordering::Equal => continue,
                        o => return Ok(o),
                    }
                }
                Ok(Ordering::Equal)
            }
        }
    }

    pub fn lt(&self, other: &GroupElement) -> bool {
        self.cmp(other) == Ordering::Less
    }

    pub fn le(&self, other: &GroupElement) -> bool {
        self.cmp(other) != Ordering::Greater
    }

    pub fn is_positive(&self) -> bool {
        match self {
            GroupElement::Finite(v) => self.compare(&GroupElement::zero(v.len())) == Ok(Ordering::Greater),
            GroupElement::PlusInfinity => true,
            GroupElement::MinusInfinity => false,
        }
    }

    pub fn add(&self, other: &GroupElement) -> Result<GroupElement> {
        use GroupElement::*;
        match (self, other) {
            (PlusInfinity, MinusInfinity) | (MinusInfinity, PlusInfinity) => Err(Error::SentinelOperand),
            (PlusInfinity, _) | (_, PlusInfinity) => Ok(PlusInfinity),
            (MinusInfinity, _) | (_, MinusInfinity) => Ok(MinusInfinity),
            (Finite(a), Finite(b)) => {
                if a.len() != b.len() {
                    return Err(Error::RankMismatch(a.len(), b.len()));
                }
                Ok(Finite(a.iter().zip(b).map(|(x, y)| x.add(y)).collect()))
            }
        }
    }

    pub fn neg(&self) -> GroupElement {
        match self {
            GroupElement::PlusInfinity => GroupElement::MinusInfinity,
            GroupElement::MinusInfinity => GroupElement::PlusInfinity,
            GroupElement::Finite(v) => GroupElement::Finite(v.iter().map(Scalar::neg).collect()),
        }
    }

    pub fn sub(&self, other: &GroupElement) -> Result<GroupElement> {
        self.add(&other.neg())
    }

    /// Multiplication by a rational; infinities keep or flip their sign.
    pub fn scale(&self, c: &Rational) -> GroupElement {
        match self {
            GroupElement::Finite(v) => GroupElement::Finite(v.iter().map(|s| s.scale(c)).collect()),
            inf if c.is_negative() => inf.neg(),
            inf => inf.clone(),
        }
    }

    pub fn mul_int(&self, n: i64) -> GroupElement {
        self.scale(&Rational::from_integer(n.into()))
    }

    pub fn mul_big(&self, n: &BigInt) -> GroupElement {
        self.scale(&Rational::from_integer(n.clone()))
    }

    pub fn div_by_positive_int(&self, n: i64) -> Result<GroupElement> {
        if n < 1 {
            return Err(Error::DivideByNonPositive(n));
        }
        if !self.is_finite() {
            return Err(Error::SentinelOperand);
        }
        Ok(self.scale(&Rational::new(1.into(), n.into())))
    }

    /// Embed as `(head, self)` in a group of rank one higher.
    pub fn prepend(&self, head: Scalar) -> GroupElement {
        match self {
            GroupElement::Finite(v) => {
                let mut w = Vec::with_capacity(v.len() + 1);
                w.push(head);
                w.extend(v.iter().cloned());
                GroupElement::Finite(w)
            }
            inf => inf.clone(),
        }
    }

    /// Drop the leading coordinate.
    pub fn tail(&self) -> GroupElement {
        match self {
            GroupElement::Finite(v) if v.len() > 1 => GroupElement::Finite(v[1..].to_vec()),
            other => other.clone(),
        }
    }

    pub fn parse(s: &str, group: &ValueGroup) -> Result<GroupElement> {
        let t = s.trim();
        match t {
            "+inf" | "inf" | "+∞" | "∞" => return Ok(GroupElement::PlusInfinity),
            "-inf" | "-∞" => return Ok(GroupElement::MinusInfinity),
            _ => {}
        }
        let inner = match t.strip_prefix('(') {
            Some(rest) => rest
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced parenthesis in `{s}`")))?,
            None => t,
        };
        let entries = inner.split(',').map(|p| Scalar::parse(p, group)).collect::<Result<Vec<_>>>()?;
        Ok(GroupElement::Finite(entries))
    }
}

impl Ord for GroupElement {
    /// Total order. Panics on rank mismatch or an undecidable comparison;
    /// use [`GroupElement::compare`] to handle those cases.
    fn cmp(&self, other: &Self) -> Ordering {
        self.compare(other).expect("group elements must be comparable")
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.compare(other).ok()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::PlusInfinity => write!(f, "+inf"),
            GroupElement::MinusInfinity => write!(f, "-inf"),
            GroupElement::Finite(v) if v.len() == 1 => write!(f, "{}", v[0]),
            GroupElement::Finite(v) => {
                write!(f, "(")?;
                for (i, s) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Minimum of a non-empty iterator of comparable values.
pub fn min_value<'a>(it: impl IntoIterator<Item = &'a GroupElement>) -> Result<GroupElement> {
    let mut best: Option<&GroupElement> = None;
    for v in it {
        best = match best {
            None => Some(v),
            Some(b) => Some(if v.compare(b)? == Ordering::Less { v } else { b }),
        };
    }
    Ok(best.cloned().unwrap_or(GroupElement::PlusInfinity))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ge(s: &str) -> GroupElement {
        GroupElement::parse(s, &ValueGroup::default()).unwrap()
    }

    #[test]
    fn lex_order() {
        assert_eq!(ge("(0, 1+pi)").cmp(&ge("(1, 0)")), Ordering::Less);
        assert_eq!(ge("2+2*pi").cmp(&ge("5")), Ordering::Greater);
        assert_eq!(ge("-inf").cmp(&ge("(0, -100)")), Ordering::Less);
        assert_eq!(ge("(1)").compare(&ge("(1, 2)")), Err(Error::RankMismatch(1, 2)));
    }

    #[test]
    fn arithmetic() {
        let d = ge("(1, 0)").sub(&ge("(0, 1+pi)")).unwrap();
        assert_eq!(d.to_string(), "(1, -1 - pi)");
        assert_eq!(ge("(1, 0)").div_by_positive_int(2).unwrap().to_string(), "(1/2, 0)");
        assert_eq!(ge("3").div_by_positive_int(0), Err(Error::DivideByNonPositive(0)));
        assert_eq!(ge("+inf").add(&ge("7")).unwrap(), GroupElement::PlusInfinity);
        assert_eq!(GroupElement::PlusInfinity.div_by_positive_int(2), Err(Error::SentinelOperand));
    }

    #[test]
    fn print_parse_round_trip() {
        for s in ["(1, -1 - pi)", "2 + 2*pi", "+inf", "-inf", "(0, 0, 1/2*pi)"] {
            assert_eq!(ge(s).to_string(), s);
        }
    }
}
