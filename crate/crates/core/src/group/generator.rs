//! Independent real generators of the value group and their certified
//! rational enclosures.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// Closed rational interval `[lo, hi]` enclosing a real number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn point(q: Rational) -> Self {
        Interval { lo: q.clone(), hi: q }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn scale(&self, c: &Rational) -> Interval {
        if c.is_negative() {
            Interval { lo: &self.hi * c, hi: &self.lo * c }
        } else {
            Interval { lo: &self.lo * c, hi: &self.hi * c }
        }
    }
}

/// User-supplied refinement callback: given a precision in bits, return an
/// enclosure of width at most `2^-bits`.
pub type Refiner = Arc<dyn Fn(u32) -> Interval + Send + Sync>;

#[derive(Clone)]
pub enum GeneratorKind {
    Pi,
    E,
    /// Square root of a positive rational that is not a rational square.
    Sqrt(Rational),
    Custom(Refiner),
}

impl fmt::Debug for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorKind::Pi => write!(f, "Pi"),
            GeneratorKind::E => write!(f, "E"),
            GeneratorKind::Sqrt(q) => write!(f, "Sqrt({q})"),
            GeneratorKind::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// Number of refinement levels tried before a comparison gives up. Level `k`
/// asks for `base_bits << k` bits.
pub const MAX_LEVEL: u32 = 9;

/// An irrational generator, treated as ℚ-linearly independent from `1` and
/// from every other declared generator.
pub struct Generator {
    name: String,
    kind: GeneratorKind,
    base_bits: u32,
    cache: Mutex<BTreeMap<u32, Interval>>,
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Generator").field("name", &self.name).field("kind", &self.kind).finish()
    }
}

impl Generator {
    pub fn new(name: impl Into<String>, kind: GeneratorKind) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::InvalidGenerator(format!("bad name `{name}`")));
        }
        if name.chars().next().is_some_and(|c| c.is_ascii_digit()) {
            return Err(Error::InvalidGenerator(format!("name `{name}` starts with a digit")));
        }
        if let GeneratorKind::Sqrt(q) = &kind {
            if !q.is_positive() {
                return Err(Error::InvalidGenerator(format!("sqrt of non-positive {q}")));
            }
            let n = q.numer() * q.denom();
            let r = n.sqrt();
            if &r * &r == n {
                return Err(Error::InvalidGenerator(format!("sqrt({q}) is rational")));
            }
        }
        Ok(Generator { name, kind, base_bits: default_bits(), cache: Mutex::new(BTreeMap::new()) })
    }

    pub fn with_base_bits(mut self, bits: u32) -> Self {
        self.base_bits = bits.max(8);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &GeneratorKind {
        &self.kind
    }

    /// Enclosure at refinement level `level`; level `k+1` is never wider
    /// than level `k`.
    pub fn enclosure(&self, level: u32) -> Interval {
        if let Some(iv) = self.cache.lock().expect("enclosure cache poisoned").get(&level) {
            return iv.clone();
        }
        let bits = self.base_bits.saturating_mul(1 << level.min(20));
        let raw = match &self.kind {
            GeneratorKind::Pi => pi_enclosure(bits),
            GeneratorKind::E => e_enclosure(bits),
            GeneratorKind::Sqrt(q) => sqrt_enclosure(q, bits),
            GeneratorKind::Custom(f) => f(bits),
        };
        let mut iv = dyadic_outward(&raw, bits + 4);
        if level > 0 {
            // intersect with the previous level so refinement is monotone
            let prev = self.enclosure(level - 1);
            if prev.lo > iv.lo {
                iv.lo = prev.lo;
            }
            if prev.hi < iv.hi {
                iv.hi = prev.hi;
            }
        }
        self.cache.lock().expect("enclosure cache poisoned").insert(level, iv.clone());
        iv
    }
}

fn default_bits() -> u32 {
    // digits * log2(10), rounded up
    std::env::var("VALMONO_PI_DIGITS")
        .ok()
        .and_then(|s| s.trim().parse::<u32>().ok())
        .map(|d| (d * 3322).div_ceil(1000).max(16))
        .unwrap_or(64)
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn floor_rat(q: &Rational) -> BigInt {
    q.floor().to_integer()
}

fn ceil_rat(q: &Rational) -> BigInt {
    q.ceil().to_integer()
}

fn dyadic_outward(iv: &Interval, bits: u32) -> Interval {
    let scale = Rational::from_integer(pow2(bits));
    let lo = floor_rat(&(&iv.lo * &scale));
    let hi = ceil_rat(&(&iv.hi * &scale));
    Interval {
        lo: Rational::new(lo, pow2(bits)),
        hi: Rational::new(hi, pow2(bits)),
    }
}

/// atan(1/x) enclosed by partial sums of the alternating Taylor series.
fn atan_inv(x: i64, bits: u32) -> Interval {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let eps = Rational::new(BigInt::one(), pow2(bits + 8));
    let mut sum = Rational::zero();
    let mut power = x.clone(); // x^(2k+1)
    let mut k: u64 = 0;
    loop {
        let term = Rational::new(BigInt::one(), &power * BigInt::from(2 * k + 1));
        if term < eps {
            // remainder is bounded by the first omitted term, with the sign of that term
            return if k.is_multiple_of(2) {
                Interval { lo: sum.clone(), hi: sum + term }
            } else {
                Interval { lo: &sum - &term, hi: sum }
            };
        }
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power *= &x2;
        k += 1;
    }
}

fn pi_enclosure(bits: u32) -> Interval {
    // Machin: pi = 16 atan(1/5) - 4 atan(1/239)
    let a = atan_inv(5, bits + 6).scale(&Rational::from_integer(16.into()));
    let b = atan_inv(239, bits + 6).scale(&Rational::from_integer((-4).into()));
    a.add(&b)
}

fn e_enclosure(bits: u32) -> Interval {
    let eps = Rational::new(BigInt::one(), pow2(bits + 4));
    let mut sum = Rational::zero();
    let mut fact = BigInt::one();
    let mut k: u64 = 0;
    loop {
        let term = Rational::new(BigInt::one(), fact.clone());
        if k > 1 && term < eps {
            // tail after k-1 is at most 2/k!
            return Interval { lo: sum.clone(), hi: sum + term * Rational::from_integer(2.into()) };
        }
        sum += term;
        k += 1;
        fact *= BigInt::from(k);
    }
}

fn sqrt_enclosure(q: &Rational, bits: u32) -> Interval {
    // sqrt(p/d) = sqrt(p*d)/d
    let n = q.numer() * q.denom();
    let scaled = n << (2 * bits as usize);
    let r = scaled.sqrt();
    let den = q.denom() * pow2(bits);
    let lo = Rational::new(r.clone(), den.clone());
    let hi = Rational::new(r + BigInt::one(), den);
    Interval { lo, hi }
}

/// Shared handle to a generator; ordered and compared by name.
#[derive(Clone, Debug)]
pub struct GenRef(pub Arc<Generator>);

impl GenRef {
    pub fn name(&self) -> &str {
        self.0.name()
    }
}

impl PartialEq for GenRef {
    fn eq(&self, other: &Self) -> bool {
        self.0.name == other.0.name
    }
}
impl Eq for GenRef {}
impl PartialOrd for GenRef {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for GenRef {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.name.cmp(&other.0.name)
    }
}

/// Registry of the generators a value group is built on.
#[derive(Clone, Debug)]
pub struct ValueGroup {
    generators: BTreeMap<String, GenRef>,
}

impl Default for ValueGroup {
    fn default() -> Self {
        let mut g = ValueGroup::empty();
        g.register(Generator::new("pi", GeneratorKind::Pi).expect("pi is a valid generator"));
        g
    }
}

impl ValueGroup {
    pub fn empty() -> Self {
        ValueGroup { generators: BTreeMap::new() }
    }

    pub fn register(&mut self, g: Generator) -> GenRef {
        let r = GenRef(Arc::new(g));
        self.generators.insert(r.name().to_string(), r.clone());
        r
    }

    pub fn get(&self, name: &str) -> Result<GenRef> {
        self.generators.get(name).cloned().ok_or_else(|| Error::UnknownGenerator(name.into()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.generators.keys().map(|s| s.as_str())
    }

    pub fn generators(&self) -> impl Iterator<Item = &GenRef> {
        self.generators.values()
    }

    /// JSON description: `{"pi": "pi", "s2": {"sqrt": "2"}, "e": "e"}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        for (name, g) in &self.generators {
            let v = match g.0.kind() {
                GeneratorKind::Pi => serde_json::Value::String("pi".into()),
                GeneratorKind::E => serde_json::Value::String("e".into()),
                GeneratorKind::Sqrt(q) => serde_json::json!({ "sqrt": q.to_string() }),
                GeneratorKind::Custom(_) => serde_json::Value::String("custom".into()),
            };
            m.insert(name.clone(), v);
        }
        serde_json::Value::Object(m)
    }

    /// Parse the `group` object of a spec file. `pi` is always available.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let mut g = ValueGroup::default();
        let obj = match v {
            serde_json::Value::Null => return Ok(g),
            serde_json::Value::Object(o) => o.get("generators").and_then(|x| x.as_object()).unwrap_or(o),
            _ => return Err(Error::Parse("group must be an object".into())),
        };
        for (name, desc) in obj {
            let kind = match desc {
                serde_json::Value::String(s) if s == "pi" => GeneratorKind::Pi,
                serde_json::Value::String(s) if s == "e" => GeneratorKind::E,
                serde_json::Value::Object(o) if o.contains_key("sqrt") => {
                    let q = match &o["sqrt"] {
                        serde_json::Value::String(s) => crate::algebra::parse_rational(s)?,
                        serde_json::Value::Number(n) => crate::algebra::parse_rational(&n.to_string())?,
                        _ => return Err(Error::Parse("sqrt argument".into())),
                    };
                    GeneratorKind::Sqrt(q)
                }
                other => return Err(Error::Parse(format!("unsupported generator description {other}"))),
            };
            g.register(Generator::new(name.clone(), kind)?);
        }
        Ok(g)
    }
}

pub(crate) fn sign_of_interval(iv: &Interval) -> Option<Sign> {
    if iv.lo.is_positive() {
        Some(Sign::Plus)
    } else if iv.hi.is_negative() {
        Some(Sign::Minus)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn pi_enclosure_contains_known_digits() {
        let g = Generator::new("pi", GeneratorKind::Pi).unwrap();
        for level in 0..4 {
            let iv = g.enclosure(level);
            assert!(iv.lo < rat(3141593, 1000000));
            assert!(iv.hi > rat(3141592, 1000000));
            assert!(iv.width() < rat(1, 1 << 30));
        }
    }

    #[test]
    fn refinement_shrinks() {
        let g = Generator::new("s2", GeneratorKind::Sqrt(rat(2, 1))).unwrap();
        let a = g.enclosure(0);
        let b = g.enclosure(1);
        assert!(b.width() < a.width());
        assert!(a.lo <= b.lo && b.hi <= a.hi);
        assert!(&b.lo * &b.lo <= rat(2, 1) && &b.hi * &b.hi >= rat(2, 1));
    }

    #[test]
    fn rational_sqrt_rejected() {
        assert!(Generator::new("s4", GeneratorKind::Sqrt(rat(9, 4))).is_err());
        assert!(Generator::new("bad name", GeneratorKind::Pi).is_err());
    }

    #[test]
    fn e_enclosure_is_tight() {
        let g = Generator::new("e", GeneratorKind::E).unwrap();
        let iv = g.enclosure(0);
        assert!(iv.lo < rat(2718282, 1000000) && iv.hi > rat(2718281, 1000000));
    }
}
