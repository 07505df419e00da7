//! Text and JSON forms of polynomials and rational functions.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::multipoly::{grlex, MultiPoly, Vars};
use super::ratfunc::RationalFunction;
use super::unipoly::UniPoly;
use crate::error::{Error, Result};
use crate::Rational;

pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    match t.split_once('/') {
        Some((a, b)) => {
            let n: BigInt = a.trim().parse().map_err(|_| bad())?;
            let d: BigInt = b.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Canonical text: terms in decreasing graded-lex order, every coefficient
/// written out, e.g. `-1*x^2*y + 1*z^2`.
pub fn fmt_poly(p: &MultiPoly) -> String {
    fmt_poly_by(p, None)
}

/// As [`fmt_poly`], but with the powers of `main` (if given) decreasing
/// first.
pub fn fmt_poly_by(p: &MultiPoly, main: Option<usize>) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut terms: Vec<_> = p.terms().collect();
    terms.sort_by(|a, b| {
        let by_main = main.map(|m| b.0[m].cmp(&a.0[m])).unwrap_or(std::cmp::Ordering::Equal);
        by_main.then_with(|| grlex(b.0, a.0))
    });
    let mut out = String::new();
    for (i, (e, c)) in terms.iter().enumerate() {
        let mut body = fmt_rational(&c.abs());
        for (k, &x) in e.iter().enumerate() {
            match x {
                0 => {}
                1 => body.push_str(&format!("*{}", p.vars()[k])),
                _ => body.push_str(&format!("*{}^{}", p.vars()[k], x)),
            }
        }
        match (i, c.is_negative()) {
            (0, true) => out.push_str(&format!("-{body}")),
            (0, false) => out.push_str(&body),
            (_, true) => out.push_str(&format!(" - {body}")),
            (_, false) => out.push_str(&format!(" + {body}")),
        }
    }
    out
}

pub fn fmt_rf(f: &RationalFunction) -> String {
    if f.den().is_one() {
        return fmt_poly(f.num());
    }
    if let Some(l) = f.as_laurent_poly() {
        return fmt_poly(&l);
    }
    format!("({})/({})", fmt_poly(f.num()), fmt_poly(f.den()))
}

pub fn fmt_uni(p: &UniPoly) -> String {
    let f = p.to_rf();
    if f.den().is_one() {
        return fmt_poly_by(f.num(), Some(p.var()));
    }
    if let Some(l) = f.as_laurent_poly() {
        return fmt_poly_by(&l, Some(p.var()));
    }
    fmt_rf(&f)
}

pub fn rf_to_json(f: &RationalFunction) -> Value {
    match f.as_constant() {
        Some(c) => Value::String(fmt_rational(&c)),
        None => json!({ "num": fmt_poly(f.num()), "den": fmt_poly(f.den()) }),
    }
}

pub fn rf_from_json(v: &Value, vars: &Vars) -> Result<RationalFunction> {
    match v {
        Value::String(s) => parse_rf(s, vars),
        Value::Number(n) => parse_rf(&n.to_string(), vars),
        Value::Object(o) => {
            let get = |k: &str| {
                o.get(k)
                    .and_then(|x| x.as_str())
                    .ok_or_else(|| Error::Parse(format!("coefficient object needs string `{k}`")))
            };
            let num = parse_rf(get("num")?, vars)?;
            let den = parse_rf(get("den")?, vars)?;
            num.checked_div(&den)
        }
        other => Err(Error::Parse(format!("bad coefficient {other}"))),
    }
}

/// `{"var":"z","coeffs":[...]}` with coefficient `i` multiplying `z^i`.
pub fn uni_to_json(p: &UniPoly) -> Value {
    json!({
        "var": p.var_name(),
        "coeffs": p.coeffs().iter().map(rf_to_json).collect::<Vec<_>>(),
    })
}

pub fn uni_from_json(v: &Value, vars: &Vars) -> Result<UniPoly> {
    let name = v
        .get("var")
        .and_then(|x| x.as_str())
        .ok_or_else(|| Error::Parse("polynomial needs `var`".into()))?;
    let var = var_index(vars, name)?;
    let coeffs = v
        .get("coeffs")
        .and_then(|x| x.as_array())
        .ok_or_else(|| Error::Parse("polynomial needs `coeffs`".into()))?;
    let cs = coeffs.iter().map(|c| rf_from_json(c, vars)).collect::<Result<Vec<_>>>()?;
    if let Some(c) = cs.iter().find(|c| c.involves(var)) {
        return Err(Error::Parse(format!("coefficient `{}` involves `{name}`", fmt_rf(c))));
    }
    Ok(UniPoly::from_coeffs(vars, var, cs))
}

/// Accepts either the coefficient-list object or a plain expression string
/// (then `default_var` is the main variable).
pub fn uni_from_any(v: &Value, vars: &Vars, default_var: usize) -> Result<UniPoly> {
    match v {
        Value::String(s) => UniPoly::from_rf(&parse_rf(s, vars)?, default_var),
        Value::Object(_) => uni_from_json(v, vars),
        other => Err(Error::Parse(format!("bad polynomial {other}"))),
    }
}

pub fn var_index(vars: &Vars, name: &str) -> Result<usize> {
    vars.iter().position(|v| v == name).ok_or_else(|| Error::UnknownVariable(name.into()))
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = cs[st..i].iter().collect();
            out.push(Tok::Num(t.parse().map_err(|_| Error::Parse(t.clone()))?));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_' || cs[i] == '\'') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}` in `{s}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    vars: &'a Vars,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                acc = acc.checked_div(&self.unary()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction> {
        if self.eat('-') {
            return Ok(-&self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let k = match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    i64::try_from(n).map_err(|_| Error::Parse("exponent too large".into()))?
                }
                _ => return Err(Error::Parse("expected integer exponent".into())),
            };
            return base.pow(if neg { -k } else { k });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RationalFunction> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(RationalFunction::constant(self.vars, Rational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let i = var_index(self.vars, &name)?;
                Ok(RationalFunction::var(self.vars, i))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                Ok(e)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

pub fn parse_rf(s: &str, vars: &Vars) -> Result<RationalFunction> {
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0, vars };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input in `{s}`")));
    }
    Ok(e)
}

/// Parse a (Laurent) polynomial; fails if the expression has a
/// non-monomial denominator.
pub fn parse_poly(s: &str, vars: &Vars) -> Result<MultiPoly> {
    let f = parse_rf(s, vars)?;
    f.as_laurent_poly().ok_or_else(|| Error::Parse(format!("`{s}` is not a polynomial")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::multipoly::vars_of;

    #[test]
    fn printer_is_canonical() {
        let v = vars_of(&["x", "y", "z"]);
        let p = parse_poly("z^2 - x^2*y", &v).unwrap();
        assert_eq!(fmt_poly(&p), "-1*x^2*y + 1*z^2");
        assert_eq!(fmt_uni(&UniPoly::from_poly(&p, 2).unwrap()), "1*z^2 - 1*x^2*y");
        let q = parse_poly("-y*x^2 + 1/2", &v).unwrap();
        assert_eq!(fmt_poly(&q), "-1*x^2*y + 1/2");
        let l = parse_rf("z^2/(x^2*y)", &v).unwrap();
        assert_eq!(fmt_rf(&l), "1*x^-2*y^-1*z^2");
        assert_eq!(parse_rf(&fmt_rf(&l), &v).unwrap(), l);
        let r = parse_rf("1/(1+x)", &v).unwrap();
        assert_eq!(fmt_rf(&r), "(1)/(1*x + 1)");
    }

    #[test]
    fn uni_json_round_trip() {
        let v = vars_of(&["x", "y", "z"]);
        let src = r#"{"var":"z","coeffs":[{"num":"-1*x^2*y","den":"1"},"0","1"]}"#;
        let val: Value = serde_json::from_str(src).unwrap();
        let p = uni_from_json(&val, &v).unwrap();
        assert_eq!(p.deg(), 2);
        assert_eq!(serde_json::to_string(&uni_to_json(&p)).unwrap(), src);
    }

    #[test]
    fn parse_errors() {
        let v = vars_of(&["x"]);
        assert!(parse_rf("x +", &v).is_err());
        assert!(parse_rf("w", &v).is_err());
        assert!(parse_rf("1/0", &v).is_err());
        assert!(parse_poly("1/(1+x)", &v).is_err());
    }
}
