use std::cmp::Ordering;
use std::sync::Arc;

use crate::algebra::{MultiPoly, RationalFunction, UniPoly, Vars};
use crate::error::{Error, Result};
use crate::group::{min_value, GroupElement, Scalar, ValueGroup};

/// Finite description of a valuation on `ℚ(vars)`.
#[derive(Clone, Debug)]
pub enum SpecKind {
    /// `ν(Σ c_e u^e) = min_e Σ e_i·w_i`.
    Monomial { weights: Vec<GroupElement> },
    /// `f ↦ (n, inner(p_n))` with `p_n` the first nonzero coefficient of
    /// the key-expansion of `f`.
    Composite { key: UniPoly, inner: Arc<ValuationSpec> },
    /// `f ↦ min_j (base(f_j) + j·assigned)` over the key-expansion.
    Augmented { base: Arc<ValuationSpec>, key: UniPoly, assigned: GroupElement },
}

#[derive(Clone, Debug)]
pub struct ValuationSpec {
    group: ValueGroup,
    vars: Vars,
    x_var: usize,
    rank: usize,
    kind: SpecKind,
}

fn check_key(key: &UniPoly, vars: &Vars) -> Result<()> {
    if key.vars() != vars {
        return Err(Error::InvalidSpec("key uses a different variable list".into()));
    }
    if !key.is_monic() {
        return Err(Error::NonMonicKey);
    }
    if key.deg() == 0 {
        return Err(Error::InvalidSpec("key has degree zero".into()));
    }
    Ok(())
}

impl ValuationSpec {
    pub fn monomial(group: ValueGroup, vars: Vars, weights: Vec<GroupElement>) -> Result<Self> {
        if weights.len() != vars.len() || vars.is_empty() {
            return Err(Error::InvalidSpec("one weight per variable is required".into()));
        }
        let rank = weights[0].rank().ok_or_else(|| Error::InvalidSpec("infinite weight".into()))?;
        for (w, v) in weights.iter().zip(vars.iter()) {
            if w.rank() != Some(rank) {
                return Err(Error::InvalidSpec(format!("weight of `{v}` has the wrong rank")));
            }
            if w.compare(&GroupElement::zero(rank))? != Ordering::Greater {
                return Err(Error::InvalidSpec(format!("weight of `{v}` is not positive")));
            }
        }
        let x_var = vars.len() - 1;
        Ok(ValuationSpec { group, vars, x_var, rank, kind: SpecKind::Monomial { weights } })
    }

    pub fn composite(inner: impl Into<Arc<ValuationSpec>>, key: UniPoly) -> Result<Self> {
        let inner = inner.into();
        check_key(&key, &inner.vars)?;
        Ok(ValuationSpec {
            group: inner.group.clone(),
            vars: inner.vars.clone(),
            x_var: inner.x_var,
            rank: inner.rank + 1,
            kind: SpecKind::Composite { key, inner },
        })
    }

    pub fn augmented(base: impl Into<Arc<ValuationSpec>>, key: UniPoly, assigned: GroupElement) -> Result<Self> {
        let base = base.into();
        check_key(&key, &base.vars)?;
        if assigned.rank() != Some(base.rank) {
            return Err(Error::InvalidSpec("assigned value has the wrong rank".into()));
        }
        let old = base.value_uni(&key)?;
        if assigned.compare(&old)? != Ordering::Greater {
            return Err(Error::InvalidSpec(format!("assigned value {assigned} does not exceed {old}")));
        }
        Ok(ValuationSpec {
            group: base.group.clone(),
            vars: base.vars.clone(),
            x_var: base.x_var,
            rank: base.rank,
            kind: SpecKind::Augmented { base, key, assigned },
        })
    }

    /// Choose the distinguished variable `X` (defaults to the last one).
    pub fn with_distinguished(mut self, var: usize) -> Result<Self> {
        if var >= self.vars.len() {
            return Err(Error::BadIndex(var));
        }
        self.x_var = var;
        Ok(self)
    }

    pub fn group(&self) -> &ValueGroup {
        &self.group
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn x_var(&self) -> usize {
        self.x_var
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn kind(&self) -> &SpecKind {
        &self.kind
    }

    pub fn zero_value(&self) -> GroupElement {
        GroupElement::zero(self.rank)
    }

    /// The monomial valuation at the bottom of the tower.
    pub fn base_monomial(&self) -> &ValuationSpec {
        match &self.kind {
            SpecKind::Monomial { .. } => self,
            SpecKind::Composite { inner, .. } => inner.base_monomial(),
            SpecKind::Augmented { base, .. } => base.base_monomial(),
        }
    }

    /// Keys of the tower, innermost first.
    pub fn keys(&self) -> Vec<&UniPoly> {
        match &self.kind {
            SpecKind::Monomial { .. } => Vec::new(),
            SpecKind::Composite { key, inner } => {
                let mut v = inner.keys();
                v.push(key);
                v
            }
            SpecKind::Augmented { base, key, .. } => {
                let mut v = base.keys();
                v.push(key);
                v
            }
        }
    }

    pub fn x(&self) -> UniPoly {
        UniPoly::x(&self.vars, self.x_var)
    }

    /// Parse a group element against this spec's generators.
    pub fn parse_value(&self, s: &str) -> Result<GroupElement> {
        let v = GroupElement::parse(s, &self.group)?;
        if v.is_finite() && v.rank() != Some(self.rank) {
            return Err(Error::RankMismatch(v.rank().unwrap_or(0), self.rank));
        }
        Ok(v)
    }

    pub fn value(&self, f: &RationalFunction) -> Result<GroupElement> {
        if f.is_zero() {
            return Ok(GroupElement::PlusInfinity);
        }
        let n = self.value_poly(f.num())?;
        if f.den().is_one() {
            return Ok(n);
        }
        n.sub(&self.value_poly(f.den())?)
    }

    pub fn value_poly(&self, p: &MultiPoly) -> Result<GroupElement> {
        if p.is_zero() {
            return Ok(GroupElement::PlusInfinity);
        }
        match &self.kind {
            SpecKind::Monomial { weights } => {
                let vals = p.terms().map(|(e, _)| monomial_value(weights, e, self.rank)).collect::<Result<Vec<_>>>()?;
                min_value(&vals)
            }
            SpecKind::Composite { key, .. } | SpecKind::Augmented { key, .. } => {
                if !p.is_laurent_free() {
                    return self.value(&RationalFunction::from_poly(p.clone()));
                }
                self.value_uni(&UniPoly::from_poly(p, key.var())?)
            }
        }
    }

    /// Value of a polynomial in one variable over rational-function
    /// coefficients.
    pub fn value_uni(&self, p: &UniPoly) -> Result<GroupElement> {
        if p.is_zero() {
            return Ok(GroupElement::PlusInfinity);
        }
        match &self.kind {
            SpecKind::Monomial { weights } => {
                let w = &weights[p.var()];
                let mut vals = Vec::new();
                for (d, c) in p.coeffs().iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    vals.push(self.value(c)?.add(&w.mul_int(d as i64))?);
                }
                min_value(&vals)
            }
            SpecKind::Composite { key, inner } => {
                let p = self.align(p, key)?;
                let parts = p.q_expansion(key)?;
                let (n, pn) = parts
                    .iter()
                    .enumerate()
                    .find(|(_, q)| !q.is_zero())
                    .ok_or(Error::ZeroPolynomial)?;
                Ok(inner.value_uni(pn)?.prepend(Scalar::int(n as i64)))
            }
            SpecKind::Augmented { base, key, assigned } => {
                let p = self.align(p, key)?;
                let parts = p.q_expansion(key)?;
                let mut vals = Vec::new();
                for (j, q) in parts.iter().enumerate() {
                    if !q.is_zero() {
                        vals.push(base.value_uni(q)?.add(&assigned.mul_int(j as i64))?);
                    }
                }
                min_value(&vals)
            }
        }
    }

    /// Re-view `p` as a polynomial in the key's variable.
    fn align(&self, p: &UniPoly, key: &UniPoly) -> Result<UniPoly> {
        if p.var() == key.var() {
            Ok(p.clone())
        } else {
            UniPoly::from_rf(&p.to_rf(), key.var())
        }
    }

    /// Value of the variable `vars[i]`.
    pub fn var_value(&self, i: usize) -> Result<GroupElement> {
        self.value(&RationalFunction::var(&self.vars, i))
    }
}

pub(crate) fn monomial_value(weights: &[GroupElement], e: &[i64], rank: usize) -> Result<GroupElement> {
    let mut acc = GroupElement::zero(rank);
    for (w, &k) in weights.iter().zip(e) {
        if k != 0 {
            acc = acc.add(&w.mul_int(k))?;
        }
    }
    Ok(acc)
}
