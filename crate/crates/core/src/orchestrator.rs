//! The interleaved sequence: divisibility slices, key monomializations and
//! user targets, run round by round under a blow-up budget.

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use serde_json::{json, Value};

use crate::algebra::{exp_le, fmt_poly, fmt_uni, rf_from_json, rf_to_json, uni_from_json, uni_to_json};
use crate::algebra::{parse_poly, Exp, RationalFunction, UniPoly};
use crate::blowup::{certify_monomial, divide_monomials, monomialize_nondegenerate, Frame, FrameEvent, MonomialCertificate};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::puiseux::{monomialize_limit_successor, prepare_successor, puiseux_package};
use crate::successors::{SuccessorChain, SuccessorKind};
use crate::valuation::ValuationSpec;

pub const STATE_VERSION: u64 = 1;
const MAX_CHAIN: usize = 64;

/// Laurent monomials in `n` parameters ordered by `Σ|e_i|`, then
/// lexicographically, and the pairs of them.
#[derive(Clone, Debug)]
pub struct PairSchedule {
    n: usize,
    monomials: Vec<Exp>,
    next_norm: i64,
}

fn vectors_of_norm(n: usize, k: i64) -> Vec<Exp> {
    if n == 0 {
        return if k == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in -k..=k {
        for mut rest in vectors_of_norm(n - 1, k - first.abs()) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl PairSchedule {
    pub fn new(n: usize) -> Self {
        PairSchedule { n, monomials: Vec::new(), next_norm: 0 }
    }

    pub fn monomial(&mut self, k: usize) -> Exp {
        while self.monomials.len() <= k {
            let mut layer = vectors_of_norm(self.n, self.next_norm);
            layer.sort();
            self.monomials.extend(layer);
            self.next_norm += 1;
        }
        self.monomials[k].clone()
    }

    /// Pair number `p`, ordered by the later index then the earlier one.
    pub fn pair(&mut self, p: usize) -> (Exp, Exp) {
        let mut b = 1;
        let mut first = 0;
        while first + b <= p {
            first += b;
            b += 1;
        }
        (self.monomial(p - first), self.monomial(b))
    }
}

/// One pair of a slice: two monomials in the parameters of an earlier
/// frame, the first of no larger value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlicePair {
    pub frame: usize,
    pub index: usize,
    pub small: Exp,
    pub large: Exp,
}

#[derive(Clone, Debug)]
struct Snapshot {
    /// History length when the slice was opened.
    mark: usize,
    forward: Vec<RationalFunction>,
    values: Vec<GroupElement>,
}

/// Certificate for one element of a uniformization.
#[derive(Clone, Debug)]
pub struct Uniformization {
    /// Input positions in processing order; the first has least value.
    pub order: Vec<usize>,
    pub certificates: Vec<MonomialCertificate>,
}

impl Uniformization {
    /// `true` when the first monomial divides every other one.
    pub fn first_divides_all(&self) -> bool {
        let first = &self.certificates[0].monomial;
        self.certificates.iter().all(|c| exp_le(first, &c.monomial))
    }
}

fn task(name: impl Into<String>) -> impl FnOnce(Error) -> Error {
    let name = name.into();
    move |e| match e {
        Error::BudgetExceeded | Error::LimitSuccessorRequired(_) | Error::Task { .. } => e,
        other => Error::Task { task: name, source: Box::new(other) },
    }
}

/// State of the interleaved sequence.
#[derive(Clone, Debug)]
pub struct MasterState {
    spec: Arc<ValuationSpec>,
    frame: Frame,
    chain: SuccessorChain,
    keys_done: usize,
    limit_keys: VecDeque<UniPoly>,
    targets: VecDeque<RationalFunction>,
    target_certificates: Vec<MonomialCertificate>,
    schedule: PairSchedule,
    snapshots: Vec<Snapshot>,
    processed_pairs: Vec<SlicePair>,
    rounds: usize,
    budget: usize,
    log: Vec<String>,
}

impl MasterState {
    pub fn new(spec: impl Into<Arc<ValuationSpec>>, budget: usize) -> Result<Self> {
        let spec = spec.into();
        let mut frame = Frame::new(spec.clone())?;
        frame.set_step_limit(Some(budget));
        let n = frame.len();
        Ok(MasterState {
            chain: SuccessorChain::start(&spec),
            spec,
            frame,
            keys_done: 1,
            limit_keys: VecDeque::new(),
            targets: VecDeque::new(),
            target_certificates: Vec::new(),
            schedule: PairSchedule::new(n),
            snapshots: Vec::new(),
            processed_pairs: Vec::new(),
            rounds: 0,
            budget,
            log: Vec::new(),
        })
    }

    pub fn spec(&self) -> &Arc<ValuationSpec> {
        &self.spec
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn chain(&self) -> &SuccessorChain {
        &self.chain
    }

    pub fn keys_done(&self) -> usize {
        self.keys_done
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn slices_done(&self) -> usize {
        self.snapshots.len()
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn set_budget(&mut self, budget: usize) {
        self.budget = budget;
        self.frame.set_step_limit(Some(budget));
    }

    pub fn log(&self) -> &[String] {
        &self.log
    }

    pub fn processed_pairs(&self) -> &[SlicePair] {
        &self.processed_pairs
    }

    pub fn target_certificates(&self) -> &[MonomialCertificate] {
        &self.target_certificates
    }

    /// Queue an element of the coefficient ring.
    pub fn push_target(&mut self, f: RationalFunction) {
        self.targets.push_back(f);
    }

    /// Offer a successor to use when the chain reaches a limit point.
    pub fn push_limit_key(&mut self, q: UniPoly) {
        self.limit_keys.push_back(q);
    }

    /// Pairs of slice `j`: the first `j + 1` pairs over frame `j` and pair
    /// `j` over each earlier frame. Frame `j` must already be recorded.
    pub fn enumerate_pairs(&mut self, j: usize) -> Result<Vec<SlicePair>> {
        if j >= self.snapshots.len() {
            return Err(Error::Precondition(format!("slice {j} has not been opened")));
        }
        let mut out = Vec::new();
        let mut wanted: Vec<(usize, usize)> = (0..=j).map(|m| (j, m)).collect();
        wanted.extend((0..j).map(|m| (m, j)));
        for (frame, index) in wanted {
            let (a, b) = self.schedule.pair(index);
            let values = &self.snapshots[frame].values;
            let value = |e: &Exp| -> Result<GroupElement> {
                let mut acc = self.spec.zero_value();
                for (k, v) in e.iter().zip(values) {
                    acc = acc.add(&v.mul_int(*k))?;
                }
                Ok(acc)
            };
            let (small, large) = if value(&a)?.compare(&value(&b)?)? == Ordering::Greater { (b, a) } else { (a, b) };
            out.push(SlicePair { frame, index, small, large });
        }
        Ok(out)
    }

    fn monomial_in_snapshot(&self, frame: usize, e: &Exp) -> Result<RationalFunction> {
        let vars = self.spec.vars();
        let mut acc = RationalFunction::one(vars);
        for (k, f) in e.iter().zip(&self.snapshots[frame].forward) {
            if *k != 0 {
                acc = &acc * &f.pow(*k)?;
            }
        }
        Ok(acc)
    }

    fn process_pair(&mut self, p: &SlicePair) -> Result<()> {
        let s1 = self.monomial_in_snapshot(p.frame, &p.small)?;
        let s2 = self.monomial_in_snapshot(p.frame, &p.large)?;
        let ratio = self.frame.substitute(&s2.checked_div(&s1)?)?;
        let (e, unit) = self.frame.split(&ratio)?;
        if !self.frame.value_of(&unit)?.is_zero() {
            return Err(Error::InvariantViolation("earlier monomials are not monomial in the current frame".into()));
        }
        let neg: Exp = e.iter().map(|x| (-x).max(0)).collect();
        let pos: Exp = e.iter().map(|x| (*x).max(0)).collect();
        let out = divide_monomials(&mut self.frame, &neg, &pos)?;
        if !out.first_divides() {
            return Err(Error::InvariantViolation("pair does not divide after the loop".into()));
        }
        Ok(())
    }

    fn key_is_monomial(&self, i: usize) -> Result<bool> {
        if self.frame.backward().is_none() {
            return Ok(false);
        }
        let g = self.frame.substitute(&self.chain.keys[i].to_rf())?;
        let (_, unit) = self.frame.split(&g)?;
        Ok(self.frame.value_of(&unit)?.is_zero())
    }

    fn monomialize_key(&mut self, i: usize) -> Result<()> {
        if self.key_is_monomial(i)? {
            self.log.push(format!("key {i} already monomial"));
            return Ok(());
        }
        let prev = self.chain.keys[i - 1].clone();
        let key = self.chain.keys[i].clone();
        match self.chain.certificates[i - 1].kind {
            SuccessorKind::Limit => {
                let out = monomialize_limit_successor(&mut self.frame, &prev, &key)?;
                self.log.push(format!("key {i}: limit recipe, {} steps", out.trace.events.len()));
            }
            _ => {
                prepare_successor(&mut self.frame, &prev, &key)?;
                let out = puiseux_package(&mut self.frame, &key)?;
                self.log.push(format!("key {i}: package of {} steps", out.trace.events.len()));
            }
        }
        Ok(())
    }

    /// One round: a divisibility slice, the next pending key, the next
    /// queued target.
    pub fn advance(&mut self) -> Result<()> {
        if self.frame.blowups() >= self.budget {
            return Err(Error::BudgetExceeded);
        }
        let j = self.snapshots.len();
        if self.frame.backward().is_some() {
            let mark = self.frame.history().len();
            self.snapshots.push(Snapshot { mark, forward: self.frame.forward().to_vec(), values: self.frame.values().to_vec() });
            for p in self.enumerate_pairs(j)? {
                self.process_pair(&p).map_err(task(format!("slice {j} pair {}:{}", p.frame, p.index)))?;
                self.processed_pairs.push(p);
            }
        } else {
            self.log.push(format!("round {}: slices suspended after re-framing", self.rounds));
        }
        if self.keys_done < self.chain.keys.len() {
            let i = self.keys_done;
            self.monomialize_key(i).map_err(task(format!("key {i}")))?;
            self.keys_done += 1;
        }
        if let Some(t) = self.targets.pop_front() {
            let n = self.frame.distinguished();
            let saved = self.frame.protected().clone();
            let mut p = saved.clone();
            p.insert(n);
            self.frame.set_protected(p);
            let out = monomialize_nondegenerate(&mut self.frame, &t);
            self.frame.set_protected(saved);
            self.target_certificates.push(out.map_err(task("target"))?);
        }
        self.rounds += 1;
        Ok(())
    }

    /// Extend the chain until its last key has `ε` at least `ε(f)`.
    pub fn extend_chain_for(&mut self, f: &UniPoly) -> Result<()> {
        let target = self.spec.epsilon(f)?.epsilon;
        loop {
            let last = self.spec.epsilon(self.chain.last())?.epsilon;
            if last.compare(&target)? != Ordering::Less {
                return Ok(());
            }
            if self.chain.keys.len() >= MAX_CHAIN {
                return Err(Error::InvariantViolation("successor chain grew past its cap".into()));
            }
            let spec = self.spec.clone();
            match self.chain.extend(&spec) {
                Ok(_) => {}
                Err(Error::MaximalKey) => return Ok(()),
                Err(Error::NotASuccessor(_) | Error::NonPolynomialMultiplier) => match self.limit_keys.pop_front() {
                    Some(k) => {
                        self.chain.push_limit(&spec, k).map_err(task("limit key"))?;
                    }
                    None => return Err(Error::LimitSuccessorRequired(fmt_uni(self.chain.last()))),
                },
                Err(e) => return Err(task("chain extension")(e)),
            }
        }
    }

    /// Monomialize `f` in the shared frame.
    pub fn monomialize(&mut self, f: &UniPoly) -> Result<MonomialCertificate> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        self.extend_chain_for(f)?;
        while self.keys_done < self.chain.keys.len() {
            self.advance()?;
        }
        let rf = f.to_rf();
        if let Some(c) = certify_monomial(&self.frame, &rf).map_err(task("certify"))? {
            return Ok(c);
        }
        monomialize_nondegenerate(&mut self.frame, &rf).map_err(task(format!("monomialize {}", fmt_uni(f))))
    }

    /// Monomialize every element of `fs` and make the one of least value
    /// divide the others.
    pub fn embedded_uniformize(&mut self, fs: &[UniPoly]) -> Result<Uniformization> {
        if fs.is_empty() {
            return Err(Error::Precondition("nothing to uniformize".into()));
        }
        let mut keyed = Vec::with_capacity(fs.len());
        for (i, f) in fs.iter().enumerate() {
            if f.is_zero() {
                return Err(Error::ZeroPolynomial);
            }
            keyed.push((self.spec.value_uni(f)?, i));
        }
        let mut order: Vec<usize> = (0..fs.len()).collect();
        let mut cmp_err = None;
        order.sort_by(|&a, &b| {
            keyed[a].0.compare(&keyed[b].0).unwrap_or_else(|e| {
                cmp_err = Some(e);
                Ordering::Equal
            })
        });
        if let Some(e) = cmp_err {
            return Err(e);
        }
        for &i in &order {
            self.monomialize(&fs[i])?;
        }
        let certify_all = |frame: &Frame| -> Result<Vec<MonomialCertificate>> {
            order
                .iter()
                .map(|&i| {
                    certify_monomial(frame, &fs[i].to_rf())?
                        .ok_or_else(|| Error::InvariantViolation(format!("`{}` stopped being monomial", fmt_uni(&fs[i]))))
                })
                .collect()
        };
        let mut certs = certify_all(&self.frame).map_err(task("uniformize"))?;
        for k in 1..certs.len() {
            if !exp_le(&certs[0].monomial, &certs[k].monomial) {
                let out = divide_monomials(&mut self.frame, &certs[0].monomial, &certs[k].monomial)
                    .map_err(task(format!("divide element {}", order[k])))?;
                if !out.first_divides() {
                    return Err(Error::InvariantViolation("least element does not divide after the loop".into()));
                }
                certs = certify_all(&self.frame).map_err(task("uniformize"))?;
            }
        }
        let u = Uniformization { order, certificates: certs };
        if !u.first_divides_all() {
            return Err(Error::InvariantViolation("divisibility lost after later steps".into()));
        }
        Ok(u)
    }

    /// Versioned state for resumption.
    pub fn to_json(&self) -> Value {
        let events: Vec<Value> = self
            .frame
            .history()
            .iter()
            .map(|e| match e {
                FrameEvent::Blowup(s) => json!({ "blowup": s.center }),
                FrameEvent::Reframe(r) => json!({ "reframe": r.slot, "param": fmt_poly(&r.in_params) }),
            })
            .collect();
        json!({
            "version": STATE_VERSION,
            "spec": self.spec.to_json(),
            "budget": self.budget,
            "events": events,
            "protected": self.frame.protected().iter().collect::<Vec<_>>(),
            "chain": self.chain.to_json(),
            "keys_done": self.keys_done,
            "slice_marks": self.snapshots.iter().map(|s| s.mark).collect::<Vec<_>>(),
            "rounds": self.rounds,
            "limit_keys": self.limit_keys.iter().map(uni_to_json).collect::<Vec<_>>(),
            "targets": self.targets.iter().map(rf_to_json).collect::<Vec<_>>(),
            "log": self.log,
        })
    }

    /// Restore a state written by [`MasterState::to_json`]; the frame is
    /// rebuilt by replaying its events and the chain by re-deriving it.
    pub fn from_json(v: &Value) -> Result<Self> {
        let version = v.get("version").and_then(Value::as_u64).unwrap_or(0);
        if version != STATE_VERSION {
            return Err(Error::Parse(format!("unsupported state version {version}")));
        }
        let field = |k: &str| v.get(k).ok_or_else(|| Error::Parse(format!("state needs `{k}`")));
        let spec = Arc::new(ValuationSpec::from_json(field("spec")?)?);
        let budget = field("budget")?.as_u64().ok_or_else(|| Error::Parse("budget".into()))? as usize;
        let mut st = MasterState::new(spec.clone(), budget)?;
        let vars = spec.vars().clone();
        let keys = field("chain")?
            .get("keys")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("chain needs `keys`".into()))?
            .iter()
            .map(|k| uni_from_json(k, &vars))
            .collect::<Result<Vec<_>>>()?;
        let kinds: Vec<String> = field("chain")?
            .get("certificates")
            .and_then(Value::as_array)
            .map(|a| a.iter().map(|c| c.get("kind").and_then(Value::as_str).unwrap_or("").to_string()).collect())
            .unwrap_or_default();
        for (i, k) in keys.iter().enumerate().skip(1) {
            if kinds.get(i - 1).map(String::as_str) == Some("limit") {
                st.chain.push_limit(&spec, k.clone())?;
            } else {
                st.chain.extend(&spec)?;
                if st.chain.last() != k {
                    return Err(Error::Parse(format!("key {i} does not match the re-derived chain")));
                }
            }
        }
        let marks: Vec<usize> = field("slice_marks")?
            .as_array()
            .ok_or_else(|| Error::Parse("slice_marks".into()))?
            .iter()
            .filter_map(|x| x.as_u64().map(|u| u as usize))
            .collect();
        let events = field("events")?.as_array().ok_or_else(|| Error::Parse("events".into()))?;
        let mut marks_left = marks.iter().peekable();
        let mut take_snapshots = |st: &mut MasterState| {
            while marks_left.peek().is_some_and(|&&m| m == st.frame.history().len()) {
                marks_left.next();
                let mark = st.frame.history().len();
                st.snapshots.push(Snapshot { mark, forward: st.frame.forward().to_vec(), values: st.frame.values().to_vec() });
            }
        };
        for e in events {
            take_snapshots(&mut st);
            if let Some(center) = e.get("blowup").and_then(Value::as_array) {
                let c: Vec<usize> = center.iter().filter_map(|x| x.as_u64().map(|u| u as usize)).collect();
                st.frame.blowup(&c)?;
            } else if let Some(slot) = e.get("reframe").and_then(Value::as_u64) {
                let s = e.get("param").and_then(Value::as_str).ok_or_else(|| Error::Parse("reframe param".into()))?;
                let t = parse_poly(s, st.frame.params())?;
                let original = st.frame.pull_back(&RationalFunction::from_poly(t.clone()))?;
                st.frame.reframe(slot as usize, t, original)?;
            } else {
                return Err(Error::Parse("unknown frame event".into()));
            }
        }
        take_snapshots(&mut st);
        if st.snapshots.len() != marks.len() {
            return Err(Error::Parse("slice marks do not match the events".into()));
        }
        if let Some(p) = v.get("protected").and_then(Value::as_array) {
            let set: BTreeSet<usize> = p.iter().filter_map(|x| x.as_u64().map(|u| u as usize)).collect();
            st.frame.set_protected(set);
        }
        st.keys_done = field("keys_done")?.as_u64().unwrap_or(1) as usize;
        st.rounds = field("rounds")?.as_u64().unwrap_or(0) as usize;
        if let Some(a) = v.get("limit_keys").and_then(Value::as_array) {
            for k in a {
                st.limit_keys.push_back(uni_from_json(k, &vars)?);
            }
        }
        if let Some(a) = v.get("targets").and_then(Value::as_array) {
            for t in a {
                st.targets.push_back(rf_from_json(t, &vars)?);
            }
        }
        if let Some(a) = v.get("log").and_then(Value::as_array) {
            st.log = a.iter().filter_map(|x| x.as_str().map(String::from)).collect();
        }
        Ok(st)
    }
}

/// Monomialize `f` from a fresh state.
pub fn monomialize(spec: impl Into<Arc<ValuationSpec>>, f: &UniPoly, budget: usize) -> Result<(MasterState, MonomialCertificate)> {
    let mut st = MasterState::new(spec, budget)?;
    let c = st.monomialize(f)?;
    Ok((st, c))
}

pub fn embedded_uniformize(
    spec: impl Into<Arc<ValuationSpec>>,
    fs: &[UniPoly],
    budget: usize,
) -> Result<(MasterState, Uniformization)> {
    let mut st = MasterState::new(spec, budget)?;
    let u = st.embedded_uniformize(fs)?;
    Ok((st, u))
}

/// Exact check that a certificate's monomial carries the value of `f`.
pub fn certificate_matches(spec: &ValuationSpec, frame: &Frame, f: &UniPoly, c: &MonomialCertificate) -> Result<bool> {
    let v = spec.value_uni(f)?;
    Ok(frame.monomial_value(&c.monomial)?.compare(&v)? == Ordering::Equal && c.unit_value.is_zero())
}
