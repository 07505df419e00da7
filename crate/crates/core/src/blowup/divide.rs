use std::cmp::Ordering;

use super::frame::{apply, Frame};
use crate::algebra::{exp_le, Exp};
use crate::error::{Error, Result};
use crate::valuation::minimal_generators;

const LOOP_CAP: usize = 100_000;

/// Reduced pair of exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tau {
    /// `(|α̃|, |γ̃|)` with `|α̃| ≤ |γ̃|`.
    pub pair: (i64, i64),
    pub small: Exp,
    pub large: Exp,
    pub common: Exp,
    /// `true` when the smaller reduced vector came from the second input.
    pub swapped: bool,
}

pub fn tau(a: &[i64], b: &[i64]) -> Tau {
    let common: Exp = a.iter().zip(b).map(|(x, y)| *x.min(y)).collect();
    let ra: Exp = a.iter().zip(&common).map(|(x, d)| x - d).collect();
    let rb: Exp = b.iter().zip(&common).map(|(x, d)| x - d).collect();
    let (na, nb): (i64, i64) = (ra.iter().sum(), rb.iter().sum());
    if na <= nb {
        Tau { pair: (na, nb), small: ra, large: rb, common, swapped: false }
    } else {
        Tau { pair: (nb, na), small: rb, large: ra, common, swapped: true }
    }
}

pub fn comparable(a: &[i64], b: &[i64]) -> bool {
    exp_le(a, b) || exp_le(b, a)
}

/// Support of the small vector plus a minimal part of the large one whose
/// entries sum to at least the small vector's size.
pub fn select_center(t: &Tau) -> Vec<usize> {
    let mut center: Vec<usize> = (0..t.small.len()).filter(|&q| t.small[q] > 0).collect();
    let mut support: Vec<usize> = (0..t.large.len()).filter(|&q| t.large[q] > 0).collect();
    support.sort_by(|&p, &q| t.large[q].cmp(&t.large[p]).then(p.cmp(&q)));
    let need = t.pair.0;
    let mut chosen = Vec::new();
    let mut sum = 0;
    for q in support {
        if sum >= need {
            break;
        }
        sum += t.large[q];
        chosen.push(q);
    }
    // drop entries (largest first) that are not needed to reach the bound
    let mut by_size = chosen.clone();
    by_size.sort_by(|&p, &q| t.large[q].cmp(&t.large[p]).then(p.cmp(&q)));
    for q in by_size {
        if sum - t.large[q] >= need {
            sum -= t.large[q];
            chosen.retain(|&x| x != q);
        }
    }
    center.extend(chosen);
    center.sort_unstable();
    center
}

#[derive(Clone, Debug)]
pub struct DivideOutcome {
    pub first: Exp,
    pub second: Exp,
    /// Indices into the frame history of the blow-ups performed.
    pub events: Vec<usize>,
    /// `τ` before each step and at the end.
    pub taus: Vec<(i64, i64)>,
}

impl DivideOutcome {
    /// `true` when the first monomial divides the second.
    pub fn first_divides(&self) -> bool {
        exp_le(&self.first, &self.second)
    }
}

/// Blow up until one of `w^a`, `w^b` divides the other.
pub fn divide_monomials(frame: &mut Frame, a: &[i64], b: &[i64]) -> Result<DivideOutcome> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    let mut events = Vec::new();
    let mut taus = Vec::new();
    for _ in 0..LOOP_CAP {
        let t = tau(&a, &b);
        taus.push(t.pair);
        if comparable(&a, &b) {
            check_divaleur(frame, &a, &b)?;
            return Ok(DivideOutcome { first: a, second: b, events, taus });
        }
        if let Some(prev) = taus.len().checked_sub(2).map(|i| taus[i]) {
            if t.pair >= prev {
                return Err(Error::InvariantViolation(format!("tau did not decrease: {prev:?} -> {:?}", t.pair)));
            }
        }
        let center = select_center(&t);
        let g = frame.blowup(&center)?.matrix.clone();
        events.push(frame.history().len() - 1);
        a = apply(&a, &g);
        b = apply(&b, &g);
    }
    Err(Error::InvariantViolation("divisibility loop did not terminate".into()))
}

/// Divisibility must agree with the order of values.
fn check_divaleur(frame: &Frame, a: &[i64], b: &[i64]) -> Result<()> {
    let va = frame.monomial_value(a)?;
    let vb = frame.monomial_value(b)?;
    let ok = match va.compare(&vb)? {
        Ordering::Less => exp_le(a, b),
        Ordering::Greater => exp_le(b, a),
        Ordering::Equal => a == b,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvariantViolation("divisibility disagrees with values".into()))
    }
}

#[derive(Clone, Debug)]
pub struct Principalization {
    /// Index in the input list of the generator that now divides all others.
    pub generator: usize,
    /// Transforms of the minimal input generators in the final frame.
    pub transforms: Vec<Exp>,
    /// Input index of each entry of `transforms`.
    pub origin: Vec<usize>,
    pub events: Vec<usize>,
}

/// Blow up until the monomial ideal generated by `gens` is principal.
pub fn principalize(frame: &mut Frame, gens: &[Exp]) -> Result<Principalization> {
    if gens.is_empty() {
        return Err(Error::EmptyIdeal);
    }
    let minimal = minimal_generators(gens);
    let origin: Vec<usize> = minimal.iter().map(|m| gens.iter().position(|g| g == m).expect("from input")).collect();
    let mut cur = minimal;
    let mut events = Vec::new();
    for _ in 0..LOOP_CAP {
        if let Some(k) = (0..cur.len()).find(|&k| cur.iter().all(|e| exp_le(&cur[k], e))) {
            let vk = frame.monomial_value(&cur[k])?;
            for e in &cur {
                if frame.monomial_value(e)?.compare(&vk)? == Ordering::Less {
                    return Err(Error::InvariantViolation("generator is not of minimal value".into()));
                }
            }
            return Ok(Principalization { generator: origin[k], transforms: cur, origin, events });
        }
        let mut best: Option<((i64, i64), usize, usize)> = None;
        for p in 0..cur.len() {
            for q in (p + 1)..cur.len() {
                if comparable(&cur[p], &cur[q]) {
                    continue;
                }
                let t = tau(&cur[p], &cur[q]).pair;
                if best.is_none_or(|(b, _, _)| t < b) {
                    best = Some((t, p, q));
                }
            }
        }
        let (_, p, q) = best.ok_or_else(|| Error::InvariantViolation("no generator divides the others".into()))?;
        let start = frame.history().len();
        let out = divide_monomials(frame, &cur[p].clone(), &cur[q].clone())?;
        events.extend(out.events);
        cur = cur.iter().map(|e| frame.transform_since(start, e)).collect::<Result<_>>()?;
    }
    Err(Error::InvariantViolation("principalization did not terminate".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::vars_of;
    use crate::group::{GroupElement, ValueGroup};
    use crate::valuation::ValuationSpec;

    fn frame(weights: &[&str]) -> Frame {
        let g = ValueGroup::default();
        let names: Vec<String> = (0..weights.len()).map(|i| format!("u{i}")).collect();
        let w = weights.iter().map(|s| GroupElement::parse(s, &g).unwrap()).collect();
        Frame::new(ValuationSpec::monomial(g, vars_of(&names), w).unwrap()).unwrap()
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(&[1, 2], &[1, 2]).pair, (0, 0));
        assert_eq!(tau(&[1, 0], &[0, 1]).pair, (1, 1));
        let t = tau(&[3, 1], &[1, 4]);
        assert_eq!(t.pair, (2, 3));
        assert_eq!(t.common, vec![1, 1]);
        assert_eq!(t.small, vec![2, 0]);
        assert_eq!(t.large, vec![0, 3]);
    }

    #[test]
    fn single_step_division() {
        let mut f = frame(&["1", "pi"]);
        let out = divide_monomials(&mut f, &[1, 0], &[0, 1]).unwrap();
        assert_eq!(out.events.len(), 1);
        assert_eq!(out.first, vec![1, 0]);
        assert_eq!(out.second, vec![1, 1]);
        assert!(out.first_divides());
        let mut f = frame(&["1", "pi"]);
        assert!(divide_monomials(&mut f, &[1, 0], &[2, 1]).unwrap().events.is_empty());
        let mut f = frame(&["1", "pi"]);
        let out = divide_monomials(&mut f, &[2, 0], &[0, 3]).unwrap();
        assert!(out.taus.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn principal_ideals() {
        let mut f = frame(&["1", "pi"]);
        let p = principalize(&mut f, &[vec![2, 0]]).unwrap();
        assert_eq!((p.generator, p.events.len()), (0, 0));
        let mut f = frame(&["1", "pi"]);
        let p = principalize(&mut f, &[vec![0, 3], vec![2, 0], vec![2, 0]]).unwrap();
        assert_eq!(p.generator, 1);
        assert_eq!(p.transforms.len(), 2);
        assert_eq!(principalize(&mut f, &[]).unwrap_err(), Error::EmptyIdeal);
    }
}
