use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde_json::{json, Map, Value};

use super::frame::{identity, Frame, FrameEvent, Matrix};
use crate::algebra::{fmt_poly, fmt_rational};
use crate::error::{Error, Result};
use crate::group::{GroupElement, ValueGroup};

fn beta_map(names: &[String], values: &[GroupElement]) -> Value {
    let mut m = Map::new();
    for (n, v) in names.iter().zip(values) {
        m.insert(n.clone(), Value::String(v.to_string()));
    }
    Value::Object(m)
}

/// One JSON object per frame event.
pub fn trace_lines(frame: &Frame) -> Vec<Value> {
    frame
        .history()
        .iter()
        .enumerate()
        .map(|(k, ev)| match ev {
            FrameEvent::Blowup(s) => {
                let mut residues = Map::new();
                for (q, c) in &s.residues {
                    residues.insert(q.to_string(), Value::String(fmt_rational(c)));
                }
                json!({
                    "step": k,
                    "kind": "blowup",
                    "params_before": s.params_before,
                    "params": s.params_after,
                    "J": s.center,
                    "j": s.chosen,
                    "B": s.strict,
                    "C": s.equal,
                    "monomial": s.monomial,
                    "beta_before": beta_map(&s.params_before, &s.beta_before),
                    "beta_after": beta_map(&s.params_after, &s.beta_after),
                    "G": s.matrix,
                    "residues": residues,
                })
            }
            FrameEvent::Reframe(r) => json!({
                "step": k,
                "kind": "reframe",
                "slot": r.slot,
                "params_before": r.params_before,
                "params": r.params_after,
                "beta_before": beta_map(&r.params_before, &r.beta_before),
                "beta_after": beta_map(&r.params_after, &r.beta_after),
                "expr": fmt_poly(&r.in_params),
            }),
        })
        .collect()
}

pub fn trace_jsonl(frame: &Frame) -> String {
    let mut out = String::new();
    for line in trace_lines(frame) {
        out.push_str(&line.to_string());
        out.push('\n');
    }
    out
}

/// The trace as a chain of parameter systems in Graphviz syntax.
pub fn trace_dot(frame: &Frame) -> String {
    let mut out = String::from("digraph trace {\n  rankdir=LR;\n  node [shape=box];\n");
    let first: Vec<String> = match frame.history().first() {
        Some(FrameEvent::Blowup(s)) => s.params_before.clone(),
        Some(FrameEvent::Reframe(r)) => r.params_before.clone(),
        None => frame.params().as_ref().clone(),
    };
    out.push_str(&format!("  n0 [label=\"{}\"];\n", first.join(", ")));
    for (k, ev) in frame.history().iter().enumerate() {
        out.push_str(&format!("  n{} [label=\"{}\"];\n", k + 1, ev.params_after().join(", ")));
        let label = match ev {
            FrameEvent::Blowup(s) => {
                let names: Vec<&str> = s.center.iter().map(|&q| s.params_before[q].as_str()).collect();
                let style = if s.monomial { "" } else { ", style=dashed" };
                format!("J={{{}}} j={}\"{style}", names.join(","), s.params_before[s.chosen])
            }
            FrameEvent::Reframe(r) => format!("reframe {}\", style=dotted", r.params_after[r.slot]),
        };
        out.push_str(&format!("  n{k} -> n{} [label=\"{label}];\n", k + 1));
    }
    out.push_str("}\n");
    out
}

#[derive(Clone, Debug, Default)]
pub struct TraceReport {
    pub steps: usize,
    pub failures: Vec<String>,
}

impl TraceReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn det(m: &Matrix) -> i128 {
    // fraction-free elimination
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    if n == 0 {
        1
    } else {
        sign * a[n - 1][n - 1]
    }
}

struct Parsed {
    params_before: Vec<String>,
    params: Vec<String>,
    beta_before: Vec<GroupElement>,
    beta_after: Vec<GroupElement>,
}

fn strings(v: &Value, key: &str) -> Result<Vec<String>> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse(format!("missing `{key}`")))?
        .iter()
        .map(|s| s.as_str().map(str::to_string).ok_or_else(|| Error::Parse(format!("`{key}` holds strings"))))
        .collect()
}

fn indices(v: &Value, key: &str) -> Result<Vec<usize>> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse(format!("missing `{key}`")))?
        .iter()
        .map(|s| s.as_u64().map(|x| x as usize).ok_or_else(|| Error::Parse(format!("`{key}` holds indices"))))
        .collect()
}

fn betas(v: &Value, key: &str, names: &[String], group: &ValueGroup) -> Result<Vec<GroupElement>> {
    let m = v.get(key).and_then(Value::as_object).ok_or_else(|| Error::Parse(format!("missing `{key}`")))?;
    names
        .iter()
        .map(|n| {
            let s = m.get(n).and_then(Value::as_str).ok_or_else(|| Error::Parse(format!("no value for `{n}`")))?;
            GroupElement::parse(s, group)
        })
        .collect()
}

fn parse_common(v: &Value, group: &ValueGroup) -> Result<Parsed> {
    let params_before = strings(v, "params_before")?;
    let params = strings(v, "params")?;
    let beta_before = betas(v, "beta_before", &params_before, group)?;
    let beta_after = betas(v, "beta_after", &params, group)?;
    Ok(Parsed { params_before, params, beta_before, beta_after })
}

/// Re-check every step of a trace.
pub fn verify_trace(lines: &[Value], group: &ValueGroup) -> TraceReport {
    let mut report = TraceReport { steps: lines.len(), failures: Vec::new() };
    let mut prev: Option<(Vec<String>, Vec<GroupElement>)> = None;
    let mut cumulative: Option<Matrix> = None;
    for (k, line) in lines.iter().enumerate() {
        let mut fail = |msg: String| report.failures.push(format!("step {k}: {msg}"));
        let p = match parse_common(line, group) {
            Ok(p) => p,
            Err(e) => {
                fail(e.to_string());
                continue;
            }
        };
        if let Some((names, vals)) = &prev {
            if *names != p.params_before || vals != &p.beta_before {
                fail("does not continue the previous step".into());
            }
        }
        for (n, b) in p.params.iter().zip(&p.beta_after) {
            if !b.is_positive() {
                fail(format!("value of `{n}` is not positive"));
            }
        }
        let kind = line.get("kind").and_then(Value::as_str).unwrap_or("blowup");
        if kind == "blowup" {
            match check_blowup(line, &p) {
                Ok(g) => {
                    let monomial = line.get("monomial").and_then(Value::as_bool).unwrap_or(false);
                    cumulative = match (cumulative.take(), monomial, k) {
                        (_, false, _) => None,
                        (None, true, 0) => Some(g),
                        (Some(c), true, _) => Some(super::frame::mat_mul(&c, &g)),
                        (None, true, _) => None,
                    };
                    if let Some(c) = &cumulative {
                        if det(c).abs() != 1 {
                            fail("cumulative exponent matrix is not unimodular".into());
                        }
                    }
                }
                Err(msgs) => msgs.into_iter().for_each(&mut fail),
            }
        } else {
            cumulative = None;
            let slot = line.get("slot").and_then(Value::as_u64).map(|s| s as usize);
            match slot {
                Some(s) if s < p.params.len() => {
                    for q in (0..p.params.len()).filter(|&q| q != s) {
                        if p.params[q] != p.params_before[q] || p.beta_after[q] != p.beta_before[q] {
                            fail(format!("re-framing changed parameter {q}"));
                        }
                    }
                }
                _ => fail("bad re-framed slot".into()),
            }
        }
        prev = Some((p.params, p.beta_after));
    }
    report
}

fn check_blowup(line: &Value, p: &Parsed) -> std::result::Result<Matrix, Vec<String>> {
    let mut errs = Vec::new();
    let get = |key: &str| indices(line, key).map_err(|e| vec![e.to_string()]);
    let center = get("J")?;
    let strict = get("B")?;
    let equal = get("C")?;
    let j = line.get("j").and_then(Value::as_u64).ok_or_else(|| vec!["missing `j`".to_string()])? as usize;
    let n = p.params_before.len();
    if p.params.len() != n || p.beta_before.len() != n {
        return Err(vec!["parameter count changed".into()]);
    }
    if center.len() < 2 || center.iter().any(|&q| q >= n) || center.windows(2).any(|w| w[0] >= w[1]) {
        return Err(vec!["malformed center".into()]);
    }
    if !center.contains(&j) {
        return Err(vec!["chosen index is not in the center".into()]);
    }
    let bj = &p.beta_before[j];
    let mut want_b = Vec::new();
    let mut want_c = Vec::new();
    for &q in &center {
        match p.beta_before[q].compare(bj) {
            Ok(Ordering::Less) => errs.push(format!("parameter {q} has smaller value than the chosen one")),
            Ok(Ordering::Equal) if q < j => errs.push(format!("tie with {q} not broken by smallest index")),
            Ok(Ordering::Equal) if q != j => want_c.push(q),
            Ok(Ordering::Greater) => want_b.push(q),
            Ok(_) => {}
            Err(e) => errs.push(e.to_string()),
        }
    }
    let as_set = |v: &[usize]| v.iter().copied().collect::<BTreeSet<_>>();
    if as_set(&strict) != as_set(&want_b) || as_set(&equal) != as_set(&want_c) {
        errs.push("B/C partition does not match the values".into());
    }
    let monomial = line.get("monomial").and_then(Value::as_bool).unwrap_or(false);
    if monomial != equal.is_empty() {
        errs.push("monomial flag disagrees with C".into());
    }
    let mut g = identity(n);
    for &q in strict.iter().chain(&equal) {
        g[q][j] = 1;
    }
    for &q in &equal {
        g[q][q] = 0;
    }
    let recorded: Option<Matrix> = line.get("G").and_then(|v| serde_json::from_value(v.clone()).ok());
    if recorded.as_ref() != Some(&g) {
        errs.push("exponent matrix does not match the step".into());
    }
    if monomial && det(&g).abs() != 1 {
        errs.push("exponent matrix is not unimodular".into());
    }
    for q in 0..n {
        let expect_same = !strict.contains(&q) && !equal.contains(&q);
        if expect_same && (p.params[q] != p.params_before[q] || p.beta_after[q] != p.beta_before[q]) {
            errs.push(format!("parameter {q} outside the center changed"));
        }
        if strict.contains(&q) {
            match p.beta_before[q].sub(bj) {
                Ok(d) if d == p.beta_after[q] => {}
                _ => errs.push(format!("value of parameter {q} is not the difference")),
            }
        }
    }
    let residues = line.get("residues").and_then(Value::as_object).map(|m| m.len()).unwrap_or(0);
    if residues != equal.len() {
        errs.push("one residue per equal-value parameter expected".into());
    }
    if errs.is_empty() {
        Ok(g)
    } else {
        Err(errs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::divide_monomials;
    use crate::valuation::fixtures;

    #[test]
    fn replay_and_tamper() {
        let mut f = Frame::new(fixtures::weighted_xyz()).unwrap();
        divide_monomials(&mut f, &[2, 0, 0], &[0, 0, 3]).unwrap();
        let lines = trace_lines(&f);
        assert!(!lines.is_empty());
        let g = f.spec().group().clone();
        assert!(verify_trace(&lines, &g).ok());
        let mut bad = lines.clone();
        bad[0]["j"] = json!(2);
        assert!(!verify_trace(&bad, &g).ok());
        assert!(trace_dot(&f).starts_with("digraph"));
        assert_eq!(det(&vec![vec![0, 1], vec![1, 0]]), -1);
    }
}
