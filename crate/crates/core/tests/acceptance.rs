//! One PASS/FAIL line per acceptance criterion.

use std::cmp::Ordering;
use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use valmono_core::algebra::{exp_le, parse_rf, vars_of, MultiPoly, RationalFunction, UniPoly};
use valmono_core::blowup::{divide_monomials, trace_jsonl, verify_trace, Frame, FrameEvent};
use valmono_core::group::{Generator, GeneratorKind, GroupElement, Scalar, ValueGroup};
use valmono_core::lattice::Lattice;
use valmono_core::orchestrator::{certificate_matches, embedded_uniformize, monomialize};
use valmono_core::puiseux::{monomialize_limit_successor, puiseux_package};
use valmono_core::successors::{check_limit_successor, next_successor, verify_immediate_successor, LowerLattice};
use valmono_core::valuation::{fixtures, ValuationSpec};
use valmono_core::{Error, Rational};

type Check = std::result::Result<(), String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<T, E: std::fmt::Display>(r: std::result::Result<T, E>) -> std::result::Result<T, String> {
    r.map_err(|x| x.to_string())
}

fn trace_dir() -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance_traces");
    fs::create_dir_all(&d).expect("trace directory");
    d
}

fn emit_trace(name: &str, frame: &Frame) {
    fs::write(trace_dir().join(format!("{name}.jsonl")), trace_jsonl(frame)).expect("write trace");
}

fn group_pi_e() -> ValueGroup {
    let mut g = ValueGroup::default();
    g.register(Generator::new("e", GeneratorKind::E).expect("e"));
    g
}

fn rat(rng: &mut ChaCha8Rng) -> String {
    format!("{}/{}", rng.gen_range(1..=6), rng.gen_range(1..=4))
}

fn xyz_monomial(g: ValueGroup, weights: [&str; 3]) -> ValuationSpec {
    let w = weights.iter().map(|s| GroupElement::parse(s, &g).expect("weight")).collect();
    ValuationSpec::monomial(g, vars_of(&["x", "y", "z"]), w).expect("positive weights")
}

/// `x ↦ a`, `y ↦ b·π`, `z ↦ a + b·π/2` composed with the key `z² − x²y`.
fn keyed_random(rng: &mut ChaCha8Rng) -> (ValuationSpec, [String; 3]) {
    let a = rat(rng);
    let b = rat(rng);
    let w = [a.clone(), format!("{b}*pi"), format!("{a} + 1/2*{b}*pi")];
    let base = xyz_monomial(ValueGroup::default(), [&w[0], &w[1], &w[2]]);
    let key = fixtures::poly(&base, "z^2 - x^2*y");
    (ValuationSpec::composite(base, key).expect("monic key"), w)
}

fn random_coeff(rng: &mut ChaCha8Rng) -> String {
    let terms = rng.gen_range(1..=3);
    let mut parts = Vec::new();
    for _ in 0..terms {
        let mut c: i64 = rng.gen_range(1..=5);
        if rng.gen_bool(0.5) {
            c = -c;
        }
        parts.push(format!("({c})*x^{}*y^{}", rng.gen_range(0..=3), rng.gen_range(0..=3)));
    }
    parts.join(" + ")
}

fn random_uni(rng: &mut ChaCha8Rng, spec: &ValuationSpec, max_deg: usize) -> UniPoly {
    loop {
        let deg = rng.gen_range(0..=max_deg);
        let s: Vec<String> = (0..=deg).map(|k| format!("({})*z^{k}", random_coeff(rng))).collect();
        let p = fixtures::poly(spec, &s.join(" + "));
        if !p.is_zero() {
            return p;
        }
    }
}

/// Monomial value of a polynomial in `x, y, z` under explicit weights.
fn weight_min(p: &MultiPoly, w: &[GroupElement]) -> GroupElement {
    let mut best: Option<GroupElement> = None;
    for (ex, _) in p.terms() {
        let mut v = GroupElement::zero(1);
        for (k, b) in ex.iter().zip(w) {
            v = v.add(&b.mul_int(*k)).expect("same rank");
        }
        if best.as_ref().is_none_or(|b| v.compare(b).expect("decidable") == Ordering::Less) {
            best = Some(v);
        }
    }
    best.expect("nonzero")
}

/// `z² → x²y` reduction of a polynomial.
fn reduce_mod_key(p: &MultiPoly) -> MultiPoly {
    let vars = p.vars().clone();
    let mut out = MultiPoly::zero(&vars);
    for (ex, c) in p.terms() {
        let k = ex[2];
        let mut t = ex.clone();
        t[2] = k % 2;
        t[0] += 2 * (k / 2);
        t[1] += k / 2;
        out.add_term(t, c.clone());
    }
    out
}

/// Truncated value at `z² − x²y` computed by repeated exact division and
/// reduction, independent of the library's expansion.
fn truncation_oracle(p: &UniPoly, w: &[GroupElement]) -> GroupElement {
    let f = p.to_rf();
    let vars = f.vars().clone();
    let key = parse_rf("z^2 - x^2*y", &vars).expect("key").num().clone();
    let mut num = f.num().scale(&f.den().as_constant().expect("polynomial").recip());
    let mut order = 0i64;
    while let Some(q) = num.divide_exact(&key) {
        num = q;
        order += 1;
    }
    let rest = reduce_mod_key(&num);
    let v = weight_min(&rest, w);
    v.prepend(Scalar::rational(Rational::from_integer(order.into())))
}

// Written past the test harness capture so the lines show up in every run.
fn report(line: String) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").expect("stdout");
}

fn criterion_1() -> Check {
    let nu3 = fixtures::keyed_xyz();
    let z = nu3.x();
    let q = fixtures::poly(&nu3, "z^2 - x^2*y");
    let eps = |s: &str| -> std::result::Result<String, String> {
        Ok(e(nu3.epsilon(&fixtures::poly(&nu3, s)))?.epsilon.to_string())
    };
    ensure(eps("z")? == "(0, 1 + pi)", format!("eps(z) = {}", eps("z")?))?;
    ensure(eps("x")? == "-inf", format!("eps(x) = {}", eps("x")?))?;
    ensure(eps("y")? == "-inf", format!("eps(y) = {}", eps("y")?))?;
    ensure(eps("z^2 - x^2*y")? == "(1, -1 - pi)", format!("eps(Q) = {}", eps("z^2 - x^2*y")?))?;
    ensure(e(nu3.value_uni(&q))?.to_string() == "(1, 0)", "nu3(Q)")?;
    let dq = q.divided_derivative(1);
    ensure(e(nu3.value_uni(&dq))?.to_string() == "(0, 1 + pi)", "nu3(dQ)")?;
    ensure(e(nu3.value_uni(&z))?.to_string() == "(0, 1 + pi)", "nu3(z)")
}

fn criterion_2() -> Check {
    let nu3 = fixtures::keyed_xyz();
    let z = nu3.x();
    let q = fixtures::poly(&nu3, "z^2 - x^2*y");
    let lower = e(LowerLattice::base(&nu3))?;
    let r = e(verify_immediate_successor(&nu3, &z, &q, &lower))?;
    ensure(r.holds && r.alpha == Some(2) && r.degree_check, format!("verify: {:?}", r.to_json()))?;
    let g = ValueGroup::default();
    let plain = Lattice::new(vec![e(GroupElement::parse("1", &g))?, e(GroupElement::parse("2*pi", &g))?]);
    let m = e(plain.multiplier(&e(GroupElement::parse("1 + pi", &g))?))?;
    ensure(m.alpha == 2, "alpha from <1, 2pi>")?;
    let nu2 = fixtures::weighted_xyz();
    let z = nu2.x();
    let lower = e(LowerLattice::base(&nu2))?;
    let (next, cert) = e(next_successor(&nu2, &z, std::slice::from_ref(&z), &lower))?;
    ensure(next.deg() == 2, "degree 2")?;
    let parts: Vec<_> = next.coeffs().iter().filter(|c| !c.is_zero()).collect();
    ensure(parts.len() == 2 && next.coeff(1).is_zero(), "two terms")?;
    let x2y = parse_rf("x^2*y", nu2.vars()).unwrap();
    let c = e(next.coeff(0).checked_div(&x2y))?.as_constant();
    ensure(c.as_ref().is_some_and(|c| *c != Rational::from_integer(0.into())), "rational c != 0")?;
    ensure(cert.truncated_value.lt(&cert.assigned_value), "truncated value below assigned value")
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..200 {
        let (spec, w) = keyed_random(&mut rng);
        let g = spec.group().clone();
        let weights: Vec<GroupElement> = w.iter().map(|s| GroupElement::parse(s, &g).unwrap()).collect();
        let q = fixtures::poly(&spec, "z^2 - x^2*y");
        let mut p1 = random_uni(&mut rng, &spec, 4);
        if i % 4 == 0 {
            p1 = UniPoly::from_rf(&(&p1.to_rf() * &q.to_rf()), 2).unwrap();
        }
        let p2 = random_uni(&mut rng, &spec, 4);
        let prod = UniPoly::from_rf(&(&p1.to_rf() * &p2.to_rf()), 2).unwrap();
        let v = |p: &UniPoly| -> std::result::Result<GroupElement, String> { Ok(e(spec.truncated_value(&q, p))?.value) };
        let (a, b, ab) = (v(&p1)?, v(&p2)?, v(&prod)?);
        ensure(a == truncation_oracle(&p1, &weights), format!("pair {i}: oracle disagrees on P1"))?;
        ensure(ab == truncation_oracle(&prod, &weights), format!("pair {i}: oracle disagrees on P1P2"))?;
        ensure(e(ab.compare(&e(a.add(&b))?))? == Ordering::Equal, format!("pair {i}: not additive"))?;
    }
    for i in 0..200 {
        let (spec, _) = keyed_random(&mut rng);
        let q = fixtures::poly(&spec, "z^2 - x^2*y");
        let t = rng.gen_range(2..=4);
        let ps: Vec<UniPoly> = (0..t).map(|_| random_uni(&mut rng, &spec, 1)).collect();
        let mut prod = ps[0].to_rf();
        for p in &ps[1..] {
            prod = &prod * &p.to_rf();
        }
        let prod = UniPoly::from_rf(&prod, 2).unwrap();
        let (quo, rem) = e(prod.euclid_div(&q))?;
        let vprod = e(spec.value_uni(&prod))?;
        let mut sum = spec.zero_value();
        for p in &ps {
            sum = e(sum.add(&e(spec.value_uni(p))?))?;
        }
        ensure(vprod == sum, format!("instance {i}: value of product"))?;
        ensure(!rem.is_zero() && e(spec.value_uni(&rem))? == vprod, format!("instance {i}: remainder value"))?;
        if !quo.is_zero() {
            let qq = UniPoly::from_rf(&(&quo.to_rf() * &q.to_rf()), 2).unwrap();
            ensure(vprod.lt(&e(spec.value_uni(&qq))?), format!("instance {i}: quotient term not larger"))?;
        }
    }
    Ok(())
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..100 {
        let w = [rat(&mut rng), format!("{}*pi", rat(&mut rng)), format!("{}*e", rat(&mut rng))];
        let spec = xyz_monomial(group_pi_e(), [&w[0], &w[1], &w[2]]);
        let mut frame = e(Frame::new(spec))?;
        let a: Vec<i64> = (0..3).map(|_| rng.gen_range(0..=4)).collect();
        let b: Vec<i64> = (0..3).map(|_| rng.gen_range(0..=4)).collect();
        let out = e(divide_monomials(&mut frame, &a, &b))?;
        ensure(out.taus.windows(2).all(|t| t[1] < t[0]), format!("case {i}: tau did not decrease"))?;
        ensure(exp_le(&out.first, &out.second) || exp_le(&out.second, &out.first), format!("case {i}: not comparable"))?;
        let va = e(frame.monomial_value(&out.first))?;
        let vb = e(frame.monomial_value(&out.second))?;
        let ok = match e(va.compare(&vb))? {
            Ordering::Less => exp_le(&out.first, &out.second),
            Ordering::Greater => exp_le(&out.second, &out.first),
            Ordering::Equal => out.first == out.second,
        };
        ensure(ok, format!("case {i}: divisibility disagrees with values"))?;
        ensure(frame.steps().all(|s| s.monomial), format!("case {i}: independent weights need no residue"))?;
        emit_trace(&format!("divide_{i:03}"), &frame);
    }
    Ok(())
}

fn criterion_5() -> Check {
    let nu2 = fixtures::weighted_xyz();
    let q2 = fixtures::poly(&nu2, "z^2 - x^2*y");
    let mut plain = e(Frame::new(nu2))?;
    ensure(
        matches!(puiseux_package(&mut plain, &q2), Err(Error::ResidueFieldExtension(_))),
        "plain weights admit no rational residue",
    )?;
    let spec = fixtures::keyed_xyz();
    let q = fixtures::poly(&spec, "z^2 - x^2*y");
    let mut frame = e(Frame::new(spec))?;
    let out = e(puiseux_package(&mut frame, &q))?;
    let steps: Vec<_> = frame.steps().collect();
    let (last, rest) = steps.split_last().ok_or("no steps")?;
    ensure(rest.iter().all(|s| s.monomial) && !last.monomial, "all but the last step monomial")?;
    ensure(out.trace.gcds.iter().all(|&g| g == 1), format!("gcds {:?}", out.trace.gcds))?;
    ensure(out.ratio_value.is_zero(), "ratio is a unit")?;
    let vars = frame.spec().vars().clone();
    let zbar = e(parse_rf("z^2/(x^2*y)", &vars))?;
    ensure(e(frame.spec().value(&zbar))?.is_zero(), "z^2/(x^2 y) has value 0")?;
    let fq = e(frame.substitute(&q.to_rf()))?;
    let fx = e(frame.substitute(&e(parse_rf("x^2*y", &vars))?))?;
    let w = RationalFunction::var(frame.params(), out.trace.new_slot);
    ensure(fq == &w * &fx, "Q equals the new parameter times x^2 y")?;
    ensure(out.originals.iter().all(|c| c.unit_value.is_zero()), "originals are monomials times units")?;
    emit_trace("puiseux_keyed", &frame);
    Ok(())
}

fn criterion_6() -> Check {
    let spec = fixtures::limit_xyz();
    let key = fixtures::poly(&spec, "z");
    for m in 1..=3 {
        for lead in ["1", "x"] {
            let s = format!("y^{m}*(z - x) + {lead}*z^{}", m + 1);
            let p = fixtures::poly(&spec, &s);
            let rep = e(check_limit_successor(&spec, &key, &p))?;
            ensure(rep.holds && rep.delta == 1 && rep.argmin == vec![0, 1], format!("{s}: not a delta-one instance"))?;
            let mut frame = e(Frame::new(spec.clone()))?;
            let out = e(monomialize_limit_successor(&mut frame, &key, &p))?;
            ensure(out.reframed, format!("{s}: not re-framed"))?;
            let last = &frame.forward()[out.slot];
            ensure((last * &out.divisor) == p.to_rf(), format!("{s}: last parameter times divisor is not P"))?;
            ensure(frame.values()[out.slot].is_positive(), format!("{s}: new parameter not positive"))?;
            let pkg: Vec<_> = out.trace.events.iter().map(|&k| &frame.history()[k]).collect();
            let monomial: Vec<bool> = pkg
                .iter()
                .map(|ev| matches!(ev, FrameEvent::Blowup(st) if st.monomial))
                .collect();
            ensure(
                monomial.split_last().is_some_and(|(l, r)| !l && r.iter().all(|&x| x)),
                format!("{s}: package shape"),
            )?;
            emit_trace(&format!("limit_{m}_{lead}"), &frame);
        }
    }
    let bad = fixtures::poly(&spec, "z^2 - 2*x*z + x^2");
    let mut frame = e(Frame::new(spec.clone()))?;
    ensure(matches!(monomialize_limit_successor(&mut frame, &key, &bad), Err(Error::DeltaNotOne(d)) if d >= 2), "delta 2 accepted")?;
    let nu3 = fixtures::keyed_xyz();
    let mut frame = e(Frame::new(nu3.clone()))?;
    let q = fixtures::poly(&nu3, "z^2 - x^2*y");
    ensure(matches!(monomialize_limit_successor(&mut frame, &nu3.x(), &q), Err(Error::DeltaNotOne(2))), "keyed delta 2 accepted")
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut specs = vec![fixtures::keyed_xyz()];
    for _ in 0..4 {
        let w = [rat(&mut rng), format!("{}*pi", rat(&mut rng)), format!("{}*e", rat(&mut rng))];
        specs.push(xyz_monomial(group_pi_e(), [&w[0], &w[1], &w[2]]));
    }
    for (k, spec) in specs.iter().enumerate() {
        for (i, s) in ["z^2 - x^2*y", "x + y", "x^3 + y^2*z"].iter().enumerate() {
            let f = fixtures::poly(spec, s);
            let (st, c) = e(monomialize(spec.clone(), &f, 10_000))?;
            ensure(st.frame().blowups() <= 10_000, "budget")?;
            ensure(e(certificate_matches(spec, st.frame(), &f, &c))?, format!("spec {k}: {s}"))?;
            emit_trace(&format!("monomialize_{k}_{i}"), st.frame());
        }
    }
    let mut uni_specs = vec![fixtures::weighted_xyz()];
    for _ in 0..3 {
        let w = ["1".to_string(), format!("1 + {}*pi", rat(&mut rng)), format!("{}*e", rat(&mut rng))];
        uni_specs.push(xyz_monomial(group_pi_e(), [&w[0], &w[1], &w[2]]));
    }
    for (k, spec) in uni_specs.iter().enumerate() {
        let fs = vec![fixtures::poly(spec, "x"), fixtures::poly(spec, "x + y")];
        let (st, u) = e(embedded_uniformize(spec.clone(), &fs, 10_000))?;
        ensure(u.order[0] == 0 && u.first_divides_all(), format!("uniformize spec {k}"))?;
        emit_trace(&format!("uniformize_{k}"), st.frame());
    }
    Ok(())
}

fn criterion_8() -> Check {
    let mut files: Vec<PathBuf> = e(fs::read_dir(trace_dir()))?.filter_map(|d| d.ok().map(|d| d.path())).collect();
    files.sort();
    ensure(!files.is_empty(), "no traces emitted")?;
    let group = group_pi_e();
    let mut steps = 0;
    for f in &files {
        let text = e(fs::read_to_string(f))?;
        let lines: Vec<Value> = text.lines().filter(|l| !l.trim().is_empty()).map(serde_json::from_str).collect::<Result<_, _>>().map_err(|x| x.to_string())?;
        let r = verify_trace(&lines, &group);
        steps += r.steps;
        ensure(r.ok(), format!("{}: {:?}", f.display(), r.failures))?;
    }
    ensure(steps > 0, "traces are empty")
}

#[test]
fn acceptance() {
    let _ = fs::remove_dir_all(trace_dir());
    let criteria: Vec<(&str, Duration, fn() -> Check)> = vec![
        ("1 golden invariants", Duration::from_secs(1), criterion_1),
        ("2 successors", Duration::from_secs(1), criterion_2),
        ("3 truncation is a valuation", Duration::from_secs(30), criterion_3),
        ("4 divisibility loop", Duration::from_secs(30), criterion_4),
        ("5 binomial package", Duration::from_secs(5), criterion_5),
        ("6 limit successor recipe", Duration::from_secs(5), criterion_6),
        ("7 end-to-end monomialization", Duration::from_secs(60), criterion_7),
        ("8 trace replay", Duration::from_secs(60), criterion_8),
    ];
    let mut failed = Vec::new();
    report(String::new());
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let r = run();
        let took = start.elapsed();
        let r = r.and_then(|_| ensure(took <= limit, format!("took {took:?}, limit {limit:?}")));
        match r {
            Ok(()) => report(format!("PASS {name} ({took:.2?})")),
            Err(msg) => {
                report(format!("FAIL {name}: {msg}"));
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
