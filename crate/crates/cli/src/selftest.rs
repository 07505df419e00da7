//! Golden checks run by `valmono selftest`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use valmono_core::blowup::{divide_monomials, trace_lines, verify_trace, Frame};
use valmono_core::orchestrator::{certificate_matches, monomialize};
use valmono_core::puiseux::puiseux_package;
use valmono_core::successors::{verify_immediate_successor, LowerLattice};
use valmono_core::valuation::fixtures;

use crate::Failure;

type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn epsilons() -> Check {
    let spec = fixtures::keyed_xyz();
    for (p, want) in [("z", "(0, 1 + pi)"), ("x", "-inf"), ("z^2 - x^2*y", "(1, -1 - pi)")] {
        let got = spec.epsilon(&fixtures::poly(&spec, p)).map_err(|e| e.to_string())?.epsilon.to_string();
        ensure(got == want, format!("epsilon({p}) = {got}, expected {want}"))?;
    }
    Ok(())
}

fn successor() -> Check {
    let spec = fixtures::keyed_xyz();
    let lower = LowerLattice::base(&spec).map_err(|e| e.to_string())?;
    let q = fixtures::poly(&spec, "z^2 - x^2*y");
    let r = verify_immediate_successor(&spec, &spec.x(), &q, &lower).map_err(|e| e.to_string())?;
    ensure(r.holds && r.alpha == Some(2), format!("{}", r.to_json()))
}

fn divisions(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..20 {
        let mut frame = Frame::new(fixtures::weighted_xyz()).map_err(|e| e.to_string())?;
        let a: Vec<i64> = (0..3).map(|_| rng.gen_range(0..=4)).collect();
        let b: Vec<i64> = (0..3).map(|_| rng.gen_range(0..=4)).collect();
        let out = divide_monomials(&mut frame, &a, &b).map_err(|e| e.to_string())?;
        ensure(out.taus.windows(2).all(|t| t[1] < t[0]), format!("{a:?} {b:?}: tau does not decrease"))?;
        let report = verify_trace(&trace_lines(&frame), frame.spec().group());
        ensure(report.ok(), format!("{a:?} {b:?}: {:?}", report.failures))?;
    }
    Ok(())
}

fn package() -> Check {
    let spec = fixtures::keyed_xyz();
    let mut frame = Frame::new(spec.clone()).map_err(|e| e.to_string())?;
    let q = fixtures::poly(&spec, "z^2 - x^2*y");
    let r = puiseux_package(&mut frame, &q).map_err(|e| e.to_string())?;
    ensure(r.trace.gcds.iter().all(|&g| g == 1), "gcd chain")?;
    ensure(r.originals.len() == 3, "originals certified")
}

fn end_to_end() -> Check {
    let spec = fixtures::keyed_xyz();
    let f = fixtures::poly(&spec, "z^2 - x^2*y");
    let (st, cert) = monomialize(spec.clone(), &f, 10_000).map_err(|e| e.to_string())?;
    ensure(certificate_matches(&spec, st.frame(), &f, &cert).map_err(|e| e.to_string())?, "certificate")
}

pub fn run(seed: u64) -> Result<Value, Failure> {
    let checks: Vec<(&str, Check)> = vec![
        ("epsilon", epsilons()),
        ("successor", successor()),
        ("divide", divisions(seed)),
        ("puiseux", package()),
        ("monomialize", end_to_end()),
    ];
    let all = checks.iter().all(|(_, c)| c.is_ok());
    let report = json!({
        "seed": seed,
        "passed": all,
        "checks": checks
            .iter()
            .map(|(name, c)| match c {
                Ok(()) => json!({ "name": name, "ok": true }),
                Err(msg) => json!({ "name": name, "ok": false, "detail": msg }),
            })
            .collect::<Vec<_>>(),
    });
    if all {
        Ok(report)
    } else {
        crate::emit(&serde_json::to_string_pretty(&report).expect("report serializes"));
        Err(Failure::Uncertified("selftest failed".into()))
    }
}
