use std::cmp::Ordering;

use proptest::prelude::*;

use valmono_core::algebra::{fmt_rf, parse_rf, vars_of, UniPoly};
use valmono_core::blowup::{divide_monomials, monomialize_nondegenerate, tau, trace_lines, verify_trace, Frame};
use valmono_core::group::{GroupElement, ValueGroup};
use valmono_core::valuation::{fixtures, ValuationSpec};

fn element() -> impl Strategy<Value = String> {
    (-9i64..=9, 1i64..=4, -9i64..=9, 1i64..=4).prop_map(|(a, b, c, d)| format!("{a}/{b} + {c}/{d}*pi"))
}

fn coeff() -> impl Strategy<Value = String> {
    prop::collection::vec((-5i64..=5, 0u32..=3, 0u32..=3), 1..=3).prop_map(|ts| {
        ts.iter().map(|(c, i, j)| format!("({c})*x^{i}*y^{j}")).collect::<Vec<_>>().join(" + ")
    })
}

fn uni(max_deg: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(coeff(), 1..=max_deg + 1)
        .prop_map(|cs| cs.iter().enumerate().map(|(k, c)| format!("({c})*z^{k}")).collect::<Vec<_>>().join(" + "))
}

fn weighted(w: [&str; 3]) -> ValuationSpec {
    let g = ValueGroup::default();
    let ws = w.iter().map(|s| GroupElement::parse(s, &g).unwrap()).collect();
    ValuationSpec::monomial(g, vars_of(&["x", "y", "z"]), ws).unwrap()
}

fn mul(spec: &ValuationSpec, a: &UniPoly, b: &UniPoly) -> UniPoly {
    UniPoly::from_rf(&(&a.to_rf() * &b.to_rf()), spec.x_var()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order_is_compatible_with_addition(a in element(), b in element(), c in element()) {
        let g = ValueGroup::default();
        let (a, b, c) = (GroupElement::parse(&a, &g).unwrap(), GroupElement::parse(&b, &g).unwrap(), GroupElement::parse(&c, &g).unwrap());
        let ab = a.compare(&b).unwrap();
        prop_assert_eq!(a.add(&c).unwrap().compare(&b.add(&c).unwrap()).unwrap(), ab);
        prop_assert_eq!(b.compare(&a).unwrap(), ab.reverse());
    }

    #[test]
    fn division_by_positive_integers(a in element(), n in 1i64..=12) {
        let g = ValueGroup::default();
        let a = GroupElement::parse(&a, &g).unwrap();
        let q = a.div_by_positive_int(n).unwrap();
        prop_assert_eq!(q.mul_int(n), a);
    }

    #[test]
    fn values_print_and_parse_back(a in element()) {
        let g = ValueGroup::default();
        let a = GroupElement::parse(&a, &g).unwrap();
        prop_assert_eq!(GroupElement::parse(&a.to_string(), &g).unwrap(), a);
    }

    #[test]
    fn functions_print_and_parse_back(p in uni(3), q in coeff()) {
        let vars = vars_of(&["x", "y", "z"]);
        let f = parse_rf(&format!("({p})/(1 + {q})"), &vars);
        if let Ok(f) = f {
            prop_assert_eq!(parse_rf(&fmt_rf(&f), &vars).unwrap(), f);
        }
    }

    #[test]
    fn leibniz_rule(p in uni(3), q in uni(3), b in 1usize..=4) {
        let spec = fixtures::weighted_xyz();
        let (p, q) = (fixtures::poly(&spec, &p), fixtures::poly(&spec, &q));
        let lhs = mul(&spec, &p, &q).divided_derivative(b);
        let mut rhs = lhs.zero_like().to_rf();
        for i in 0..=b {
            rhs = &rhs + &(&p.divided_derivative(i).to_rf() * &q.divided_derivative(b - i).to_rf());
        }
        prop_assert_eq!(lhs.to_rf(), rhs);
    }

    #[test]
    fn expansion_round_trip(p in uni(5)) {
        let spec = fixtures::weighted_xyz();
        let p = fixtures::poly(&spec, &p);
        let q = fixtures::poly(&spec, "z^2 - x^2*y");
        let parts = p.q_expansion(&q).unwrap();
        prop_assert!(parts.iter().all(|c| c.is_zero() || c.deg() < 2));
        prop_assert_eq!(UniPoly::from_expansion(&parts, &q), p);
    }

    #[test]
    fn truncation_is_multiplicative(p in uni(3), q in uni(3)) {
        let spec = fixtures::keyed_xyz();
        let key = fixtures::poly(&spec, "z^2 - x^2*y");
        let (p, q) = (fixtures::poly(&spec, &p), fixtures::poly(&spec, &q));
        prop_assume!(!p.is_zero() && !q.is_zero());
        let v = |f: &UniPoly| spec.truncated_value(&key, f).unwrap().value;
        let pq = mul(&spec, &p, &q);
        prop_assert_eq!(v(&pq).compare(&v(&p).add(&v(&q)).unwrap()).unwrap(), Ordering::Equal);
        prop_assert!(v(&p).le(&spec.value_uni(&p).unwrap()));
    }

    #[test]
    fn remainder_keeps_the_value(ps in prop::collection::vec(uni(1), 2..=4)) {
        let spec = fixtures::keyed_xyz();
        let key = fixtures::poly(&spec, "z^2 - x^2*y");
        let ps: Vec<UniPoly> = ps.iter().map(|s| fixtures::poly(&spec, s)).collect();
        prop_assume!(ps.iter().all(|p| !p.is_zero()));
        let prod = ps[1..].iter().fold(ps[0].clone(), |acc, p| mul(&spec, &acc, p));
        let (quo, rem) = prod.euclid_div(&key).unwrap();
        let v = spec.value_uni(&prod).unwrap();
        prop_assert_eq!(spec.value_uni(&rem).unwrap(), v.clone());
        if !quo.is_zero() {
            prop_assert!(v.lt(&spec.value_uni(&mul(&spec, &quo, &key)).unwrap()));
        }
    }

    #[test]
    fn tau_decreases_and_steps_are_unimodular(
        a in prop::collection::vec(0i64..=4, 3),
        b in prop::collection::vec(0i64..=4, 3),
        w in (1i64..=5, 1i64..=5),
    ) {
        let spec = weighted([&format!("{}", w.0), &format!("{}*pi", w.1), "1 + pi"]);
        let mut frame = Frame::new(spec).unwrap();
        let out = divide_monomials(&mut frame, &a, &b).unwrap();
        prop_assert!(out.taus.windows(2).all(|t| t[1] < t[0]));
        prop_assert_eq!(*out.taus.last().unwrap(), tau(&out.first, &out.second).pair);
        let report = verify_trace(&trace_lines(&frame), frame.spec().group());
        prop_assert!(report.ok(), "{:?}", report.failures);
    }

    #[test]
    fn substitution_preserves_values(p in uni(2)) {
        let spec = fixtures::weighted_xyz();
        let f = fixtures::poly(&spec, &p).to_rf();
        prop_assume!(!f.is_zero());
        let mut frame = Frame::new(spec.clone()).unwrap();
        let _ = monomialize_nondegenerate(&mut frame, &parse_rf("x + y", spec.vars()).unwrap()).unwrap();
        let _ = frame.blowup(&[0, 2]);
        let g = frame.substitute(&f).unwrap();
        prop_assert_eq!(frame.value_of(&g).unwrap(), spec.value(&f).unwrap());
    }
}
