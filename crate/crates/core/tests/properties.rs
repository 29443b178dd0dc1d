use higher_hilbert::config::{Context, JobConfig};
use higher_hilbert::forms::dlog;
use higher_hilbert::kummer::{l_map, PrincipalUnit};
use higher_hilbert::series::{parse_series, print_series, Series};
use higher_hilbert::symbol::{symbol_exponent, SymbolInput};
use proptest::prelude::*;
use std::sync::OnceLock;

fn ctx() -> &'static Context {
    static CTX: OnceLock<Context> = OnceLock::new();
    CTX.get_or_init(|| JobConfig::default().context().unwrap())
}

type Terms = Vec<(i32, i32, i64)>;

fn terms(ylo: i32) -> impl Strategy<Value = Terms> {
    prop::collection::vec((-3i32..=3, ylo..=3, -9i64..=9), 1..5)
}

fn build(t: &Terms) -> Series {
    let sr = &ctx().base_sr;
    let ring = sr.coeffs();
    let v: Vec<_> = t.iter().map(|(i, j, c)| (*i, *j, ring.from_int(*c))).collect();
    Series::from_terms(sr, &v).unwrap()
}

/// `1 + sum c T^i pi^j` with `j >= 1`, read in the level ring.
fn unit(t: &Terms) -> PrincipalUnit {
    let sr = &ctx().sr;
    let ring = sr.coeffs();
    let mut v = vec![(0, 0, ring.from_int(1))];
    v.extend(t.iter().map(|(i, j, c)| (*i, (*j).max(1), ring.from_int(*c))));
    PrincipalUnit::new(Series::from_terms(sr, &v).unwrap()).unwrap()
}

fn exponent(a: &PrincipalUnit, b: &PrincipalUnit, c: &PrincipalUnit) -> u64 {
    symbol_exponent(&ctx().level, &SymbolInput::new(a.clone(), b.clone(), c.clone())).unwrap().exponent
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(64) })]

    #[test]
    fn print_parse_round_trip(t in terms(-2)) {
        let s = build(&t);
        let back = parse_series(s.sr(), &print_series(&s)).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn multiplication_is_commutative_and_distributive(a in terms(-2), b in terms(0), c in terms(0)) {
        let (a, b, c) = (build(&a), build(&b), build(&c));
        prop_assert!(a.mul(&b).unwrap().agrees_with(&b.mul(&a).unwrap()).unwrap());
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert!(lhs.agrees_with(&rhs).unwrap());
    }

    #[test]
    fn psi_is_left_inverse_to_phi(t in terms(-2)) {
        let ops = &ctx().base;
        let x = build(&t);
        prop_assert!(ops.psi(&ops.phi(&x).unwrap()).unwrap().agrees_with(&x).unwrap());
    }

    #[test]
    fn dlog_and_l_are_homomorphisms(a in terms(1), b in terms(1)) {
        let (u, v) = (unit(&a), unit(&b));
        let uv = u.mul(&v).unwrap();
        let lhs = dlog(uv.series()).unwrap();
        let rhs = dlog(u.series()).unwrap().add(&dlog(v.series()).unwrap()).unwrap();
        prop_assert!(lhs.agrees_with(&rhs).unwrap());
        let ops = &ctx().level.ops;
        let l = l_map(ops, &uv).unwrap();
        let sum = l_map(ops, &u).unwrap().add(&l_map(ops, &v).unwrap()).unwrap();
        prop_assert!(l.agrees_with(&sum).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(16) })]

    #[test]
    fn symbol_is_antisymmetric_in_the_first_two_slots(a in terms(1), b in terms(1), c in terms(1)) {
        let (f, g, h) = (unit(&a), unit(&b), unit(&c));
        let pn = ctx().sr.coeffs().pow_p(ctx().level.n);
        prop_assert_eq!((exponent(&f, &g, &h) + exponent(&g, &f, &h)) % pn, 0);
    }
}
