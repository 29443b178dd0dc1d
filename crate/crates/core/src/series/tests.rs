use super::*;
use crate::coeff::{CoeffRing, RingParams};

fn sr(p: u64, f: usize) -> Sr {
    let ring = CoeffRing::new(RingParams::new(p, f, 6, 4)).unwrap();
    SeriesRing::new(ring, Window { t_lo: -40, t_hi: 40, y_lo: -30, y_hi: 24 }).unwrap()
}

fn s(r: &Sr, t: &str) -> Series {
    parse_series(r, t).unwrap()
}

#[test]
fn parse_print_round_trip() {
    let r = sr(3, 1);
    for text in ["1 + 3*T^-1*pi^2 - 1/3*pi^5", "0", "-2*T + pi^-3 + O(pi^7)", "5/p^2*T^2*pi"] {
        let a = s(&r, text);
        let b = s(&r, &print_series(&a));
        assert_eq!(a, b, "{text} -> {}", print_series(&a));
    }
    let r2 = sr(5, 2);
    let a = s(&r2, "1 + 2*x*T*pi + x^3*pi^2");
    assert_eq!(a, s(&r2, &print_series(&a)));
}

#[test]
fn parse_reports_position() {
    let r = sr(3, 1);
    match parse_series(&r, "1 + * pi") {
        Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
        other => panic!("{other:?}"),
    }
}

#[test]
fn product_of_binomials() {
    let r = sr(3, 1);
    let a = s(&r, "1 + pi");
    let b = s(&r, "1 - pi");
    assert_eq!(a.mul(&b).unwrap(), s(&r, "1 - pi^2"));
    let c = s(&r, "T + 2*T^-1*pi");
    assert_eq!(c.mul(&c).unwrap(), s(&r, "T^2 + 4*pi + 4*T^-2*pi^2"));
}

#[test]
fn truncation_is_tracked() {
    let r = sr(3, 1);
    let a = s(&r, "pi^20");
    let sq = a.mul(&a).unwrap();
    assert!(sq.is_zero());
    assert_eq!(sq.y_hi(), Some(24));
    let b = s(&r, "1 + pi + O(pi^10)");
    let c = b.mul(&s(&r, "pi^-3")).unwrap();
    assert_eq!(c.y_hi(), Some(6));
    assert!(c.coeff(0, 7).is_err());
}

#[test]
fn t_window_is_enforced() {
    let r = sr(3, 1);
    let a = s(&r, "T^30");
    assert!(matches!(a.mul(&a), Err(Error::WindowUnderflow(_))));
}

#[test]
fn inverse_of_principal_unit() {
    let r = sr(3, 1);
    let a = s(&r, "1 + pi + 3*T");
    let prod = a.mul(&a.invert().unwrap()).unwrap();
    assert!(prod.agrees_with(&Series::one(&r)).unwrap());
}

#[test]
fn inverse_with_negative_pi_tail() {
    // (1+pi)^3 - 1 = pi^3 (1 + 3 pi^-1 + 3 pi^-2)
    let r = sr(3, 1);
    let a = s(&r, "3*pi + 3*pi^2 + pi^3");
    let inv = a.invert().unwrap();
    assert!(inv.is_exact());
    assert!(a.mul(&inv).unwrap().agrees_with(&Series::one(&r)).unwrap());
}

#[test]
fn log_is_additive() {
    let r = sr(3, 1);
    let u = s(&r, "1 + pi + 3*T");
    let v = s(&r, "1 + T^-1*pi^2");
    let lhs = u.mul(&v).unwrap().log_unit().unwrap();
    let rhs = u.log_unit().unwrap().add(&v.log_unit().unwrap()).unwrap();
    assert!(lhs.agrees_with(&rhs).unwrap());
}

#[test]
fn exp_log_round_trip() {
    let r = sr(3, 1);
    let u = s(&r, "1 + 3*T^-1*pi^2");
    let back = u.log_unit().unwrap().exp().unwrap();
    assert!(back.agrees_with(&u).unwrap());
}

#[test]
fn binomial_matches_repeated_product() {
    let r = sr(5, 1);
    let u = s(&r, "1 + pi + 5*T");
    let cube = u.mul(&u).unwrap().mul(&u).unwrap();
    assert!(u.binomial_pow(PAdicExp::int(3)).unwrap().agrees_with(&cube).unwrap());
    let third = u.binomial_pow(PAdicExp::frac(1, 3)).unwrap();
    assert!(third.pow_int(3).unwrap().agrees_with(&u).unwrap());
}

#[test]
fn substitution_matches_direct_expansion() {
    let r = sr(3, 1);
    let a = s(&r, "T*pi^2 + 2*T^-1*pi + pi^-1");
    let pim = s(&r, "pi + pi^2");
    let timg = s(&r, "T + T*pi");
    let got = a.substitute(&pim, &timg).unwrap();
    let inv = pim.invert().unwrap();
    let want = timg
        .mul(&pim.mul(&pim).unwrap())
        .unwrap()
        .add(&timg.invert().unwrap().mul(&pim).unwrap().scale_int(2).unwrap())
        .unwrap()
        .add(&inv)
        .unwrap();
    assert!(got.agrees_with(&want).unwrap());
}

#[test]
fn derivations_obey_leibniz() {
    let r = sr(3, 1);
    let a = s(&r, "1 + T*pi + 2*T^-2*pi^3");
    let b = s(&r, "T + pi^2");
    let ab = a.mul(&b).unwrap();
    for d in [Series::d1 as fn(&Series) -> Result<Series>, Series::d2] {
        let lhs = d(&ab).unwrap();
        let rhs = d(&a).unwrap().mul(&b).unwrap().add(&a.mul(&d(&b).unwrap()).unwrap()).unwrap();
        assert!(lhs.agrees_with(&rhs).unwrap());
    }
}

#[test]
fn denominators_and_precision() {
    let r = sr(3, 1);
    let a = s(&r, "1/3*pi");
    let sq = a.mul(&a).unwrap();
    assert_eq!(sq.denom_exp(), 2);
    assert!(matches!(sq.mul(&sq).and_then(|x| x.mul(&a)), Err(Error::DenominatorBudgetExceeded { .. })));
    let third = s(&r, "3*pi").div_p(1).unwrap();
    assert_eq!(third, s(&r, "pi"));
    assert_eq!(third.prec(), 9);
}
