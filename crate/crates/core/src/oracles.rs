//! Brute-force reference implementations: `psi` through the trace over the `p^2`
//! conjugates, monomial-by-monomial substitution, and the pairing computed through the
//! Kummer cochains and the cup product.
//!
//! None of this shares code with the closed-form route above the series layer.

use std::sync::Arc;

use crate::coeff::CoeffElem;
use crate::complex::{tate_trace, Complex, TateConstant, Variant};
use crate::error::{Error, Result};
use crate::forms::Form2;
use crate::galois::ResVar;
use crate::kummer::{iota_n, Level};
use crate::series::{Series, SeriesRing, Sr, Window};
use crate::symbol::SymbolInput;

/// `sum a_ij t_img^i pi_img^j`, each monomial expanded on its own.
pub fn substitute_naive(a: &Series, pi_img: &Series, t_img: &Series) -> Result<Series> {
    let sr = a.sr();
    let mut acc = Series::zero(sr);
    let mut t_low = 0;
    for (i, j, c) in a.terms() {
        let tp = t_img.pow_int(i as i64)?;
        if let Some((_, _, lo, _)) = tp.support_box() {
            t_low = t_low.min(lo);
        }
        let term = tp.mul(&pi_img.pow_int(j as i64)?)?.scale(&c)?;
        acc = acc.add(&term)?;
    }
    let mut acc = acc.with_prec(a.prec())?;
    if let Some(h) = a.y_hi() {
        // the unknown tail starts at pi^{h+1}; its image starts no lower than the
        // lowest surviving exponent of the next few powers
        let digits = a.prec() + a.denom_exp() as i32;
        let mut low = i32::MAX;
        let mut pw = pi_img.pow_int(h as i64 + 1)?;
        for _ in 0..=a.ring().cap() {
            let cut = pw.with_prec(digits)?;
            if let Some((_, _, lo, _)) = cut.support_box() {
                low = low.min(lo);
            }
            if let Some(hh) = cut.y_hi() {
                low = low.min(hh + 1);
            }
            pw = pw.mul(pi_img)?;
        }
        if low != i32::MAX {
            acc = acc.truncate_y(low - 1 + t_low)?;
        }
    }
    Ok(acc)
}

/// Series over `Z_q[zeta_p]` in the basis `1, zeta, ..., zeta^{p-2}`.
#[derive(Clone)]
struct ZSeries {
    c: Vec<Series>,
}

impl ZSeries {
    fn degree(sr: &Sr) -> usize {
        sr.coeffs().p() as usize - 1
    }

    fn embed(s: &Series) -> ZSeries {
        let mut c = vec![Series::zero(s.sr()); ZSeries::degree(s.sr())];
        c[0] = s.clone();
        ZSeries { c }
    }

    /// Fold coordinates on `zeta^0..zeta^k` using `zeta^p = 1` and `1 + zeta + ... + zeta^{p-1} = 0`.
    fn reduce(sr: &Sr, raw: Vec<Series>) -> Result<ZSeries> {
        let p = sr.coeffs().p() as usize;
        let mut slots = vec![Series::zero(sr); p];
        for (k, s) in raw.into_iter().enumerate() {
            slots[k % p] = slots[k % p].add(&s)?;
        }
        let top = slots.pop().expect("p slots");
        for s in slots.iter_mut() {
            *s = s.sub(&top)?;
        }
        Ok(ZSeries { c: slots })
    }

    fn zeta_pow(sr: &Sr, e: usize) -> Result<ZSeries> {
        let mut raw = vec![Series::zero(sr); e + 1];
        raw[e] = Series::one(sr);
        ZSeries::reduce(sr, raw)
    }

    fn add(&self, o: &ZSeries) -> Result<ZSeries> {
        let c = self.c.iter().zip(&o.c).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(ZSeries { c })
    }

    fn mul(&self, o: &ZSeries) -> Result<ZSeries> {
        let sr = self.c[0].sr().clone();
        let d = self.c.len();
        let mut raw = vec![Series::zero(&sr); 2 * d - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    raw[i + j] = raw[i + j].add(&a.mul(b)?)?;
                }
            }
        }
        ZSeries::reduce(&sr, raw)
    }

    fn scale(&self, s: &Series) -> Result<ZSeries> {
        Ok(ZSeries { c: self.c.iter().map(|a| a.mul(s)).collect::<Result<_>>()? })
    }

    fn is_zero(&self) -> bool {
        self.c.iter().all(|a| a.is_zero())
    }

    fn descend(self) -> Result<Series> {
        if self.c[1..].iter().any(|a| !a.is_zero()) {
            return Err(Error::DecompositionFailed("the trace does not descend from Z_q[zeta_p]".into()));
        }
        Ok(self.c.into_iter().next().expect("nonempty"))
    }
}

/// Powers `q^b` of `q = zeta^j (1+pi) - 1` for `b` in `lo..=hi`.
fn conjugate_powers(sr: &Sr, j: usize, lo: i32, hi: i32) -> Result<Vec<(i32, ZSeries)>> {
    let one = Series::one(sr);
    let pi = Series::pi(sr);
    let zj = ZSeries::zeta_pow(sr, j)?;
    let q = zj.scale(&pi.add(&one)?)?.add(&ZSeries::embed(&one.neg()))?;
    let mut out = vec![(0, ZSeries::embed(&one))];
    let mut pw = ZSeries::embed(&one);
    for b in 1..=hi.max(0) {
        pw = pw.mul(&q)?;
        out.push((b, pw.clone()));
    }
    if lo < 0 {
        // q^{-1} = zeta^{-j} pi^{-1} sum_k (zeta^{-j} - 1)^k pi^{-k}
        let p = sr.coeffs().p() as usize;
        let zinv = ZSeries::zeta_pow(sr, (p - j % p) % p)?;
        let u = zinv.add(&ZSeries::embed(&one.neg()))?;
        let pinv = Series::monomial(sr, &sr.coeffs().from_int(1), 0, -1)?;
        let mut geo = ZSeries::embed(&Series::zero(sr));
        let mut term = ZSeries::embed(&one);
        let mut pik = one.clone();
        for _ in 0..=(sr.coeffs().cap() as usize + 2) * p {
            if term.is_zero() {
                break;
            }
            geo = geo.add(&term.scale(&pik)?)?;
            term = term.mul(&u)?;
            pik = pik.mul(&pinv)?;
        }
        let qinv = geo.mul(&zinv)?.scale(&pinv)?;
        let mut pw = ZSeries::embed(&one);
        for b in 1..=(-lo) {
            pw = pw.mul(&qinv)?;
            out.push((-b, pw.clone()));
        }
    }
    Ok(out)
}

/// A window wide enough for the conjugate expansions of `a`.
fn wide_ring(a: &Series) -> Result<Sr> {
    let sr = a.sr();
    let ring = sr.coeffs();
    let w = sr.window();
    let p = ring.p() as i32;
    let extra = (ring.cap() as i32 + 4) * (p - 1) + 2 * p;
    let wide = Window { t_lo: w.t_lo, t_hi: w.t_hi, y_lo: p * w.y_lo - extra, y_hi: w.y_hi };
    SeriesRing::new(Arc::clone(sr.ring()), wide)
}

/// `sum_{i,j} a(zeta^i T, zeta^j (1+pi) - 1)`.
fn trace_over_conjugates(a: &Series) -> Result<Series> {
    let sr = a.sr();
    let p = sr.coeffs().p() as usize;
    let Some((_, _, lo, hi)) = a.support_box() else {
        return Ok(Series::zero(sr));
    };
    let terms = a.terms();
    let mut total = ZSeries::embed(&Series::zero(sr));
    for j in 0..p {
        let qp = conjugate_powers(sr, j, lo, hi)?;
        let qpow = |b: i32| &qp.iter().find(|e| e.0 == b).expect("power in range").1;
        for i in 0..p {
            for (ti, tj, c) in &terms {
                let e = (i * ti.rem_euclid(p as i32) as usize) % p;
                let mono = Series::monomial(sr, c, *ti, 0)?;
                let z = ZSeries::zeta_pow(sr, e)?.scale(&mono)?;
                total = total.add(&z.mul(qpow(*tj))?)?;
            }
        }
    }
    total.descend()
}

/// Lane digits of `c / p^k` modulo `p`.
fn digit(sr: &Sr, c: &CoeffElem, k: u32) -> Result<CoeffElem> {
    let ring = sr.coeffs();
    let q = ring.div_p(c, k)?;
    let p = ring.p();
    let lanes: Vec<i64> = q.lanes().iter().map(|l| (l % p) as i64).collect();
    ring.from_lanes(&lanes)
}

/// Inverse of `phi` on its image, one p-adic digit at a time using `phi(pi) = pi^p mod p`.
fn phi_inverse(y: &Series) -> Result<Series> {
    let sr = y.sr();
    let ring = sr.coeffs();
    let p = ring.p() as i32;
    if y.denom_exp() > 0 && !y.is_zero() {
        return Err(Error::DecompositionFailed("trace over p^2 is not integral".into()));
    }
    let phi_pi = Series::pi(sr).add(&Series::one(sr))?.pow_int(p as i64)?.sub(&Series::one(sr))?;
    let phi_t = Series::t(sr).pow_int(p as i64)?;
    let prec = y.prec();
    let mut r = y.clone();
    let mut h = Series::zero(sr);
    for k in 0..prec.max(0) as u32 {
        if r.is_zero() {
            break;
        }
        let mut s_terms = Vec::new();
        for (i, j, c) in r.terms() {
            let v = ring.valuation(&c);
            if v > k as i32 {
                continue;
            }
            if v < k as i32 || i % p != 0 || j % p != 0 {
                return Err(Error::DecompositionFailed(format!("T^{i} pi^{j} is not in the image of phi")));
            }
            let d = ring.frobenius_inv(&digit(sr, &c, k)?);
            s_terms.push((i / p, j / p, d));
        }
        let s = Series::from_terms(sr, &s_terms)?;
        let img = substitute_naive(&s.frobenius_coeffs(), &phi_pi, &phi_t)?;
        h = h.add(&s.mul_p(k)?)?;
        r = r.sub(&img.mul_p(k)?)?;
    }
    let mut h = h.with_prec(prec)?;
    if let Some(top) = y.y_hi() {
        h = h.truncate_y(top.div_euclid(p))?;
    }
    Ok(h)
}

/// `psi(a) = phi^{-1}(p^-2 Tr(a))`.
pub fn psi_naive(a: &Series) -> Result<Series> {
    let sr = a.sr().clone();
    let wide = wide_ring(a)?;
    let x = a.rebase(&wide)?;
    let mut tr = trace_over_conjugates(&x)?;
    if let Some(h) = a.y_hi() {
        // the unknown tail enters through (zeta^j - 1)^{h+1}
        let p = sr.coeffs().p() as i32;
        tr = tr.with_prec((h + 1) / (p - 1))?;
    }
    let y = tr.div_p(2)?;
    phi_inverse(&y)?.rebase(&sr)
}

/// The pairing through `iota_n(F3) cup (iota_n(F1) cup iota_n(F2))`, then `-c TR` of its
/// image under `lambda -> lambda dlog(1+pi_n) ^ dlog T_n`.
pub fn pairing_via_cohomology(level: &Level, inp: &SymbolInput) -> Result<u64> {
    if level.var != ResVar::Tn {
        return Err(Error::Config(
            "the cohomological route is computed in the level-n coordinates (pi_n, T_n) only".into(),
        ));
    }
    let cx = Complex::new(level.ops.clone(), Variant::Phi);
    let u1 = iota_n(level, &inp.f1)?;
    let u2 = iota_n(level, &inp.f2)?;
    let u3 = iota_n(level, &inp.f3)?;
    let cup = cx.cup_h1_h1(&u1, &u2)?;
    let h = cx.pair_h1_h2_simplified(&u3, &cup)?;
    let sr = &level.sr;
    let one_plus = Series::pi(sr).add(&Series::one(sr))?;
    let lambda = h.mul(&one_plus.invert()?)?.shift(-1, 0)?;
    let c = TateConstant::new(sr.coeffs(), &level.gp)?;
    tate_trace(&Form2::new(lambda), &c, level.n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{CoeffRing, RingParams};
    use crate::galois::{GaloisParams, Ops};
    use crate::series::parse_series;

    fn setup() -> (Sr, Ops) {
        let ring = CoeffRing::new(RingParams::new(3, 1, 5, 4)).unwrap();
        let sr = SeriesRing::new(ring, Window { t_lo: -40, t_hi: 40, y_lo: -20, y_hi: 24 }).unwrap();
        let ops = Ops::base(&sr, &GaloisParams::defaults(3, 1));
        (sr, ops)
    }

    #[test]
    fn psi_naive_examples() {
        let (sr, ops) = setup();
        assert!(psi_naive(&parse_series(&sr, "T").unwrap()).unwrap().is_zero());
        let x = parse_series(&sr, "1 + 2*T^-1*pi + pi^2").unwrap();
        assert_eq!(psi_naive(&ops.phi(&x).unwrap()).unwrap(), x);
        for t in ["T^2*pi^3 + 5*pi", "pi^-2 + T*pi^-1", "T^3*pi^4"] {
            let a = parse_series(&sr, t).unwrap();
            assert_eq!(psi_naive(&a).unwrap(), ops.psi(&a).unwrap(), "{t}");
        }
    }

    #[test]
    fn substitute_naive_matches() {
        let (sr, ops) = setup();
        let a = parse_series(&sr, "T^-1*pi^2 + 3*pi^-1 + T^2").unwrap();
        let id = substitute_naive(&a, &Series::pi(&sr), &Series::t(&sr)).unwrap();
        assert_eq!(id, a);
        let pim = ops.phi(&Series::pi(&sr)).unwrap();
        let tim = Series::t(&sr).pow_int(3).unwrap();
        assert_eq!(substitute_naive(&a, &pim, &tim).unwrap(), a.substitute(&pim, &tim).unwrap());
    }
}
