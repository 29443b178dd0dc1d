//! Frobenius, psi and the Galois operators acting on series.
//!
//! One [`Ops`] value describes an action in coordinates `(Y, U)`: Frobenius
//! `Y -> (1+Y)^p - 1, U -> U^p`, a cyclotomic operator `Y -> (1+Y)^chi - 1` fixing `U`,
//! and a Kummer operator `U -> (1+Y)^e U` fixing `Y`. The base action uses
//! `(pi, T)` with `chi = chi(gamma_1)` and `e = N`; the level-n actions reuse the
//! same formulas with `Y = pi_n`.

use serde::{Deserialize, Serialize};

use crate::coeff::{inv_mod_u64, vp_u64, CoeffElem};
use crate::error::{Error, Result};
use crate::series::{binomial_coeffs, PAdicExp, Series, SeriesRing, Sr};

/// Second residue variable at level n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ResVar {
    /// The original variable `T`.
    T,
    /// The level-n root `T_n = T^{1/p^n}`.
    #[default]
    Tn,
}

/// Characters of the chosen generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisParams {
    /// `chi(gamma_1)`, also the conjugation exponent `a`.
    pub chi_gamma1: i64,
    /// `N` in `gamma_2(T) = (1+pi)^N T`.
    pub eta_n: i64,
    pub level: u32,
    /// `chi(gamma_{1,n})`.
    pub chi_gamma1n: i64,
    /// `eta(gamma_{2,n})`.
    pub eta_gamma2n: i64,
}

/// Smallest primitive root modulo `p^2`.
pub fn primitive_root_mod_p2(p: u64) -> u64 {
    let m = p * p;
    let phi = p * (p - 1);
    let mut prime_factors = vec![p];
    let mut q = p - 1;
    let mut d = 2;
    while d * d <= q {
        if q.is_multiple_of(d) {
            prime_factors.push(d);
            while q.is_multiple_of(d) {
                q /= d;
            }
        }
        d += 1;
    }
    if q > 1 {
        prime_factors.push(q);
    }
    let powmod = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        b %= m;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % m;
            }
            b = b * b % m;
            e >>= 1;
        }
        r
    };
    (2..m).find(|g| g % p != 0 && prime_factors.iter().all(|q| powmod(*g, phi / q) != 1)).expect("odd prime")
}

impl GaloisParams {
    pub fn defaults(p: u64, n: u32) -> GaloisParams {
        let pn = p.pow(n) as i64;
        GaloisParams {
            chi_gamma1: primitive_root_mod_p2(p) as i64,
            eta_n: 1,
            level: n,
            chi_gamma1n: 1 + pn,
            eta_gamma2n: pn,
        }
    }

    pub fn validate(&self, p: u64) -> Result<()> {
        let pn = p.checked_pow(self.level).ok_or_else(|| Error::Config("level too large".into()))? as i64;
        if self.level == 0 {
            return Err(Error::Config("level n must be at least 1".into()));
        }
        if self.chi_gamma1.rem_euclid(p as i64) == 0 || self.eta_n.rem_euclid(p as i64) == 0 {
            return Err(Error::Config("chi(gamma_1) and N must be p-adic units".into()));
        }
        if (self.chi_gamma1n - 1).rem_euclid(pn) != 0 {
            return Err(Error::Config("chi(gamma_{1,n}) must be 1 mod p^n".into()));
        }
        if self.chi_gamma1n == 1 {
            return Err(Error::Config("chi(gamma_{1,n}) must differ from 1".into()));
        }
        if vp_u64(self.eta_gamma2n.unsigned_abs(), p) != Some(self.level) {
            return Err(Error::Config("eta(gamma_{2,n}) must have p-valuation exactly n".into()));
        }
        Ok(())
    }
}

/// Operator set on one coordinate system.
#[derive(Debug, Clone)]
pub struct Ops {
    sr: Sr,
    chi: i64,
    twist: i64,
    /// `D2 = scale * U dU`.
    d2_scale: i64,
}

impl Ops {
    /// Base action in `(pi, T)`.
    pub fn base(sr: &Sr, gp: &GaloisParams) -> Ops {
        Ops { sr: sr.clone(), chi: gp.chi_gamma1, twist: gp.eta_n, d2_scale: 1 }
    }

    /// Level-n action in `(Y, U)` with `Y = pi_n` and `U` the chosen residue variable.
    pub fn level(sr: &Sr, gp: &GaloisParams, var: ResVar) -> Ops {
        let p = sr.coeffs().p() as i64;
        let pn = p.pow(gp.level);
        match var {
            ResVar::Tn => Ops { sr: sr.clone(), chi: gp.chi_gamma1n, twist: gp.eta_gamma2n, d2_scale: 1 },
            ResVar::T => Ops { sr: sr.clone(), chi: gp.chi_gamma1n, twist: pn * gp.eta_gamma2n, d2_scale: pn },
        }
    }

    /// Ad hoc operator set, for tests.
    pub fn with_characters(sr: &Sr, chi: i64, twist: i64) -> Ops {
        Ops { sr: sr.clone(), chi, twist, d2_scale: 1 }
    }

    pub fn sr(&self) -> &Sr {
        &self.sr
    }
    pub fn chi(&self) -> i64 {
        self.chi
    }
    pub fn twist(&self) -> i64 {
        self.twist
    }
    pub fn d2_scale(&self) -> i64 {
        self.d2_scale
    }

    fn one_plus_y_pow(&self, e: PAdicExp) -> Result<Series> {
        Series::pi(&self.sr).binomial_pow1p(e)
    }

    /// `phi`: coefficient Frobenius, `Y -> (1+Y)^p - 1`, `U -> U^p`.
    pub fn phi(&self, a: &Series) -> Result<Series> {
        let p = self.sr.coeffs().p() as i64;
        let pim = self.one_plus_y_pow(PAdicExp::int(p))?.sub(&Series::one(&self.sr))?;
        let timg = Series::t(&self.sr).pow_int(p)?;
        a.frobenius_coeffs().substitute(&pim, &timg)
    }

    /// `psi` by basis decomposition: only `T`-exponents divisible by p survive, and the
    /// one-variable psi of `Y^j` is expanded in the basis `(1+Y)^s`.
    pub fn psi(&self, a: &Series) -> Result<Series> {
        let sr = &self.sr;
        let ring = sr.coeffs();
        let p = ring.p() as i32;
        let Some((tmin, tmax, ymin, ymax)) = a.support_box() else {
            return self.psi_window(a, Series::zero(sr));
        };
        let a = a.frobenius_inv_coeffs();
        let mut psi1 = std::collections::HashMap::new();
        let mut acc = Series::zero(sr);
        for i in tmin..=tmax {
            if i.rem_euclid(p) != 0 {
                continue;
            }
            let row = a.filter_terms(|ti, _| ti == i);
            if row.is_zero() {
                continue;
            }
            let mut img = Series::zero(sr);
            for j in ymin..=ymax {
                let c = row.coeff(i, j)?;
                if c.is_zero() {
                    continue;
                }
                if let std::collections::hash_map::Entry::Vacant(e) = psi1.entry(j) {
                    e.insert(self.psi_pi_power(j)?);
                }
                img = img.add(&psi1[&j].scale(&c)?)?;
            }
            acc = acc.add(&img.shift(i / p, 0)?)?;
        }
        self.psi_window(&a, acc)
    }

    /// Reliable window of psi(a): the unknown tail `Y^{h+1} A^+` of `a` maps into
    /// `sum_i p^i Y^{K-i} A^+` with `K = floor((h+1)/p)`.
    fn psi_window(&self, a: &Series, mut out: Series) -> Result<Series> {
        let p = self.sr.coeffs().p() as i32;
        out = out.with_prec(a.prec())?;
        if let Some(h) = a.y_hi() {
            let k = (h + 1).div_euclid(p);
            let digits = a.prec() + a.denom_exp() as i32;
            let cut = k - (digits - 1).clamp(0, k.max(0)) - 1;
            out = out.truncate_y(cut)?;
        }
        Ok(out)
    }

    /// One-variable `psi(Y^j)`.
    fn psi_pi_power(&self, j: i32) -> Result<Series> {
        let sr = &self.sr;
        let p = sr.coeffs().p() as i64;
        if j >= 0 {
            return psi_pi_power_nonneg(sr, j);
        }
        // Y^j = phi(Y)^j Q^{-j} with Q = phi(Y)/Y, so psi(Y^j) = Y^j psi(Q^{-j});
        // Q^k has degree (p-1)k and must not be truncated
        let k = -j as i64;
        let mut w = sr.window();
        w.y_hi = w.y_hi.max(((p - 1) * k + 1) as i32);
        let wide = SeriesRing::new(sr.ring().clone(), w)?;
        let y = Series::pi(&wide);
        let q = y.binomial_pow1p(PAdicExp::int(p))?.sub(&Series::one(&wide))?.shift(0, -1)?;
        let qk = q.pow_int(k)?;
        let mut acc = Series::zero(&wide);
        for (_, jj, c) in qk.terms() {
            acc = acc.add(&psi_pi_power_nonneg(&wide, jj)?.scale(&c)?)?;
        }
        acc.shift(0, j)?.rebase(sr)
    }

    /// `chi^c` reduced to the working width; negative `c` uses the inverse.
    fn chi_pow(&self, c: i64) -> i64 {
        let ring = self.sr.coeffs();
        let m = ring.pcap();
        let base = (self.chi.rem_euclid(m as i64)) as u64;
        let base = if c < 0 { inv_mod_u64(base, m).expect("unit character") } else { base };
        let mut e = c.unsigned_abs();
        let mut r = 1u64;
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                r = ring.lane_mul(r, b);
            }
            b = ring.lane_mul(b, b);
            e >>= 1;
        }
        r as i64
    }

    /// `gamma_1^c`: `Y -> (1+Y)^{chi^c} - 1`, `U` fixed.
    pub fn gamma1_pow(&self, c: i64, a: &Series) -> Result<Series> {
        if c == 0 {
            return Ok(a.clone());
        }
        let pim = self.one_plus_y_pow(PAdicExp::int(self.chi_pow(c)))?.sub(&Series::one(&self.sr))?;
        a.substitute(&pim, &Series::t(&self.sr))
    }

    pub fn gamma1(&self, a: &Series) -> Result<Series> {
        self.gamma1_pow(1, a)
    }

    /// Apply `row_k -> mult(k) * row_k` to each `U^k` row.
    fn rowwise(&self, a: &Series, mut mult: impl FnMut(i32) -> Result<Option<Series>>) -> Result<Series> {
        let Some((tmin, tmax, _, _)) = a.support_box() else {
            return Ok(a.clone());
        };
        let mut acc = Series::zero(&self.sr);
        for k in tmin..=tmax {
            let row = a.filter_terms(|i, _| i == k);
            if row.is_zero() {
                continue;
            }
            let img = match mult(k)? {
                Some(m) => row.mul(&m)?,
                None => row,
            };
            acc = acc.add(&img)?;
        }
        let mut acc = acc.with_prec(a.prec())?;
        if let Some(h) = a.y_hi() {
            acc = acc.truncate_y(h)?;
        }
        Ok(acc)
    }

    /// `gamma_2^c`: `a_k U^k -> a_k (1+Y)^{c e k} U^k`.
    pub fn gamma2_pow(&self, c: PAdicExp, a: &Series) -> Result<Series> {
        self.rowwise(a, |k| {
            if k == 0 || c.num == 0 {
                return Ok(None);
            }
            let e = PAdicExp::frac(c.num * self.twist * k as i64, c.den);
            Ok(Some(self.one_plus_y_pow(e)?))
        })
    }

    pub fn gamma2(&self, a: &Series) -> Result<Series> {
        self.gamma2_pow(PAdicExp::int(1), a)
    }

    /// `(gamma_2^c - 1)/(gamma_2 - 1) = sum_{j>=1} C(c,j) (gamma_2 - 1)^{j-1}`.
    pub fn gamma2_ratio(&self, c: PAdicExp, a: &Series) -> Result<Series> {
        let ring = self.sr.coeffs();
        self.rowwise(a, |k| {
            if k == 0 {
                let cc = ring.mul(&ring.from_int(c.num), &ring.inv(&ring.from_int(c.den))?)?;
                return Ok(Some(Series::monomial(&self.sr, &cc, 0, 0)?));
            }
            let q = self.one_plus_y_pow(PAdicExp::int(self.twist * k as i64))?.sub(&Series::one(&self.sr))?;
            q.nilpotent_depth()?;
            let coeffs = binomial_coeffs(ring, c, self.sr.window().y_hi.max(1) as usize * 4 + 64)?;
            let mut acc = Series::zero(&self.sr);
            let mut pw = Series::one(&self.sr);
            for cj in coeffs.iter().skip(1) {
                if !cj.is_zero() {
                    acc = acc.add(&pw.scale(cj)?)?;
                }
                pw = pw.mul(&q)?;
                if pw.is_zero() {
                    break;
                }
            }
            Ok(Some(acc))
        })
    }

    /// `D2` in these coordinates.
    pub fn d2(&self, a: &Series) -> Result<Series> {
        a.d2()?.scale_int(self.d2_scale)
    }

    /// `u = -sum_{k>=0} phi^k(v)`, so that `(phi - 1) u = v`.
    pub fn solve_phi_minus_one(&self, v: &Series) -> Result<Series> {
        if let Some((_, _, ymin, _)) = v.support_box() {
            if ymin < 1 {
                return Err(Error::NotInDomain(format!(
                    "right-hand side has a term at pi^{ymin}; phi - 1 is only inverted on pi S"
                )));
            }
        }
        let mut acc = Series::zero(&self.sr);
        let mut cur = v.clone();
        for _ in 0..256 {
            if cur.is_zero() {
                return Ok(acc.neg());
            }
            acc = acc.add(&cur)?;
            cur = self.phi(&cur)?;
        }
        Err(Error::PrecisionExhausted("phi-iteration did not leave the window".into()))
    }
}

/// `psi(Y^j)` for `j >= 0`: expand `Y^j = sum_i C(j,i) (-1)^{j-i} (1+Y)^i` and keep `p | i`.
fn psi_pi_power_nonneg(sr: &Sr, j: i32) -> Result<Series> {
    let ring = sr.coeffs();
    let p = ring.p() as i64;
    let binom = binomial_coeffs(ring, PAdicExp::int(j as i64), j as usize)?;
    let y = Series::pi(sr);
    let mut acc = Series::zero(sr);
    for i in (0..=j as i64).step_by(p as usize) {
        let mut c = binom[i as usize].clone();
        if (j as i64 - i) % 2 == 1 {
            c = ring.neg(&c);
        }
        acc = acc.add(&y.binomial_pow1p(PAdicExp::int(i / p))?.scale(&c)?)?;
    }
    Ok(acc)
}

/// Coefficient of a scalar `c/d`, for callers that hold characters as integers.
pub fn scalar(sr: &Sr, num: i64, den: i64) -> Result<CoeffElem> {
    let ring = sr.coeffs();
    ring.mul(&ring.from_int(num), &ring.inv(&ring.from_int(den))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{CoeffRing, RingParams};
    use crate::series::{parse_series, SeriesRing, Window};

    fn setup(f: usize) -> (Sr, Ops) {
        let ring = CoeffRing::new(RingParams::new(3, f, 6, 4)).unwrap();
        let sr = SeriesRing::new(ring, Window { t_lo: -60, t_hi: 60, y_lo: -30, y_hi: 24 }).unwrap();
        let gp = GaloisParams::defaults(3, 1);
        let ops = Ops::base(&sr, &gp);
        (sr, ops)
    }

    fn s(sr: &Sr, t: &str) -> Series {
        parse_series(sr, t).unwrap()
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root_mod_p2(3), 2);
        assert_eq!(primitive_root_mod_p2(5), 2);
        assert_eq!(primitive_root_mod_p2(7), 3);
    }

    #[test]
    fn phi_examples() {
        let (sr, ops) = setup(1);
        assert_eq!(ops.phi(&s(&sr, "T")).unwrap(), s(&sr, "T^3"));
        assert_eq!(ops.phi(&s(&sr, "pi")).unwrap(), s(&sr, "3*pi + 3*pi^2 + pi^3"));
        assert_eq!(ops.phi(&Series::one(&sr)).unwrap(), Series::one(&sr));
    }

    #[test]
    fn psi_examples() {
        let (sr, ops) = setup(1);
        assert_eq!(ops.psi(&Series::one(&sr)).unwrap(), Series::one(&sr));
        let x = s(&sr, "T^2*pi");
        assert_eq!(ops.psi(&ops.phi(&x).unwrap()).unwrap(), x);
        assert!(ops.psi(&s(&sr, "T")).unwrap().is_zero());
        assert!(ops.psi(&s(&sr, "1 + pi")).unwrap().is_zero());
        // T^2 (1+pi)^2 has no p-divisible exponents
        let b = s(&sr, "T^2 + 2*T^2*pi + T^2*pi^2");
        assert!(ops.psi(&b).unwrap().is_zero());
    }

    #[test]
    fn psi_left_inverse_with_negative_exponents() {
        let (sr, ops) = setup(2);
        let x = s(&sr, "x*T^-1*pi^-2 + 2*pi + T");
        assert!(ops.psi(&ops.phi(&x).unwrap()).unwrap().agrees_with(&x).unwrap());
    }

    #[test]
    fn gamma_examples() {
        let (sr, ops) = setup(1);
        assert_eq!(ops.gamma1(&s(&sr, "pi")).unwrap(), s(&sr, "2*pi + pi^2"));
        assert_eq!(ops.gamma1(&s(&sr, "T")).unwrap(), s(&sr, "T"));
        assert_eq!(ops.gamma2(&s(&sr, "pi")).unwrap(), s(&sr, "pi"));
        assert_eq!(ops.gamma2(&s(&sr, "T")).unwrap(), s(&sr, "T + T*pi"));
        let x = s(&sr, "T^2*pi + T^-1");
        let mut it = x.clone();
        for _ in 0..3 {
            it = ops.gamma2(&it).unwrap();
        }
        assert!(ops.gamma2_pow(PAdicExp::int(3), &x).unwrap().agrees_with(&it).unwrap());
    }

    #[test]
    fn conjugation_relations() {
        let (sr, ops) = setup(1);
        let x = s(&sr, "T*pi + 2*T^-1*pi^2 + pi^3");
        let a = ops.chi();
        let lhs = ops.gamma1(&ops.gamma2(&x).unwrap()).unwrap();
        let rhs = ops.gamma2_pow(PAdicExp::int(a), &ops.gamma1(&x).unwrap()).unwrap();
        assert!(lhs.agrees_with(&rhs).unwrap());
        let lhs = ops.gamma1(&ops.gamma2_pow(PAdicExp::frac(1, a), &x).unwrap()).unwrap();
        let rhs = ops.gamma2(&ops.gamma1(&x).unwrap()).unwrap();
        assert!(lhs.agrees_with(&rhs).unwrap());
    }

    #[test]
    fn ratio_operator_identity() {
        let (sr, ops) = setup(1);
        let x = s(&sr, "T*pi + 2*T^-2 + pi^2");
        let c = PAdicExp::frac(1, 2);
        let r = ops.gamma2_ratio(c, &x).unwrap();
        let lhs = ops.gamma2(&r).unwrap().sub(&r).unwrap();
        let rhs = ops.gamma2_pow(c, &x).unwrap().sub(&x).unwrap();
        assert!(lhs.agrees_with(&rhs).unwrap());
        assert!(ops.gamma2_ratio(PAdicExp::int(1), &x).unwrap().agrees_with(&x).unwrap());
    }

    #[test]
    fn solve_phi_minus_one_round_trip() {
        let (sr, ops) = setup(1);
        let v = s(&sr, "pi + T*pi^2").with_prec(1).unwrap();
        let u = ops.solve_phi_minus_one(&v).unwrap();
        let back = ops.phi(&u).unwrap().sub(&u).unwrap();
        assert!(back.agrees_with(&v).unwrap());
        assert!(ops.solve_phi_minus_one(&s(&sr, "1 + pi")).is_err());
    }
}
