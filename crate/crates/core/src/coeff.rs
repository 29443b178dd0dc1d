//! Unramified coefficient rings `W(F_{p^f}) / p^m` with explicit denominators.
//!
//! Elements are stored as `p^{-e} * mantissa` where the mantissa is a degree `< f`
//! polynomial in the generator `x` of the extension, reduced modulo the defining
//! polynomial and modulo `p^{prec + e}`. `prec` is the absolute precision: the value is
//! known modulo `p^prec`. Mantissa lanes live in `Z / p^{m + budget}` so that every
//! representable element fits in the same fixed-width integers.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the coefficient ring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingParams {
    /// Odd prime.
    pub p: u64,
    /// Residue degree.
    pub f: usize,
    /// Working p-adic precision.
    pub m: u32,
    /// Largest admissible denominator exponent.
    pub budget: u32,
    /// Low coefficients `g_0..g_{f-1}` of the monic defining polynomial. `None` picks the
    /// first irreducible polynomial mod p in lexicographic order.
    pub modulus: Option<Vec<i64>>,
}

impl RingParams {
    pub fn new(p: u64, f: usize, m: u32, budget: u32) -> Self {
        RingParams { p, f, m, budget, modulus: None }
    }
}

/// Shared arithmetic context for one coefficient ring.
#[derive(Debug)]
pub struct CoeffRing {
    params: RingParams,
    cap: u32,
    pows: Vec<u64>,
    modulus: Vec<u64>,
    frob_cols: Vec<Vec<u64>>,
    frob_inv_cols: Vec<Vec<u64>>,
}

pub type Ring = Arc<CoeffRing>;

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn vp_u64(mut n: u64, p: u64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    Some(v)
}

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

impl CoeffRing {
    pub fn new(params: RingParams) -> Result<Ring> {
        let p = params.p;
        if p == 2 || !is_prime(p) {
            return Err(Error::Config(format!("p = {p} must be an odd prime")));
        }
        if params.f == 0 {
            return Err(Error::Config("residue degree f must be >= 1".into()));
        }
        if params.m == 0 {
            return Err(Error::Config("precision m must be >= 1".into()));
        }
        let cap = params.m + params.budget;
        let mut pows = vec![1u64];
        for _ in 0..cap {
            let last = *pows.last().unwrap();
            let next = last
                .checked_mul(p)
                .filter(|v| *v < (1u64 << 62))
                .ok_or_else(|| Error::Config(format!("p^(m+budget) = {p}^{cap} overflows 62 bits")))?;
            pows.push(next);
        }
        let pcap = pows[cap as usize];
        let f = params.f;
        let low: Vec<i64> = match &params.modulus {
            Some(g) => {
                if g.len() != f {
                    return Err(Error::Config(format!("modulus needs {f} low coefficients, got {}", g.len())));
                }
                let red: Vec<u64> = g.iter().map(|c| c.rem_euclid(p as i64) as u64).collect();
                if f > 1 && !irreducible_mod_p(&red, p) {
                    return Err(Error::Config("modulus polynomial is not irreducible mod p".into()));
                }
                g.clone()
            }
            None => first_irreducible(f, p).into_iter().map(|c| c as i64).collect(),
        };
        let modulus: Vec<u64> = low.iter().map(|c| c.rem_euclid(pcap as i64) as u64).collect();
        let mut ring = CoeffRing { params, cap, pows, modulus, frob_cols: vec![], frob_inv_cols: vec![] };
        ring.build_frobenius();
        Ok(Arc::new(ring))
    }

    pub fn params(&self) -> &RingParams {
        &self.params
    }
    pub fn p(&self) -> u64 {
        self.params.p
    }
    pub fn f(&self) -> usize {
        self.params.f
    }
    pub fn m(&self) -> u32 {
        self.params.m
    }
    pub fn budget(&self) -> u32 {
        self.params.budget
    }
    /// Number of p-adic digits a mantissa lane can hold.
    pub fn cap(&self) -> u32 {
        self.cap
    }
    pub fn pcap(&self) -> u64 {
        self.pows[self.cap as usize]
    }
    pub fn pow_p(&self, k: u32) -> u64 {
        self.pows[k.min(self.cap) as usize]
    }
    /// Monic defining polynomial reduced to lanes.
    pub fn modulus_lanes(&self) -> &[u64] {
        &self.modulus
    }

    // ---- raw lane arithmetic modulo p^cap -------------------------------------------

    #[inline]
    pub(crate) fn lane_add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        let m = self.pcap();
        if s >= m {
            s - m
        } else {
            s
        }
    }
    #[inline]
    pub(crate) fn lane_sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.pcap() - b
        }
    }
    #[inline]
    pub(crate) fn lane_mul(&self, a: u64, b: u64) -> u64 {
        mulmod(a, b, self.pcap())
    }
    pub(crate) fn lane_from_i64(&self, c: i64) -> u64 {
        c.rem_euclid(self.pcap() as i64) as u64
    }

    /// `out += a * b` in the Galois ring (all lanes mod p^cap).
    #[inline]
    pub(crate) fn mul_acc(&self, a: &[u64], b: &[u64], out: &mut [u64]) {
        let f = self.f();
        if f == 1 {
            out[0] = self.lane_add(out[0], self.lane_mul(a[0], b[0]));
            return;
        }
        let mut prod = vec![0u64; 2 * f - 1];
        for i in 0..f {
            if a[i] == 0 {
                continue;
            }
            for j in 0..f {
                prod[i + j] = self.lane_add(prod[i + j], self.lane_mul(a[i], b[j]));
            }
        }
        self.reduce_poly(&mut prod);
        for i in 0..f {
            out[i] = self.lane_add(out[i], prod[i]);
        }
    }

    pub(crate) fn mul_lanes(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0; self.f()];
        self.mul_acc(a, b, &mut out);
        out
    }

    /// Reduce a coefficient vector of length up to `2f - 1` modulo the defining polynomial.
    fn reduce_poly(&self, prod: &mut Vec<u64>) {
        let f = self.f();
        for d in (f..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            // x^d = x^{d-f} * x^f = -x^{d-f} * sum g_i x^i
            for i in 0..f {
                let t = self.lane_mul(c, self.modulus[i]);
                prod[d - f + i] = self.lane_sub(prod[d - f + i], t);
            }
        }
        prod.truncate(f);
    }

    fn poly_eval_lanes(&self, g_low: &[u64], x: &[u64]) -> Vec<u64> {
        // evaluates the monic polynomial x^f + sum g_i x^i at a ring element
        let f = self.f();
        // Horner on coefficients [g_0, ..., g_{f-1}, 1]
        let mut coeffs: Vec<u64> = g_low.to_vec();
        coeffs.push(1);
        let mut res = vec![0u64; f];
        for c in coeffs.iter().rev() {
            res = self.mul_lanes(&res, x);
            res[0] = self.lane_add(res[0], *c);
        }
        res
    }

    fn poly_deriv_eval_lanes(&self, g_low: &[u64], x: &[u64]) -> Vec<u64> {
        let f = self.f();
        let mut coeffs: Vec<u64> = (1..f).map(|i| self.lane_mul(g_low[i], i as u64)).collect();
        coeffs.push(f as u64 % self.pcap());
        let mut res = vec![0u64; f];
        for c in coeffs.iter().rev() {
            res = self.mul_lanes(&res, x);
            res[0] = self.lane_add(res[0], *c);
        }
        res
    }

    fn pow_lanes(&self, a: &[u64], mut e: u128) -> Vec<u64> {
        let mut base = a.to_vec();
        let mut res = vec![0u64; self.f()];
        res[0] = 1;
        while e > 0 {
            if e & 1 == 1 {
                res = self.mul_lanes(&res, &base);
            }
            base = self.mul_lanes(&base, &base);
            e >>= 1;
        }
        res
    }

    /// Inverse of a unit, by exponentiation to `|units| - 1`.
    pub(crate) fn inv_lanes(&self, a: &[u64]) -> Result<Vec<u64>> {
        let p = self.p();
        if a.iter().all(|c| c % p == 0) {
            return Err(Error::NotInvertible("coefficient is not a unit".into()));
        }
        if self.f() == 1 {
            return Ok(vec![inv_mod(a[0], self.pcap()).expect("unit")]);
        }
        let qf = (p as u128).pow(self.f() as u32);
        let order = (qf - 1) * (p as u128).pow(self.f() as u32 * (self.cap - 1));
        Ok(self.pow_lanes(a, order - 1))
    }

    fn build_frobenius(&mut self) {
        let f = self.f();
        let mut ident = Vec::new();
        for i in 0..f {
            let mut v = vec![0u64; f];
            v[i] = 1;
            ident.push(v);
        }
        if f == 1 {
            self.frob_cols = ident.clone();
            self.frob_inv_cols = ident;
            return;
        }
        // Hensel-lift x^p to a root of the defining polynomial.
        let mut x = vec![0u64; f];
        x[1] = 1;
        let mut rho = self.pow_lanes(&x, self.p() as u128);
        let g = self.modulus.clone();
        for _ in 0..=self.cap {
            let val = self.poly_eval_lanes(&g, &rho);
            if val.iter().all(|c| *c == 0) {
                break;
            }
            let der = self.poly_deriv_eval_lanes(&g, &rho);
            let inv = self.inv_lanes(&der).expect("separable modulus");
            let corr = self.mul_lanes(&val, &inv);
            for i in 0..f {
                rho[i] = self.lane_sub(rho[i], corr[i]);
            }
        }
        let mut cols = Vec::with_capacity(f);
        let mut cur = ident[0].clone();
        for _ in 0..f {
            cols.push(cur.clone());
            cur = self.mul_lanes(&cur, &rho);
        }
        self.frob_cols = cols;
        // sigma^{-1} = sigma^{f-1}
        let mut inv_cols = ident;
        for _ in 0..f - 1 {
            inv_cols = inv_cols.iter().map(|c| self.apply_cols(&self.frob_cols, c)).collect();
        }
        self.frob_inv_cols = inv_cols;
    }

    fn apply_cols(&self, cols: &[Vec<u64>], a: &[u64]) -> Vec<u64> {
        let f = self.f();
        let mut out = vec![0u64; f];
        for (i, col) in cols.iter().enumerate() {
            if a[i] == 0 {
                continue;
            }
            for j in 0..f {
                out[j] = self.lane_add(out[j], self.lane_mul(a[i], col[j]));
            }
        }
        out
    }

    pub(crate) fn frob_lanes(&self, a: &[u64]) -> Vec<u64> {
        if self.f() == 1 {
            return a.to_vec();
        }
        self.apply_cols(&self.frob_cols, a)
    }

    pub(crate) fn frob_inv_lanes(&self, a: &[u64]) -> Vec<u64> {
        if self.f() == 1 {
            return a.to_vec();
        }
        self.apply_cols(&self.frob_inv_cols, a)
    }

    pub(crate) fn trace_lanes(&self, a: &[u64]) -> Vec<u64> {
        let mut acc = vec![0u64; self.f()];
        let mut cur = a.to_vec();
        for _ in 0..self.f() {
            for j in 0..self.f() {
                acc[j] = self.lane_add(acc[j], cur[j]);
            }
            cur = self.frob_lanes(&cur);
        }
        acc
    }

    /// Minimum p-adic valuation over the lanes; `None` when all lanes are zero.
    pub(crate) fn lanes_val(&self, a: &[u64]) -> Option<u32> {
        a.iter().filter_map(|c| vp_u64(*c, self.p())).min()
    }

    // ---- elements ------------------------------------------------------------------

    fn check(&self, a: &CoeffElem) -> Result<()> {
        if a.lanes.len() != self.f() {
            return Err(Error::ParamMismatch("element has wrong residue degree".into()));
        }
        Ok(())
    }

    pub fn zero(&self) -> CoeffElem {
        CoeffElem { lanes: vec![0; self.f()], denom: 0, prec: self.cap() as i32 }
    }

    pub fn from_int(&self, c: i64) -> CoeffElem {
        let mut lanes = vec![0; self.f()];
        lanes[0] = self.lane_from_i64(c);
        self.normalize(CoeffElem { lanes, denom: 0, prec: self.cap() as i32 })
    }

    /// `num * p^{-e}`, known to full working precision.
    pub fn from_frac(&self, num: i64, e: u32) -> Result<CoeffElem> {
        if e > self.budget() {
            return Err(Error::DenominatorBudgetExceeded { needed: e, budget: self.budget() });
        }
        let mut lanes = vec![0; self.f()];
        lanes[0] = self.lane_from_i64(num);
        Ok(self.normalize(CoeffElem { lanes, denom: e, prec: self.cap() as i32 }))
    }

    /// Element with the given polynomial lanes in the generator.
    pub fn from_lanes(&self, coeffs: &[i64]) -> Result<CoeffElem> {
        if coeffs.len() > self.f() {
            return Err(Error::ParamMismatch("too many lanes".into()));
        }
        let mut lanes = vec![0; self.f()];
        for (i, c) in coeffs.iter().enumerate() {
            lanes[i] = self.lane_from_i64(*c);
        }
        Ok(self.normalize(CoeffElem { lanes, denom: 0, prec: self.cap() as i32 }))
    }

    /// The generator `x` of the extension (the chosen root of the defining polynomial).
    pub fn generator(&self) -> CoeffElem {
        let mut lanes = vec![0; self.f()];
        if self.f() > 1 {
            lanes[1] = 1;
        } else {
            lanes[0] = self.lane_sub(0, self.modulus[0]);
        }
        self.normalize(CoeffElem { lanes, denom: 0, prec: self.cap() as i32 })
    }

    /// Restore the normal form: strip common factors of p from the mantissa while a
    /// denominator remains and reduce lanes modulo `p^{prec + e}`.
    pub(crate) fn normalize(&self, mut a: CoeffElem) -> CoeffElem {
        let p = self.p();
        loop {
            a.prec = a.prec.min(self.cap() as i32 - a.denom as i32);
            let digits = a.prec + a.denom as i32;
            if digits <= 0 {
                a.lanes.iter_mut().for_each(|c| *c = 0);
                a.denom = 0;
                return a;
            }
            let modulus = self.pow_p(digits as u32);
            a.lanes.iter_mut().for_each(|c| *c %= modulus);
            if a.lanes.iter().all(|c| *c == 0) {
                a.denom = 0;
                return a;
            }
            if a.denom > 0 && a.lanes.iter().all(|c| c % p == 0) {
                a.lanes.iter_mut().for_each(|c| *c /= p);
                a.denom -= 1;
                continue;
            }
            return a;
        }
    }

    /// Rescale the mantissa to denominator `e >= a.denom`.
    fn lift_to(&self, a: &CoeffElem, e: u32) -> Vec<u64> {
        let s = self.pow_p(e - a.denom);
        a.lanes.iter().map(|c| self.lane_mul(*c, s)).collect()
    }

    /// Add, subtract or multiply two elements.
    pub fn arith(&self, a: &CoeffElem, b: &CoeffElem, op: ArithOp) -> Result<CoeffElem> {
        self.check(a)?;
        self.check(b)?;
        match op {
            ArithOp::Add | ArithOp::Sub => {
                let e = a.denom.max(b.denom);
                let la = self.lift_to(a, e);
                let lb = self.lift_to(b, e);
                let lanes = la
                    .iter()
                    .zip(&lb)
                    .map(|(x, y)| if op == ArithOp::Add { self.lane_add(*x, *y) } else { self.lane_sub(*x, *y) })
                    .collect();
                Ok(self.normalize(CoeffElem { lanes, denom: e, prec: a.prec.min(b.prec) }))
            }
            ArithOp::Mul => {
                let prec = (a.prec + self.valuation(b)).min(b.prec + self.valuation(a));
                let mut e = a.denom + b.denom;
                let mut lanes = self.mul_lanes(&a.lanes, &b.lanes);
                while e > self.budget() && lanes.iter().all(|c| c % self.p() == 0) {
                    lanes.iter_mut().for_each(|c| *c /= self.p());
                    e -= 1;
                }
                if e > self.budget() {
                    return Err(Error::DenominatorBudgetExceeded { needed: e, budget: self.budget() });
                }
                Ok(self.normalize(CoeffElem { lanes, denom: e, prec }))
            }
        }
    }

    pub fn add(&self, a: &CoeffElem, b: &CoeffElem) -> Result<CoeffElem> {
        self.arith(a, b, ArithOp::Add)
    }
    pub fn sub(&self, a: &CoeffElem, b: &CoeffElem) -> Result<CoeffElem> {
        self.arith(a, b, ArithOp::Sub)
    }
    pub fn mul(&self, a: &CoeffElem, b: &CoeffElem) -> Result<CoeffElem> {
        self.arith(a, b, ArithOp::Mul)
    }

    pub fn neg(&self, a: &CoeffElem) -> CoeffElem {
        let lanes = a.lanes.iter().map(|c| self.lane_sub(0, *c)).collect();
        self.normalize(CoeffElem { lanes, denom: a.denom, prec: a.prec })
    }

    /// Division by `p^k`; costs `k` digits of absolute precision.
    pub fn div_p(&self, a: &CoeffElem, k: u32) -> Result<CoeffElem> {
        let e = a.denom + k;
        let mut out = CoeffElem { lanes: a.lanes.clone(), denom: e, prec: a.prec - k as i32 };
        while out.denom > self.budget() && out.lanes.iter().all(|c| c % self.p() == 0) && !out.is_zero() {
            out.lanes.iter_mut().for_each(|c| *c /= self.p());
            out.denom -= 1;
        }
        if out.denom > self.budget() && !out.is_zero() {
            return Err(Error::DenominatorBudgetExceeded { needed: out.denom, budget: self.budget() });
        }
        Ok(self.normalize(out))
    }

    /// Inverse of an element of valuation `v`; the result has valuation `-v`.
    pub fn inv(&self, a: &CoeffElem) -> Result<CoeffElem> {
        let v = self
            .lanes_val(&a.lanes)
            .ok_or_else(|| Error::NotInvertible("zero has no inverse".into()))?;
        let unit: Vec<u64> = a.lanes.iter().map(|c| c / self.pow_p(v)).collect();
        let inv = self.inv_lanes(&unit)?;
        let val = v as i32 - a.denom as i32;
        // relative precision of a is prec - val
        let rel = a.prec - val;
        let prec = rel - val;
        if val > 0 {
            let e = val as u32;
            if e > self.budget() {
                return Err(Error::DenominatorBudgetExceeded { needed: e, budget: self.budget() });
            }
            Ok(self.normalize(CoeffElem { lanes: inv, denom: e, prec }))
        } else {
            let s = self.pow_p((-val) as u32);
            let lanes = inv.iter().map(|c| self.lane_mul(*c, s)).collect();
            Ok(self.normalize(CoeffElem { lanes, denom: 0, prec }))
        }
    }

    /// Coefficient Frobenius: the ring automorphism lifting `x -> x^p`.
    pub fn frobenius(&self, a: &CoeffElem) -> CoeffElem {
        self.normalize(CoeffElem { lanes: self.frob_lanes(&a.lanes), denom: a.denom, prec: a.prec })
    }

    pub fn frobenius_inv(&self, a: &CoeffElem) -> CoeffElem {
        self.normalize(CoeffElem { lanes: self.frob_inv_lanes(&a.lanes), denom: a.denom, prec: a.prec })
    }

    /// Sum of the `f` Frobenius conjugates; lands in the prime subring.
    pub fn trace(&self, a: &CoeffElem) -> CoeffElem {
        self.normalize(CoeffElem { lanes: self.trace_lanes(&a.lanes), denom: a.denom, prec: a.prec })
    }

    /// Evaluate the defining polynomial at an element (used to verify roots).
    pub fn eval_modulus(&self, a: &CoeffElem) -> CoeffElem {
        let lanes = self.poly_eval_lanes(&self.modulus, &a.lanes);
        self.normalize(CoeffElem { lanes, denom: 0, prec: a.prec })
    }

    pub fn pow(&self, a: &CoeffElem, e: u64) -> Result<CoeffElem> {
        let mut res = self.from_int(1);
        for _ in 0..e {
            res = self.mul(&res, a)?;
        }
        Ok(res)
    }
}

fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(m as i128) as u64)
}

pub(crate) fn inv_mod_u64(a: u64, m: u64) -> Option<u64> {
    inv_mod(a % m, m)
}

// ---- polynomials over F_p, for picking the defining polynomial ----------------------

fn trim(v: &mut Vec<u64>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
}

fn fp_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p).unwrap();
    while r.len() > db && !(r.len() == 1 && r[0] == 0) {
        let dr = r.len() - 1;
        let c = r[dr] * lead_inv % p;
        for i in 0..=db {
            let idx = dr - db + i;
            r[idx] = (r[idx] + p * p - c * b[i] % p) % p;
        }
        trim(&mut r);
        if dr == 0 {
            break;
        }
    }
    r
}

fn fp_mulmod(a: &[u64], b: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    fp_rem(&prod, g, p)
}

fn fp_gcd_is_one(a: &[u64], b: &[u64], p: u64) -> bool {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    loop {
        if y.len() == 1 && y[0] == 0 {
            return x.len() == 1 && x[0] != 0;
        }
        let r = fp_rem(&x, &y, p);
        x = y;
        y = r;
    }
}

/// Ben-Or irreducibility test for the monic polynomial with the given low coefficients.
pub(crate) fn irreducible_mod_p(low: &[u64], p: u64) -> bool {
    let f = low.len();
    let mut g: Vec<u64> = low.iter().map(|c| c % p).collect();
    g.push(1);
    if f == 1 {
        return true;
    }
    let mut xp = vec![0u64, 1];
    for _ in 1..=f / 2 {
        // xp <- xp^p mod g
        let mut acc = vec![1u64];
        for _ in 0..p {
            acc = fp_mulmod(&acc, &xp, &g, p);
        }
        xp = acc;
        let mut diff = xp.clone();
        if diff.len() < 2 {
            diff.resize(2, 0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        if !fp_gcd_is_one(&g, &diff, p) {
            return false;
        }
    }
    true
}

fn first_irreducible(f: usize, p: u64) -> Vec<u64> {
    if f == 1 {
        return vec![0];
    }
    let total = p.pow(f as u32);
    for idx in 0..total {
        let mut low = Vec::with_capacity(f);
        let mut k = idx;
        for _ in 0..f {
            low.push(k % p);
            k /= p;
        }
        if low[0] != 0 && irreducible_mod_p(&low, p) {
            return low;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Element of the coefficient ring: `p^{-denom} * lanes`, known modulo `p^prec`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffElem {
    pub(crate) lanes: Vec<u64>,
    pub(crate) denom: u32,
    pub(crate) prec: i32,
}

impl CoeffElem {
    pub fn is_zero(&self) -> bool {
        self.lanes.iter().all(|c| *c == 0)
    }
    pub fn denom_exp(&self) -> u32 {
        self.denom
    }
    pub fn prec(&self) -> i32 {
        self.prec
    }
    pub fn lanes(&self) -> &[u64] {
        &self.lanes
    }
    /// Integer value of the first lane when the element is p-integral (`denom == 0`).
    pub fn to_u64(&self) -> Option<u64> {
        if self.denom == 0 {
            Some(self.lanes[0])
        } else {
            None
        }
    }
}

impl CoeffRing {
    /// Exact p-adic valuation of an element (its precision when zero).
    pub fn valuation(&self, a: &CoeffElem) -> i32 {
        match self.lanes_val(&a.lanes) {
            None => a.prec,
            Some(v) => v as i32 - a.denom as i32,
        }
    }

    /// Residue class of a p-integral element modulo `p^j`.
    pub fn reduce_mod(&self, a: &CoeffElem, j: u32) -> Result<u64> {
        if a.denom > 0 {
            return Err(Error::NonIntegralResidue(format!("value carries p^-{}", a.denom)));
        }
        if (a.prec as i64) < j as i64 {
            return Err(Error::PrecisionExhausted(format!(
                "need the value modulo p^{j}, only known modulo p^{}",
                a.prec
            )));
        }
        Ok(a.lanes[0] % self.pow_p(j))
    }

    pub fn display(&self, a: &CoeffElem) -> String {
        format_coeff(self, &a.lanes, a.denom)
    }
}

pub(crate) fn signed_lane(ring: &CoeffRing, c: u64, digits: u32) -> i64 {
    let m = ring.pow_p(digits);
    let c = c % m;
    if c > m / 2 {
        c as i64 - m as i64
    } else {
        c as i64
    }
}

pub(crate) fn format_coeff(ring: &CoeffRing, lanes: &[u64], denom: u32) -> String {
    let digits = ring.cap();
    let vals: Vec<i64> = lanes.iter().map(|c| signed_lane(ring, *c, digits)).collect();
    let body = if ring.f() == 1 {
        format!("{}", vals[0])
    } else {
        let parts: Vec<String> = vals
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0)
            .map(|(i, v)| match i {
                0 => format!("{v}"),
                1 => format!("{v}*x"),
                _ => format!("{v}*x^{i}"),
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            format!("({})", parts.join(" + "))
        }
    };
    if denom == 0 {
        body
    } else {
        format!("{body}/p^{denom}")
    }
}

impl fmt::Display for CoeffElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}/p^{} (mod p^{})", self.lanes, self.denom, self.prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, f: usize) -> Ring {
        CoeffRing::new(RingParams::new(p, f, 6, 4)).unwrap()
    }

    #[test]
    fn integer_addition() {
        let r = ring(3, 1);
        let s = r.add(&r.from_int(1), &r.from_int(1)).unwrap();
        assert_eq!(s, r.from_int(2));
    }

    #[test]
    fn denominators_cancel() {
        let r = ring(3, 1);
        let a = r.from_frac(1, 1).unwrap();
        let b = r.from_frac(2, 1).unwrap();
        let s = r.add(&a, &b).unwrap();
        assert_eq!(s.denom_exp(), 0);
        assert_eq!(r.reduce_mod(&s, 5).unwrap(), 1);
        // one guard digit was consumed by the 1/p scaling
        assert_eq!(s.prec(), 9);
    }

    #[test]
    fn budget_enforced() {
        let r = ring(3, 1);
        let a = r.from_frac(1, 3).unwrap();
        let b = r.from_frac(1, 2).unwrap();
        assert!(matches!(r.mul(&a, &b), Err(Error::DenominatorBudgetExceeded { .. })));
    }

    #[test]
    fn generator_square_reduces_mod_modulus() {
        let r = ring(3, 2);
        let x = r.generator();
        let sq = r.mul(&x, &x).unwrap();
        // x^2 = -g1 x - g0
        let g = r.modulus_lanes().to_vec();
        let expected = CoeffElem {
            lanes: vec![r.lane_sub(0, g[0]), r.lane_sub(0, g[1])],
            denom: 0,
            prec: 10,
        };
        assert_eq!(sq, r.normalize(expected));
        assert!(r.eval_modulus(&x).is_zero());
    }

    #[test]
    fn frobenius_identity_on_zp() {
        let r = ring(5, 1);
        assert_eq!(r.frobenius(&r.from_int(7)), r.from_int(7));
        let r2 = ring(3, 3);
        assert_eq!(r2.frobenius(&r2.from_int(1)), r2.from_int(1));
    }

    #[test]
    fn frobenius_of_root_is_root_and_lifts_pth_power() {
        let r = ring(3, 2);
        let x = r.generator();
        let fx = r.frobenius(&x);
        assert!(r.eval_modulus(&fx).is_zero());
        let x3 = r.pow(&x, 3).unwrap();
        let diff = r.sub(&fx, &x3).unwrap();
        assert!(r.valuation(&diff) >= 1, "sigma(x) = x^p mod p");
        assert_ne!(fx, x);
    }

    #[test]
    fn trace_examples() {
        let r = ring(3, 2);
        assert_eq!(r.trace(&r.from_int(1)), r.from_int(2));
        let t = r.trace(&r.generator());
        let g1 = r.modulus_lanes()[1];
        assert_eq!(t.lanes, vec![r.lane_sub(0, g1) % r.pow_p(6), 0]);
        let r1 = ring(7, 1);
        assert_eq!(r1.trace(&r1.from_int(4)), r1.from_int(4));
    }

    #[test]
    fn inverse_of_unit_and_of_p() {
        let r = ring(3, 2);
        let a = r.from_lanes(&[2, 1]).unwrap();
        let ai = r.inv(&a).unwrap();
        assert_eq!(r.mul(&a, &ai).unwrap(), r.from_int(1));
        let p = r.from_int(3);
        let pi = r.inv(&p).unwrap();
        assert_eq!(pi.denom_exp(), 1);
    }

    #[test]
    fn generated_moduli_are_irreducible() {
        for (p, f) in [(3, 2), (3, 3), (5, 2), (7, 3)] {
            let g = first_irreducible(f, p);
            assert!(irreducible_mod_p(&g, p));
        }
        // x^2 + 2 = x^2 - 1 mod 3 is reducible
        assert!(!irreducible_mod_p(&[2, 0], 3));
    }

    #[test]
    fn rejects_even_prime() {
        assert!(CoeffRing::new(RingParams::new(2, 1, 4, 2)).is_err());
        assert!(CoeffRing::new(RingParams::new(9, 1, 4, 2)).is_err());
    }
}
