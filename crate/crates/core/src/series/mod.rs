//! Truncated two-variable Laurent series `sum a_{i,j} T^i pi^j` over the coefficient ring.
//!
//! A [`Series`] stores a dense rectangle of mantissas sharing one denominator exponent
//! `p^{-denom}`. Two kinds of truncation are tracked explicitly:
//!
//! * p-adic: every coefficient is known modulo `p^prec`;
//! * pi-adic: coefficients with pi-exponent above `y_hi` are unknown. `y_hi == None`
//!   means the series is a Laurent polynomial known exactly in the pi direction.
//!
//! The T direction is never truncated, since T-degree is not a filtration of the ring.
//! A nonzero coefficient outside the configured T window is an error rather than a
//! silent truncation. Absent entries inside the reliable window are known zeros.

mod analytic;
mod text;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coeff::{CoeffElem, CoeffRing, Ring};
use crate::error::{Error, Result};
use crate::par;

pub use analytic::{binomial_coeffs, PAdicExp};
pub use text::{parse_series, print_series};

/// Configured working window. Terms above `y_hi` are truncated (tracked as unknown);
/// terms outside the T bounds or below `y_lo` are errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub t_lo: i32,
    pub t_hi: i32,
    pub y_lo: i32,
    pub y_hi: i32,
}

impl Window {
    /// Defaults sized for level-`n` computations with working precision `m`.
    pub fn defaults(p: u64, n: u32, m: u32) -> Window {
        let pn = p.pow(n) as i32;
        Window {
            t_lo: -16 * pn * p as i32,
            t_hi: 16 * pn * p as i32,
            y_lo: -(pn + (pn - 1) * (m as i32 - 1) + 4),
            y_hi: 2 * pn * p as i32,
        }
    }
}

/// Coefficient ring plus working window; shared by every series it creates.
#[derive(Debug)]
pub struct SeriesRing {
    ring: Ring,
    window: Window,
}

pub type Sr = Arc<SeriesRing>;

impl SeriesRing {
    pub fn new(ring: Ring, window: Window) -> Result<Sr> {
        if window.t_lo > window.t_hi || window.y_lo > window.y_hi {
            return Err(Error::Config(format!("empty window {window:?}")));
        }
        Ok(Arc::new(SeriesRing { ring, window }))
    }
    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn coeffs(&self) -> &CoeffRing {
        &self.ring
    }
    pub fn window(&self) -> Window {
        self.window
    }
}

const INF: i64 = i64::MAX / 4;

/// Element of the truncated ring; see the module documentation for the precision model.
#[derive(Clone)]
pub struct Series {
    sr: Sr,
    t0: i32,
    nt: usize,
    y0: i32,
    ny: usize,
    data: Vec<u64>,
    denom: u32,
    prec: i32,
    y_hi: Option<i32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
}

impl Series {
    // ---- construction ---------------------------------------------------------------

    pub fn zero(sr: &Sr) -> Series {
        Series {
            sr: sr.clone(),
            t0: 0,
            nt: 0,
            y0: 0,
            ny: 0,
            data: vec![],
            denom: 0,
            prec: sr.ring.cap() as i32,
            y_hi: None,
        }
    }

    pub fn one(sr: &Sr) -> Series {
        Series::monomial(sr, &sr.ring.from_int(1), 0, 0).expect("window contains the origin")
    }

    pub fn from_int(sr: &Sr, c: i64) -> Series {
        Series::monomial(sr, &sr.ring.from_int(c), 0, 0).expect("window contains the origin")
    }

    /// `c * T^i * pi^j`.
    pub fn monomial(sr: &Sr, c: &CoeffElem, i: i32, j: i32) -> Result<Series> {
        Series::from_terms(sr, &[(i, j, c.clone())])
    }

    /// The variable pi (`Y` in level-n coordinates).
    pub fn pi(sr: &Sr) -> Series {
        Series::monomial(sr, &sr.ring.from_int(1), 0, 1).expect("window contains pi")
    }

    pub fn t(sr: &Sr) -> Series {
        Series::monomial(sr, &sr.ring.from_int(1), 1, 0).expect("window contains T")
    }

    /// Build from explicit terms; repeated exponents are summed.
    pub fn from_terms(sr: &Sr, terms: &[(i32, i32, CoeffElem)]) -> Result<Series> {
        let ring = &sr.ring;
        let f = ring.f();
        if terms.is_empty() {
            return Ok(Series::zero(sr));
        }
        let denom = terms.iter().map(|t| t.2.denom).max().unwrap();
        let prec = terms.iter().map(|t| t.2.prec).min().unwrap();
        let tmin = terms.iter().map(|t| t.0).min().unwrap();
        let tmax = terms.iter().map(|t| t.0).max().unwrap();
        let ymin = terms.iter().map(|t| t.1).min().unwrap();
        let ymax = terms.iter().map(|t| t.1).max().unwrap();
        let nt = (tmax - tmin + 1) as usize;
        let ny = (ymax - ymin + 1) as usize;
        let mut s = Series {
            sr: sr.clone(),
            t0: tmin,
            nt,
            y0: ymin,
            ny,
            data: vec![0; nt * ny * f],
            denom,
            prec,
            y_hi: None,
        };
        for (i, j, c) in terms {
            let scale = ring.pow_p(denom - c.denom);
            let idx = s.idx(*i, *j);
            for l in 0..f {
                let v = ring.lane_mul(c.lanes[l], scale);
                s.data[idx + l] = ring.lane_add(s.data[idx + l], v);
            }
        }
        s.normalize()?;
        Ok(s)
    }

    // ---- accessors ------------------------------------------------------------------

    pub fn sr(&self) -> &Sr {
        &self.sr
    }
    pub fn ring(&self) -> &CoeffRing {
        &self.sr.ring
    }
    pub fn denom_exp(&self) -> u32 {
        self.denom
    }
    pub fn prec(&self) -> i32 {
        self.prec
    }
    /// Largest pi-exponent with known coefficients (`None`: exact).
    pub fn y_hi(&self) -> Option<i32> {
        self.y_hi
    }
    pub fn is_exact(&self) -> bool {
        self.y_hi.is_none()
    }

    /// True when every known coefficient is zero.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| *c == 0)
    }

    /// Bounding box of the stored terms: `(t_min, t_max, y_min, y_max)`.
    pub fn support_box(&self) -> Option<(i32, i32, i32, i32)> {
        if self.nt == 0 || self.ny == 0 {
            None
        } else {
            Some((self.t0, self.t0 + self.nt as i32 - 1, self.y0, self.y0 + self.ny as i32 - 1))
        }
    }

    pub fn num_terms(&self) -> usize {
        let f = self.ring().f();
        self.data.chunks(f).filter(|c| c.iter().any(|x| *x != 0)).count()
    }

    #[inline]
    fn idx(&self, i: i32, j: i32) -> usize {
        (((i - self.t0) as usize) * self.ny + (j - self.y0) as usize) * self.ring().f()
    }

    fn lanes_at(&self, i: i32, j: i32) -> Option<&[u64]> {
        if self.nt == 0 || i < self.t0 || j < self.y0 {
            return None;
        }
        if i >= self.t0 + self.nt as i32 || j >= self.y0 + self.ny as i32 {
            return None;
        }
        let idx = self.idx(i, j);
        Some(&self.data[idx..idx + self.ring().f()])
    }

    /// Coefficient of `T^i pi^j`; errors if that exponent lies beyond the reliable window.
    pub fn coeff(&self, i: i32, j: i32) -> Result<CoeffElem> {
        if let Some(h) = self.y_hi {
            if j > h {
                return Err(Error::WindowUnderflow(format!(
                    "coefficient of T^{i} pi^{j} requested but the series is only known up to pi^{h}"
                )));
            }
        }
        let ring = self.ring();
        let lanes = self.lanes_at(i, j).map(|l| l.to_vec()).unwrap_or_else(|| vec![0; ring.f()]);
        Ok(ring.normalize(CoeffElem { lanes, denom: self.denom, prec: self.prec }))
    }

    /// All nonzero terms `(i, j, coefficient)`, ordered by `(j, i)`.
    pub fn terms(&self) -> Vec<(i32, i32, CoeffElem)> {
        let ring = self.ring();
        let f = ring.f();
        let mut out = Vec::new();
        for yi in 0..self.ny {
            for ti in 0..self.nt {
                let idx = (ti * self.ny + yi) * f;
                let l = &self.data[idx..idx + f];
                if l.iter().any(|c| *c != 0) {
                    let c = ring.normalize(CoeffElem { lanes: l.to_vec(), denom: self.denom, prec: self.prec });
                    out.push((self.t0 + ti as i32, self.y0 + yi as i32, c));
                }
            }
        }
        out
    }

    /// Smallest pi-exponent that can carry a nonzero value (stored or unknown).
    fn ylow(&self) -> i64 {
        if self.ny > 0 && !self.is_zero() {
            self.y0 as i64
        } else {
            match self.y_hi {
                None => INF,
                Some(h) => h as i64 + 1,
            }
        }
    }

    /// Lower bound on the p-adic valuation of every coefficient.
    pub fn valuation(&self) -> i32 {
        let ring = self.ring();
        match ring.lanes_val(&self.data) {
            None => self.prec,
            Some(v) => v as i32 - self.denom as i32,
        }
    }

    fn check_same(&self, other: &Series) -> Result<()> {
        if !Arc::ptr_eq(&self.sr, &other.sr) && self.sr.ring.params() != other.sr.ring.params() {
            return Err(Error::ParamMismatch("series over different rings".into()));
        }
        Ok(())
    }

    // ---- normal form ----------------------------------------------------------------

    /// Reduce mantissas, strip common p-factors from the denominator, enforce the
    /// window and shrink the rectangle to the support.
    fn normalize(&mut self) -> Result<()> {
        let ring = self.sr.ring.clone();
        let p = ring.p();
        let w = self.sr.window;
        self.prec = self.prec.min(ring.cap() as i32 - self.denom as i32);
        loop {
            let digits = self.prec + self.denom as i32;
            if digits <= 0 {
                self.data.iter_mut().for_each(|c| *c = 0);
                self.denom = 0;
                break;
            }
            let md = ring.pow_p(digits as u32);
            self.data.iter_mut().for_each(|c| *c %= md);
            if self.denom > 0 && self.data.iter().any(|c| *c != 0) && self.data.iter().all(|c| c % p == 0) {
                self.data.iter_mut().for_each(|c| *c /= p);
                self.denom -= 1;
                continue;
            }
            if self.data.iter().all(|c| *c == 0) {
                self.denom = 0;
            }
            break;
        }
        if self.denom > ring.budget() {
            return Err(Error::DenominatorBudgetExceeded { needed: self.denom, budget: ring.budget() });
        }
        // pi-adic truncation at the configured ceiling
        let mut cut = w.y_hi;
        if let Some(h) = self.y_hi {
            cut = cut.min(h);
        }
        let top = self.y0 + self.ny as i32 - 1;
        if self.ny > 0 && top > cut {
            let f = ring.f();
            let mut truncated = false;
            for ti in 0..self.nt {
                for yi in 0..self.ny {
                    if self.y0 + yi as i32 > cut {
                        let idx = (ti * self.ny + yi) * f;
                        for l in 0..f {
                            if self.data[idx + l] != 0 {
                                truncated = true;
                                self.data[idx + l] = 0;
                            }
                        }
                    }
                }
            }
            if truncated && self.y_hi.is_none() {
                self.y_hi = Some(w.y_hi);
            }
        }
        if let Some(h) = self.y_hi {
            if h < w.y_lo {
                return Err(Error::WindowUnderflow(format!(
                    "reliable window is empty: known only up to pi^{h}, window starts at pi^{}",
                    w.y_lo
                )));
            }
        }
        self.trim();
        if let Some((tmin, tmax, ymin, _)) = self.support_box() {
            if tmin < w.t_lo || tmax > w.t_hi {
                return Err(Error::WindowUnderflow(format!(
                    "T-exponents [{tmin}, {tmax}] leave the window [{}, {}]",
                    w.t_lo, w.t_hi
                )));
            }
            if ymin < w.y_lo {
                return Err(Error::WindowUnderflow(format!(
                    "pi-exponent {ymin} below the window floor {}",
                    w.y_lo
                )));
            }
        }
        Ok(())
    }

    /// Shrink the stored rectangle to the nonzero support.
    fn trim(&mut self) {
        let f = self.ring().f();
        let (mut tmin, mut tmax, mut ymin, mut ymax) = (usize::MAX, 0usize, usize::MAX, 0usize);
        for ti in 0..self.nt {
            for yi in 0..self.ny {
                let idx = (ti * self.ny + yi) * f;
                if self.data[idx..idx + f].iter().any(|c| *c != 0) {
                    tmin = tmin.min(ti);
                    tmax = tmax.max(ti);
                    ymin = ymin.min(yi);
                    ymax = ymax.max(yi);
                }
            }
        }
        if tmin == usize::MAX {
            self.t0 = 0;
            self.nt = 0;
            self.y0 = 0;
            self.ny = 0;
            self.data.clear();
            return;
        }
        if tmin == 0 && ymin == 0 && tmax + 1 == self.nt && ymax + 1 == self.ny {
            return;
        }
        let nt = tmax - tmin + 1;
        let ny = ymax - ymin + 1;
        let mut data = vec![0u64; nt * ny * f];
        for ti in 0..nt {
            let src = ((ti + tmin) * self.ny + ymin) * f;
            let dst = ti * ny * f;
            data[dst..dst + ny * f].copy_from_slice(&self.data[src..src + ny * f]);
        }
        self.t0 += tmin as i32;
        self.y0 += ymin as i32;
        self.nt = nt;
        self.ny = ny;
        self.data = data;
    }

    /// Re-embed into a rectangle covering `[t0, t0+nt) x [y0, y0+ny)` with denominator `denom`.
    fn widened(&self, t0: i32, nt: usize, y0: i32, ny: usize, denom: u32) -> Vec<u64> {
        let ring = self.ring();
        let f = ring.f();
        let scale = ring.pow_p(denom - self.denom);
        let mut data = vec![0u64; nt * ny * f];
        for ti in 0..self.nt {
            for yi in 0..self.ny {
                let src = (ti * self.ny + yi) * f;
                let dt = (self.t0 + ti as i32 - t0) as usize;
                let dy = (self.y0 + yi as i32 - y0) as usize;
                let dst = (dt * ny + dy) * f;
                for l in 0..f {
                    data[dst + l] = if scale == 1 { self.data[src + l] } else { ring.lane_mul(self.data[src + l], scale) };
                }
            }
        }
        data
    }

    // ---- ring operations ------------------------------------------------------------

    /// Add, subtract or multiply.
    pub fn arith(&self, other: &Series, op: SeriesOp) -> Result<Series> {
        match op {
            SeriesOp::Add => self.add(other),
            SeriesOp::Sub => self.sub(other),
            SeriesOp::Mul => self.mul(other),
        }
    }

    fn add_sub(&self, other: &Series, negate: bool) -> Result<Series> {
        self.check_same(other)?;
        let ring = self.ring();
        let denom = self.denom.max(other.denom);
        let prec = self.prec.min(other.prec);
        let y_hi = match (self.y_hi, other.y_hi) {
            (None, h) | (h, None) => h,
            (Some(a), Some(b)) => Some(a.min(b)),
        };
        let boxes: Vec<_> = [self.support_box(), other.support_box()].into_iter().flatten().collect();
        if boxes.is_empty() {
            let mut z = Series::zero(&self.sr);
            z.prec = prec;
            z.y_hi = y_hi;
            return Ok(z);
        }
        let t0 = boxes.iter().map(|b| b.0).min().unwrap();
        let t1 = boxes.iter().map(|b| b.1).max().unwrap();
        let y0 = boxes.iter().map(|b| b.2).min().unwrap();
        let y1 = boxes.iter().map(|b| b.3).max().unwrap();
        let nt = (t1 - t0 + 1) as usize;
        let ny = (y1 - y0 + 1) as usize;
        let mut data = self.widened(t0, nt, y0, ny, denom);
        let od = other.widened(t0, nt, y0, ny, denom);
        for (d, o) in data.iter_mut().zip(&od) {
            *d = if negate { ring.lane_sub(*d, *o) } else { ring.lane_add(*d, *o) };
        }
        let mut s = Series { sr: self.sr.clone(), t0, nt, y0, ny, data, denom, prec, y_hi };
        s.normalize()?;
        Ok(s)
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.add_sub(other, false)
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.add_sub(other, true)
    }

    pub fn neg(&self) -> Series {
        let ring = self.ring();
        let mut s = self.clone();
        s.data.iter_mut().for_each(|c| *c = ring.lane_sub(0, *c));
        s
    }

    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.check_same(other)?;
        let ring = self.sr.ring.clone();
        let prec = (self.prec + other.valuation()).min(other.prec + self.valuation());
        // first pi-exponent that an unknown tail can reach
        let mut first_unknown = INF;
        if let Some(h) = self.y_hi {
            first_unknown = first_unknown.min(h as i64 + 1 + other.ylow());
        }
        if let Some(h) = other.y_hi {
            first_unknown = first_unknown.min(h as i64 + 1 + self.ylow());
        }
        let y_hi = if first_unknown >= INF / 2 { None } else { Some((first_unknown - 1) as i32) };
        let mut denom = self.denom + other.denom;
        let (Some(a), Some(b)) = (self.support_box(), other.support_box()) else {
            let mut z = Series::zero(&self.sr);
            z.prec = prec;
            z.y_hi = y_hi;
            z.normalize()?;
            return Ok(z);
        };
        let t0 = a.0 + b.0;
        let nt = (a.1 + b.1 - t0 + 1) as usize;
        let y0 = a.2 + b.2;
        let mut ytop = a.3 + b.3;
        ytop = ytop.min(self.sr.window.y_hi);
        if let Some(h) = y_hi {
            ytop = ytop.min(h);
        }
        if ytop < y0 {
            let mut z = Series::zero(&self.sr);
            z.prec = prec;
            z.y_hi = Some(y_hi.unwrap_or(self.sr.window.y_hi).min(self.sr.window.y_hi));
            z.normalize()?;
            return Ok(z);
        }
        let ny = (ytop - y0 + 1) as usize;
        let truncated = a.3 + b.3 > ytop;
        let mut data = mul_kernel(&ring, self, other, nt, ny);
        // fold surplus denominators back when the product happens to be divisible by p
        let p = ring.p();
        while denom > ring.budget() && data.iter().any(|c| *c != 0) && data.iter().all(|c| c % p == 0) {
            data.iter_mut().for_each(|c| *c /= p);
            denom -= 1;
        }
        let mut s = Series { sr: self.sr.clone(), t0, nt, y0, ny, data, denom, prec, y_hi };
        if truncated && s.y_hi.is_none() {
            s.y_hi = Some(ytop);
        }
        s.normalize()?;
        Ok(s)
    }

    /// Multiply every coefficient by a ring element.
    pub fn scale(&self, c: &CoeffElem) -> Result<Series> {
        let cs = Series::monomial(&self.sr, c, 0, 0)?;
        let mut out = self.mul(&cs)?;
        if c.is_zero() {
            out.prec = out.prec.min(c.prec + self.valuation());
        }
        Ok(out)
    }

    pub fn scale_int(&self, c: i64) -> Result<Series> {
        self.scale(&self.ring().from_int(c))
    }

    /// Multiply by `T^i pi^j`.
    pub fn shift(&self, i: i32, j: i32) -> Result<Series> {
        let mut s = self.clone();
        s.t0 += i;
        s.y0 += j;
        s.y_hi = s.y_hi.map(|h| h + j);
        s.normalize()?;
        Ok(s)
    }

    /// Division by `p^k`, consuming `k` digits of absolute precision.
    pub fn div_p(&self, k: u32) -> Result<Series> {
        let mut s = self.clone();
        s.denom += k;
        s.prec -= k as i32;
        let p = self.ring().p();
        while s.denom > self.ring().budget() && !s.is_zero() && s.data.iter().all(|c| c % p == 0) {
            s.data.iter_mut().for_each(|c| *c /= p);
            s.denom -= 1;
        }
        s.normalize()?;
        Ok(s)
    }

    /// Multiplication by `p^k`.
    pub fn mul_p(&self, k: u32) -> Result<Series> {
        let mut s = self.clone();
        let ring = self.ring();
        let take = k.min(s.denom);
        s.denom -= take;
        let rest = k - take;
        if rest > 0 {
            let sc = ring.pow_p(rest);
            s.data.iter_mut().for_each(|c| *c = ring.lane_mul(*c, sc));
        }
        s.prec += k as i32;
        s.normalize()?;
        Ok(s)
    }

    /// Apply a lane map (coefficient Frobenius and friends) to every coefficient.
    pub(crate) fn map_lanes(&self, g: impl Fn(&[u64]) -> Vec<u64>) -> Series {
        let f = self.ring().f();
        let mut s = self.clone();
        for chunk in s.data.chunks_mut(f) {
            if chunk.iter().any(|c| *c != 0) {
                let v = g(chunk);
                chunk.copy_from_slice(&v);
            }
        }
        s
    }

    /// Coefficient Frobenius applied termwise.
    pub fn frobenius_coeffs(&self) -> Series {
        let ring = self.sr.ring.clone();
        self.map_lanes(|l| ring.frob_lanes(l))
    }

    pub fn frobenius_inv_coeffs(&self) -> Series {
        let ring = self.sr.ring.clone();
        self.map_lanes(|l| ring.frob_inv_lanes(l))
    }

    /// Keep only the terms whose exponents satisfy `keep(i, j)`. Precision metadata is
    /// preserved; callers decide what the projection means.
    pub fn filter_terms(&self, keep: impl Fn(i32, i32) -> bool) -> Series {
        let f = self.ring().f();
        let mut s = self.clone();
        for ti in 0..s.nt {
            for yi in 0..s.ny {
                if !keep(s.t0 + ti as i32, s.y0 + yi as i32) {
                    let idx = (ti * s.ny + yi) * f;
                    s.data[idx..idx + f].iter_mut().for_each(|c| *c = 0);
                }
            }
        }
        s.trim();
        s
    }

    /// Mark everything above `pi^h` as unknown.
    pub fn truncate_y(&self, h: i32) -> Result<Series> {
        let mut s = self.filter_terms(|_, j| j <= h);
        s.y_hi = Some(s.y_hi.map_or(h, |x| x.min(h)));
        s.normalize()?;
        Ok(s)
    }

    /// Lower the absolute precision to `p^k`.
    pub fn with_prec(&self, k: i32) -> Result<Series> {
        let mut s = self.clone();
        s.prec = s.prec.min(k);
        s.normalize()?;
        Ok(s)
    }

    /// `self - other` vanishes on the common reliable window.
    pub fn agrees_with(&self, other: &Series) -> Result<bool> {
        Ok(self.sub(other)?.is_zero())
    }

    /// Move to another series ring over the same coefficients (for a wider or narrower
    /// working window).
    pub fn rebase(&self, sr: &Sr) -> Result<Series> {
        if self.sr.ring.params() != sr.ring.params() {
            return Err(Error::ParamMismatch("rebase across coefficient rings".into()));
        }
        let mut s = self.clone();
        s.sr = sr.clone();
        s.normalize()?;
        Ok(s)
    }

    /// Precision report: `(prec, y_hi)`.
    pub fn window_report(&self) -> (i32, Option<i32>) {
        (self.prec, self.y_hi)
    }
}

/// Dense convolution over the stored rectangles; output rows run in parallel.
fn mul_kernel(ring: &CoeffRing, a: &Series, b: &Series, nt: usize, ny: usize) -> Vec<u64> {
    let f = ring.f();
    let a_rows: Vec<usize> = (0..a.nt).filter(|&r| row_nonzero(a, r)).collect();
    let b_rows: Vec<usize> = (0..b.nt).filter(|&r| row_nonzero(b, r)).collect();
    let pcap = ring.pcap();
    let wide_ok = pcap < (1u64 << 40);
    let row_len = ny * f;
    let mut data = vec![0u64; nt * row_len];
    par::for_each_chunk_mut(&mut data, row_len, |to, out| {
        if f == 1 && wide_ok {
            let mut acc = vec![0u128; ny];
            let mut any = false;
            for &ra in &a_rows {
                if to < ra || to - ra >= b.nt {
                    continue;
                }
                let rb = to - ra;
                if b_rows.binary_search(&rb).is_err() {
                    continue;
                }
                any = true;
                let arow = &a.data[ra * a.ny..(ra + 1) * a.ny];
                let brow = &b.data[rb * b.ny..(rb + 1) * b.ny];
                for (ya, &x) in arow.iter().enumerate() {
                    if x == 0 || ya >= ny {
                        continue;
                    }
                    let lim = (ny - ya).min(b.ny);
                    let x = x as u128;
                    for (yb, &y) in brow[..lim].iter().enumerate() {
                        acc[ya + yb] += x * y as u128;
                    }
                }
            }
            if any {
                for (o, v) in out.iter_mut().zip(acc) {
                    *o = (v % pcap as u128) as u64;
                }
            }
        } else {
            for &ra in &a_rows {
                if to < ra || to - ra >= b.nt {
                    continue;
                }
                let rb = to - ra;
                if b_rows.binary_search(&rb).is_err() {
                    continue;
                }
                for ya in 0..a.ny.min(ny) {
                    let ia = (ra * a.ny + ya) * f;
                    let x = &a.data[ia..ia + f];
                    if x.iter().all(|c| *c == 0) {
                        continue;
                    }
                    let lim = (ny - ya).min(b.ny);
                    for yb in 0..lim {
                        let ib = (rb * b.ny + yb) * f;
                        let y = &b.data[ib..ib + f];
                        let o = (ya + yb) * f;
                        ring.mul_acc(x, y, &mut out[o..o + f]);
                    }
                }
            }
        }
    });
    data
}

fn row_nonzero(s: &Series, r: usize) -> bool {
    let f = s.ring().f();
    s.data[r * s.ny * f..(r + 1) * s.ny * f].iter().any(|c| *c != 0)
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series({} ; prec {}, y_hi {:?})", print_series(self), self.prec, self.y_hi)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_series(self))
    }
}

impl PartialEq for Series {
    /// Equality of known values: same window metadata and identical known coefficients.
    fn eq(&self, other: &Series) -> bool {
        self.y_hi == other.y_hi && self.sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }
}

#[cfg(test)]
mod tests;
