//! Convergent constructions on series: inverses, logarithm, exponential, binomial
//! powers, substitution and the two derivations.

use serde::{Deserialize, Serialize};

use super::{Series, INF};
use crate::coeff::{inv_mod_u64, vp_u64, CoeffElem, CoeffRing};
use crate::error::{Error, Result};

/// Exponent in `Z_p` given as an exact fraction `num/den` with `p` not dividing `den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PAdicExp {
    pub num: i64,
    pub den: i64,
}

impl PAdicExp {
    pub fn int(n: i64) -> PAdicExp {
        PAdicExp { num: n, den: 1 }
    }
    pub fn frac(num: i64, den: i64) -> PAdicExp {
        PAdicExp { num, den }
    }
}

/// Binomial coefficients `C(c, k)` for `k = 0..=kmax`, exact to the ring's full width.
/// The p-parts of numerator and `k!` are tracked as integers so nothing is lost to `1/k!`.
pub fn binomial_coeffs(ring: &CoeffRing, c: PAdicExp, kmax: usize) -> Result<Vec<CoeffElem>> {
    let p = ring.p();
    if c.den == 0 || c.den.unsigned_abs().is_multiple_of(p) {
        return Err(Error::NotInDomain(format!("exponent {}/{} is not p-integral", c.num, c.den)));
    }
    let pcap = ring.pcap();
    let red = |x: i128| -> u64 { x.rem_euclid(pcap as i128) as u64 };
    let den_inv = inv_mod_u64(red(c.den as i128), pcap).expect("unit denominator");
    let mut out = vec![ring.from_int(1)];
    let mut unit: u64 = 1;
    let mut vnum: i64 = 0;
    let mut zero = false;
    for k in 1..=kmax {
        // factor (c - (k-1)) = (num - (k-1) den) / den, divided by k
        let fac = c.num as i128 - (k as i128 - 1) * c.den as i128;
        if fac == 0 {
            zero = true;
        }
        if zero {
            out.push(ring.zero());
            continue;
        }
        let mut fu = fac.unsigned_abs();
        while fu.is_multiple_of(p as u128) {
            fu /= p as u128;
            vnum += 1;
        }
        let fu = if fac < 0 { red(-(fu as i128)) } else { red(fu as i128) };
        let vk = vp_u64(k as u64, p).unwrap_or(0);
        let ku = (k as u64 / p.pow(vk)) % pcap;
        vnum -= vk as i64;
        let ku_inv = inv_mod_u64(ku, pcap).expect("unit");
        unit = ring.lane_mul(ring.lane_mul(ring.lane_mul(unit, fu), den_inv), ku_inv);
        debug_assert!(vnum >= 0);
        let val = if vnum as u32 >= ring.cap() { 0 } else { ring.lane_mul(unit, ring.pow_p(vnum as u32)) };
        let mut lanes = vec![0; ring.f()];
        lanes[0] = val;
        out.push(ring.normalize(CoeffElem { lanes, denom: 0, prec: ring.cap() as i32 }));
    }
    Ok(out)
}

impl Series {
    /// Checks that `self` is topologically nilpotent (every term has positive valuation or
    /// positive pi-exponent) and returns the depth `D` of its negative pi-exponents.
    pub(crate) fn nilpotent_depth(&self) -> Result<i32> {
        if self.denom > 0 && !self.is_zero() {
            return Err(Error::NotInDomain("expected an integral series".into()));
        }
        let ring = self.ring();
        let mut depth = 0;
        for (_, j, c) in self.terms() {
            let v = ring.valuation(&c);
            if v == 0 && j <= 0 {
                return Err(Error::NotInDomain(format!(
                    "term with unit coefficient at pi^{j} is not topologically nilpotent"
                )));
            }
            depth = depth.max(-j);
        }
        Ok(depth)
    }

    /// Number of powers of a nilpotent `w` after which all further powers vanish on the
    /// window to the current precision.
    fn power_bound(&self, depth: i32) -> usize {
        let w = self.sr.window;
        let digits = self.ring().cap() as i32;
        (w.y_hi.max(0) + (depth + 1) * digits + 2) as usize
    }

    /// `sum_{k>=0} coef(k) * w^k` for nilpotent `w`, where `coef` returns the scaled term.
    /// Powers are kept only to `prec(w) + slack` digits, `slack` bounding the denominators
    /// the coefficients introduce; more would not survive in the sum.
    fn power_sum(
        &self,
        slack: i32,
        mut term: impl FnMut(usize, &Series) -> Result<Option<Series>>,
    ) -> Result<Series> {
        let depth = self.nilpotent_depth()?;
        let kmax = self.power_bound(depth);
        let mut pw = Series::one(&self.sr);
        let mut acc = match term(0, &pw)? {
            Some(t) => t,
            None => Series::zero(&self.sr),
        };
        let keep = self.prec.saturating_add(slack);
        for k in 1..=kmax {
            pw = pw.mul(self)?;
            if pw.prec > keep {
                pw = pw.with_prec(keep)?;
            }
            if let Some(t) = term(k, &pw)? {
                acc = acc.add(&t)?;
            }
            if pw.is_zero() && (depth == 0 || pw.y_hi.is_none()) {
                break;
            }
        }
        Ok(acc)
    }

    /// `log(1 + w)` for topologically nilpotent `w`.
    pub fn log1p(&self) -> Result<Series> {
        let ring = self.sr.ring.clone();
        let p = ring.p();
        let kmax = self.power_bound(self.nilpotent_depth()?) as f64;
        let slack = kmax.log(p as f64).floor() as i32;
        self.power_sum(slack, |k, pw| {
            if k == 0 || pw.is_zero() {
                return Ok(None);
            }
            let v = vp_u64(k as u64, p).unwrap_or(0);
            let unit = (k as u64) / p.pow(v);
            let inv = inv_mod_u64(unit % ring.pcap(), ring.pcap()).expect("unit");
            let mut lanes = vec![0; ring.f()];
            lanes[0] = if k % 2 == 1 { inv } else { ring.lane_sub(0, inv) };
            let c = ring.normalize(CoeffElem { lanes, denom: 0, prec: ring.cap() as i32 });
            Ok(Some(pw.scale(&c)?.div_p(v)?))
        })
    }

    /// Logarithm of a principal unit `1 + w`.
    pub fn log_unit(&self) -> Result<Series> {
        self.sub(&Series::one(&self.sr))?.log1p()
    }

    /// `exp(x)`; requires the factorial denominators to stay within budget.
    pub fn exp(&self) -> Result<Series> {
        let ring = self.sr.ring.clone();
        let p = ring.p();
        let mut vfact = 0u32;
        let mut ufact: u64 = 1;
        let slack = (self.power_bound(self.nilpotent_depth()?) as u64 / (p - 1)) as i32;
        self.power_sum(slack, |k, pw| {
            if k == 0 {
                return Ok(Some(pw.clone()));
            }
            let v = vp_u64(k as u64, p).unwrap_or(0);
            vfact += v;
            ufact = ring.lane_mul(ufact, (k as u64 / p.pow(v)) % ring.pcap());
            if pw.is_zero() {
                return Ok(None);
            }
            let inv = inv_mod_u64(ufact, ring.pcap()).expect("unit");
            let mut lanes = vec![0; ring.f()];
            lanes[0] = inv;
            let c = ring.normalize(CoeffElem { lanes, denom: 0, prec: ring.cap() as i32 });
            Ok(Some(pw.scale(&c)?.div_p(vfact)?))
        })
    }

    /// `(1 + s)^c` for topologically nilpotent `s`.
    pub fn binomial_pow1p(&self, c: PAdicExp) -> Result<Series> {
        let depth = self.nilpotent_depth()?;
        let coeffs = binomial_coeffs(self.ring(), c, self.power_bound(depth))?;
        let slack = coeffs.iter().map(|c| c.denom as i32).max().unwrap_or(0);
        self.power_sum(slack, |k, pw| {
            if coeffs[k].is_zero() {
                return Ok(None);
            }
            Ok(Some(pw.scale(&coeffs[k])?))
        })
    }

    /// `u^c` for a principal unit `u`.
    pub fn binomial_pow(&self, c: PAdicExp) -> Result<Series> {
        self.sub(&Series::one(&self.sr))?.binomial_pow1p(c)
    }

    /// Integer power; negative exponents go through [`Series::invert`].
    pub fn pow_int(&self, k: i64) -> Result<Series> {
        let base = if k < 0 { self.invert()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Series::one(&self.sr);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq)?;
            }
        }
        Ok(acc)
    }

    /// Leading monomial for inversion: among terms of least valuation, the one of least
    /// pi-exponent, which must be unique.
    fn leading_term(&self) -> Result<(i32, i32, CoeffElem)> {
        let ring = self.ring();
        let terms = self.terms();
        let vmin = terms
            .iter()
            .map(|t| ring.valuation(&t.2))
            .min()
            .ok_or_else(|| Error::NotInvertible("zero series".into()))?;
        let lead: Vec<_> = terms.iter().filter(|t| ring.valuation(&t.2) == vmin).collect();
        let jmin = lead.iter().map(|t| t.1).min().unwrap();
        let at: Vec<_> = lead.iter().filter(|t| t.1 == jmin).collect();
        if at.len() != 1 {
            return Err(Error::NotInvertible(format!(
                "{} competing leading terms at pi^{jmin}",
                at.len()
            )));
        }
        if let Some(h) = self.y_hi {
            if jmin > h {
                return Err(Error::NotInvertible("leading term beyond the reliable window".into()));
            }
        }
        Ok((*at[0]).clone())
    }

    /// Multiplicative inverse `c^{-1} T^{-u} pi^{-v} sum (-w)^k`.
    pub fn invert(&self) -> Result<Series> {
        let (u, v, c) = self.leading_term()?;
        let ring = self.sr.ring.clone();
        let cinv = ring.inv(&c)?;
        let normed = self.scale(&cinv)?.shift(-u, -v)?;
        let w = normed.sub(&Series::one(&self.sr))?;
        let neg_w = w.neg();
        let geo = neg_w.power_sum(0, |_, pw| Ok(Some(pw.clone())))?;
        geo.scale(&cinv)?.shift(-u, -v)
    }

    pub fn div(&self, other: &Series) -> Result<Series> {
        self.mul(&other.invert()?)
    }

    /// Smallest pi-exponent of a monomial of `pim^k` whose coefficient valuation stays
    /// below `digits`; `pim` is integral with nonnegative pi-exponents.
    fn min_degree_of_power(pim: &Series, k: usize, digits: i32) -> i64 {
        if digits <= 0 {
            return INF;
        }
        let ring = pim.ring();
        let nd = digits as usize;
        let mut best = vec![INF; nd];
        for (_, j, c) in pim.terms() {
            let v = ring.valuation(&c);
            if (v as usize) < nd {
                best[v as usize] = best[v as usize].min(j as i64);
            }
        }
        if let Some(h) = pim.y_hi {
            best[0] = best[0].min(h as i64 + 1);
        }
        let mut dp = vec![INF; nd];
        dp[0] = 0;
        for _ in 0..k {
            let mut nx = vec![INF; nd];
            for s in 0..nd {
                if dp[s] >= INF {
                    continue;
                }
                for (v, &j) in best.iter().enumerate() {
                    if j < INF && s + v < nd {
                        nx[s + v] = nx[s + v].min(dp[s] + j);
                    }
                }
            }
            dp = nx;
        }
        dp.into_iter().min().unwrap_or(INF)
    }

    fn check_pi_image(pim: &Series) -> Result<()> {
        if pim.denom > 0 {
            return Err(Error::DivergentSubstitution("pi image has denominators".into()));
        }
        let ring = pim.ring();
        for (_, j, c) in pim.terms() {
            if j < 0 || (j == 0 && ring.valuation(&c) == 0) {
                return Err(Error::DivergentSubstitution(format!(
                    "pi image has a non-small term at pi^{j}"
                )));
            }
        }
        Ok(())
    }

    /// `sum a_{ij} t_img^i pi_img^j`. `pi_img` must lie in the maximal ideal and `t_img`
    /// must be a unit.
    pub fn substitute(&self, pi_img: &Series, t_img: &Series) -> Result<Series> {
        Series::check_pi_image(pi_img)?;
        let Some((tmin, tmax, ymin, ymax)) = self.support_box() else {
            let mut z = self.clone();
            if let Some(h) = self.y_hi {
                let d = Series::min_degree_of_power(pi_img, (h + 1).max(0) as usize, self.prec + self.denom as i32);
                z.y_hi = if d >= INF / 2 { None } else { Some((d - 1) as i32) };
            }
            z.normalize()?;
            return Ok(z);
        };
        // powers of the pi image, negative ones through the inverse
        let mut pos = vec![Series::one(&self.sr)];
        for j in 1..=ymax.max(0) {
            let next = pos[j as usize - 1].mul(pi_img)?;
            pos.push(next);
        }
        let mut negp = vec![Series::one(&self.sr)];
        if ymin < 0 {
            let q = pi_img.invert()?;
            for j in 1..=(-ymin) {
                let next = negp[j as usize - 1].mul(&q)?;
                negp.push(next);
            }
        }
        let pi_pow = |j: i32| -> &Series { if j >= 0 { &pos[j as usize] } else { &negp[(-j) as usize] } };
        // T-image: pure monomials shift, anything else is multiplied out
        let t_mono = t_img.as_monomial();
        let mut t_pos = vec![Series::one(&self.sr)];
        let mut t_neg = vec![Series::one(&self.sr)];
        if t_mono.is_none() {
            for i in 1..=tmax.max(0) {
                let next = t_pos[i as usize - 1].mul(t_img)?;
                t_pos.push(next);
            }
            if tmin < 0 {
                let ti = t_img.invert()?;
                for i in 1..=(-tmin) {
                    let next = t_neg[i as usize - 1].mul(&ti)?;
                    t_neg.push(next);
                }
            }
        }
        let ring = self.sr.ring.clone();
        let mut acc = Series::zero(&self.sr);
        for i in tmin..=tmax {
            let mut row = Series::zero(&self.sr);
            for j in ymin..=ymax {
                let Some(l) = self.lanes_at(i, j) else { continue };
                if l.iter().all(|c| *c == 0) {
                    continue;
                }
                let c = ring.normalize(CoeffElem { lanes: l.to_vec(), denom: self.denom, prec: self.prec });
                row = row.add(&pi_pow(j).scale(&c)?)?;
            }
            if row.is_zero() && row.y_hi.is_none() {
                continue;
            }
            let img = match &t_mono {
                Some((c, a, b)) => {
                    let cp = ring.pow(c, i.unsigned_abs() as u64)?;
                    let cp = if i < 0 { ring.inv(&cp)? } else { cp };
                    row.scale(&cp)?.shift(a * i, b * i)?
                }
                None => {
                    let tp = if i >= 0 { &t_pos[i as usize] } else { &t_neg[(-i) as usize] };
                    row.mul(tp)?
                }
            };
            acc = acc.add(&img)?;
        }
        acc.prec = acc.prec.min(self.prec);
        if let Some(h) = self.y_hi {
            let d = Series::min_degree_of_power(pi_img, (h + 1).max(0) as usize, self.prec + self.denom as i32);
            if d < INF / 2 {
                let tl = t_img.ylow().min(0);
                let cut = (d + tl * (tmax - tmin + 1).max(1) as i64 - 1) as i32;
                acc = acc.truncate_y(cut)?;
            }
        }
        Ok(acc)
    }

    /// `Some((c, i, j))` when the series is exactly `c T^i pi^j`.
    pub fn as_monomial(&self) -> Option<(CoeffElem, i32, i32)> {
        if self.y_hi.is_some() {
            return None;
        }
        let t = self.terms();
        if t.len() == 1 {
            let (i, j, c) = t[0].clone();
            Some((c, i, j))
        } else {
            None
        }
    }

    /// `D1 = (1 + pi) d/dpi`.
    pub fn d1(&self) -> Result<Series> {
        let ring = self.ring();
        let mut terms = Vec::new();
        for (i, j, c) in self.terms() {
            if j == 0 {
                continue;
            }
            let jc = ring.mul(&c, &ring.from_int(j as i64))?;
            terms.push((i, j - 1, jc.clone()));
            terms.push((i, j, jc));
        }
        let mut s = Series::from_terms(&self.sr, &terms)?;
        s.prec = s.prec.min(self.prec);
        s.y_hi = self.y_hi.map(|h| h - 1);
        s.normalize()?;
        Ok(s)
    }

    /// `D2 = T d/dT`.
    pub fn d2(&self) -> Result<Series> {
        let ring = self.ring();
        let mut terms = Vec::new();
        for (i, j, c) in self.terms() {
            if i != 0 {
                terms.push((i, j, ring.mul(&c, &ring.from_int(i as i64))?));
            }
        }
        let mut s = Series::from_terms(&self.sr, &terms)?;
        s.prec = s.prec.min(self.prec);
        s.y_hi = self.y_hi;
        s.normalize()?;
        Ok(s)
    }

    /// Plain `d/dpi` (used for differential forms in `dpi`).
    pub fn d_pi(&self) -> Result<Series> {
        let ring = self.ring();
        let mut terms = Vec::new();
        for (i, j, c) in self.terms() {
            if j != 0 {
                terms.push((i, j - 1, ring.mul(&c, &ring.from_int(j as i64))?));
            }
        }
        let mut s = Series::from_terms(&self.sr, &terms)?;
        s.prec = s.prec.min(self.prec);
        s.y_hi = self.y_hi.map(|h| h - 1);
        s.normalize()?;
        Ok(s)
    }
}
