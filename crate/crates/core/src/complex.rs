//! The four-term Herr-style complexes, the cup product `H^1 x H^1 -> H^2`, the simplified
//! pairing against `H^1` and the Tate trace `-c TR`.

use serde::{Deserialize, Serialize};

use crate::coeff::{inv_mod_u64, CoeffElem, CoeffRing};
use crate::error::{Error, Result};
use crate::forms::{tr_res, Form2, ResidueClass};
use crate::galois::{GaloisParams, Ops};
use crate::series::{PAdicExp, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    Phi,
    Psi,
}

/// Cochain of degree 0..=3 with 1, 3, 3, 1 components; `twist` is the power of the
/// cyclotomic character it carries.
#[derive(Debug, Clone)]
pub struct Cochain {
    pub degree: u8,
    pub comps: Vec<Series>,
    pub twist: i32,
}

impl Cochain {
    pub fn new(degree: u8, comps: Vec<Series>, twist: i32) -> Result<Cochain> {
        let want = match degree {
            0 | 3 => 1,
            1 | 2 => 3,
            _ => return Err(Error::NotInDomain(format!("no cochains of degree {degree}"))),
        };
        if comps.len() != want {
            return Err(Error::NotInDomain(format!("degree {degree} needs {want} components, got {}", comps.len())));
        }
        Ok(Cochain { degree, comps, twist })
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Cochain) -> Result<Cochain> {
        let comps = self.comps.iter().zip(&o.comps).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Cochain::new(self.degree, comps, self.twist)
    }
}

/// Operators of one complex `C_{phi or psi, gamma_1, gamma_2}(D)`.
#[derive(Debug, Clone)]
pub struct Complex {
    pub ops: Ops,
    pub variant: Variant,
}

impl Complex {
    pub fn new(ops: Ops, variant: Variant) -> Complex {
        Complex { ops, variant }
    }

    fn frob(&self, x: &Series) -> Result<Series> {
        match self.variant {
            Variant::Phi => self.ops.phi(x),
            Variant::Psi => self.ops.psi(x),
        }
    }

    /// `gamma_1` on `D(twist)`: `chi^twist gamma_1`.
    pub fn g1(&self, x: &Series, twist: i32) -> Result<Series> {
        let g = self.ops.gamma1(x)?;
        if twist == 0 {
            return Ok(g);
        }
        let ring = x.ring();
        let chi = ring.from_int(self.ops.chi());
        let mut c = ring.from_int(1);
        for _ in 0..twist.unsigned_abs() {
            c = ring.mul(&c, &chi)?;
        }
        if twist < 0 {
            c = ring.inv(&c)?;
        }
        g.scale(&c)
    }

    fn g2(&self, x: &Series) -> Result<Series> {
        self.ops.gamma2(x)
    }

    /// `gamma_1 (gamma_2^{1/a} - 1)/(gamma_2 - 1)`.
    fn g1_ratio(&self, x: &Series, twist: i32) -> Result<Series> {
        let r = self.ops.gamma2_ratio(PAdicExp::frac(1, self.ops.chi()), x)?;
        self.g1(&r, twist)
    }

    /// Differential from degree `k` to `k + 1`.
    pub fn d(&self, c: &Cochain) -> Result<Cochain> {
        let t = c.twist;
        let minus1 = |a: Series, b: &Series| a.sub(b);
        match c.degree {
            0 => {
                let x = &c.comps[0];
                let comps = vec![
                    minus1(self.frob(x)?, x)?,
                    minus1(self.g1(x, t)?, x)?,
                    minus1(self.g2(x)?, x)?,
                ];
                Cochain::new(1, comps, t)
            }
            1 => {
                let (x, y, z) = (&c.comps[0], &c.comps[1], &c.comps[2]);
                let c0 = minus1(self.frob(y)?, y)?.sub(&minus1(self.g1(x, t)?, x)?)?;
                let c1 = minus1(self.frob(z)?, z)?.sub(&minus1(self.g2(x)?, x)?)?;
                let c2 = minus1(self.g2(y)?, y)?.sub(&minus1(self.g1_ratio(z, t)?, z)?)?;
                Cochain::new(2, vec![c0, c1, c2], t)
            }
            2 => {
                let (x, y, z) = (&c.comps[0], &c.comps[1], &c.comps[2]);
                let v = minus1(self.g2(x)?, x)?
                    .sub(&minus1(self.g1_ratio(y, t)?, y)?)?
                    .sub(&minus1(self.frob(z)?, z)?)?;
                Cochain::new(3, vec![v], t)
            }
            d => Err(Error::NotInDomain(format!("no differential out of degree {d}"))),
        }
    }

    /// Cup product of two degree-1 classes. The last component is only meaningful mod pi
    /// and requires both third components to lie in `S_n`.
    pub fn cup_h1_h1(&self, u: &Cochain, v: &Cochain) -> Result<Cochain> {
        if u.degree != 1 || v.degree != 1 {
            return Err(Error::NotInDomain("cup product expects two degree-1 cochains".into()));
        }
        for s in [&u.comps[2], &v.comps[2]] {
            require_sn(s)?;
        }
        let (x, y, z) = (&u.comps[0], &u.comps[1], &u.comps[2]);
        let (x2, y2, z2) = (&v.comps[0], &v.comps[1], &v.comps[2]);
        let fx = y.mul(&self.g1(x2, v.twist)?)?.sub(&x.mul(&self.ops.phi(y2)?)?)?;
        let fy = z.mul(&self.g2(x2)?)?.sub(&x.mul(&self.ops.phi(z2)?)?)?;
        let fz = y.mul(&self.g1(z2, v.twist)?)?.sub(&z.mul(&self.g2(y2)?)?)?;
        Cochain::new(2, vec![fx, fy, fz], u.twist + v.twist)
    }

    /// `z x - y' phi(y) + x' phi(z)` modulo `S_n`, for `u = [x, y, z]` and
    /// `w = [x', y', z']`. The gamma-twists of the full formula are trivial mod `S_n`.
    pub fn pair_h1_h2_simplified(&self, u: &Cochain, w: &Cochain) -> Result<Series> {
        if u.degree != 1 || w.degree != 2 {
            return Err(Error::NotInDomain("pairing expects degrees 1 and 2".into()));
        }
        require_sn(&u.comps[1])?;
        require_sn(&u.comps[2])?;
        let (x, y, z) = (&u.comps[0], &u.comps[1], &u.comps[2]);
        let (fx, fy, fz) = (&w.comps[0], &w.comps[1], &w.comps[2]);
        let val = fz.mul(x)?.sub(&fy.mul(&self.ops.phi(y)?)?)?.add(&fx.mul(&self.ops.phi(z)?)?)?;
        Ok(mod_sn(&val))
    }
}

/// Components of the pairing that are needed must have no negative pi-exponents.
pub fn require_sn(s: &Series) -> Result<()> {
    if let Some((_, _, ymin, _)) = s.support_box() {
        if ymin < 0 {
            return Err(Error::NotInSimplifiedDomain(format!("component has a pole of order {}", -ymin)));
        }
    }
    Ok(())
}

/// Projection killing `S_n` (all nonnegative pi-exponents).
pub fn mod_sn(s: &Series) -> Series {
    s.filter_terms(|_, j| j < 0)
}

/// `c = p^n/log chi(gamma_{1,n}) * p^n/eta(gamma_{2,n})`.
#[derive(Debug, Clone, PartialEq)]
pub struct TateConstant {
    pub c: CoeffElem,
}

/// `log(1 + x)` for an integer with `p | x`, to the ring's full width.
fn log_one_plus_int(ring: &CoeffRing, x: i64) -> Result<CoeffElem> {
    let p = ring.p();
    let xe = ring.from_int(x);
    let mut acc = ring.zero();
    let mut pw = ring.from_int(1);
    for k in 1..=(4 * ring.cap() as u64 + 8) {
        pw = ring.mul(&pw, &xe)?;
        if pw.is_zero() {
            break;
        }
        let v = crate::coeff::vp_u64(k, p).unwrap_or(0);
        let unit = k / p.pow(v);
        let inv = inv_mod_u64(unit % ring.pcap(), ring.pcap()).expect("unit");
        let mut term = ring.mul(&pw, &ring.from_lanes(&[inv as i64])?)?;
        term = ring.div_p(&term, v)?;
        acc = if k % 2 == 1 { ring.add(&acc, &term)? } else { ring.sub(&acc, &term)? };
    }
    Ok(acc)
}

impl TateConstant {
    pub fn new(ring: &CoeffRing, gp: &GaloisParams) -> Result<TateConstant> {
        let p = ring.p();
        let n = gp.level;
        let pn = ring.from_int(p.pow(n) as i64);
        let log_chi = log_one_plus_int(ring, gp.chi_gamma1n - 1)?;
        let a = ring.mul(&pn, &ring.inv(&log_chi)?)?;
        let b = ring.mul(&pn, &ring.inv(&ring.from_int(gp.eta_gamma2n))?)?;
        Ok(TateConstant { c: ring.mul(&a, &b)? })
    }

    /// `c mod p^n`.
    pub fn residue(&self, ring: &CoeffRing, n: u32) -> Result<u64> {
        ring.reduce_mod(&self.c, n)
    }
}

/// `-c TR(omega) mod p^n`.
pub fn tate_trace(w: &Form2, c: &TateConstant, n: u32) -> Result<u64> {
    let ring = w.lambda.ring();
    let ResidueClass::Mod { value, .. } = tr_res(w, Some(n))? else { unreachable!() };
    let m = ring.pow_p(n);
    let cm = c.residue(ring, n)?;
    Ok((m - (cm as u128 * value as u128 % m as u128) as u64) % m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::RingParams;
    use crate::series::{parse_series, SeriesRing, Sr, Window};

    fn setup() -> (Sr, Ops) {
        let ring = CoeffRing::new(RingParams::new(3, 1, 6, 4)).unwrap();
        let sr = SeriesRing::new(ring, Window { t_lo: -60, t_hi: 60, y_lo: -40, y_hi: 24 }).unwrap();
        let ops = Ops::base(&sr, &GaloisParams::defaults(3, 1));
        (sr, ops)
    }

    fn s(sr: &Sr, t: &str) -> Series {
        parse_series(sr, t).unwrap()
    }

    #[test]
    fn f1_examples() {
        let (sr, ops) = setup();
        let cx = Complex::new(ops, Variant::Phi);
        let d = cx.d(&Cochain::new(0, vec![Series::one(&sr)], 0).unwrap()).unwrap();
        assert!(d.is_zero());
        let d = cx.d(&Cochain::new(0, vec![s(&sr, "T")], 0).unwrap()).unwrap();
        assert_eq!(d.comps[0], s(&sr, "T^3 - T"));
        assert!(d.comps[1].is_zero());
        assert_eq!(d.comps[2], s(&sr, "T*pi"));
    }

    #[test]
    fn d_squared_vanishes() {
        let (sr, ops) = setup();
        for variant in [Variant::Phi, Variant::Psi] {
            let cx = Complex::new(ops.clone(), variant);
            let x = Cochain::new(0, vec![s(&sr, "T*pi + 2*T^-1*pi^2 + 1")], 1).unwrap();
            assert!(cx.d(&cx.d(&x).unwrap()).unwrap().is_zero());
            let v = Cochain::new(1, vec![s(&sr, "T*pi^2"), s(&sr, "2 + T^-1*pi"), s(&sr, "pi^3 + T")], 1).unwrap();
            assert!(cx.d(&cx.d(&v).unwrap()).unwrap().is_zero());
        }
    }

    #[test]
    fn tate_constant_is_one_mod_pn() {
        let ring = CoeffRing::new(RingParams::new(3, 1, 6, 4)).unwrap();
        for n in 1..=2 {
            let c = TateConstant::new(&ring, &GaloisParams::defaults(3, n)).unwrap();
            assert_eq!(c.residue(&ring, n).unwrap(), 1);
            assert_eq!(ring.valuation(&c.c), 0);
        }
    }
}
