//! Differential forms in canonical coordinates: `a dpi + b dT` and `lambda dpi ^ dT`.
//!
//! The twisted actions are defined in the logarithmic frame
//! `lambda dpi ^ dT = mu dlog(1+pi) ^ dlog T` with `mu = (1+pi) T lambda`, where
//! `phi_Omega` acts as `phi` on `mu`, `gamma_1` as `chi^2 gamma_1` and `gamma_2` as `gamma_2`.

use serde::{Deserialize, Serialize};

use crate::coeff::CoeffElem;
use crate::error::{Error, Result};
use crate::galois::Ops;
use crate::series::{PAdicExp, Series, Sr};

#[derive(Debug, Clone)]
pub struct Form1 {
    pub a_pi: Series,
    pub a_t: Series,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Form2 {
    pub lambda: Series,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormOp {
    PhiOmega,
    Gamma1,
    Gamma2,
}

/// Trace of a residue, either exact or as a class mod `p^j`.
#[derive(Debug, Clone, PartialEq)]
pub enum ResidueClass {
    Exact(CoeffElem),
    Mod { value: u64, j: u32 },
}

impl Form1 {
    pub fn add(&self, o: &Form1) -> Result<Form1> {
        Ok(Form1 { a_pi: self.a_pi.add(&o.a_pi)?, a_t: self.a_t.add(&o.a_t)? })
    }
    pub fn sub(&self, o: &Form1) -> Result<Form1> {
        Ok(Form1 { a_pi: self.a_pi.sub(&o.a_pi)?, a_t: self.a_t.sub(&o.a_t)? })
    }
    pub fn scale(&self, s: &Series) -> Result<Form1> {
        Ok(Form1 { a_pi: self.a_pi.mul(s)?, a_t: self.a_t.mul(s)? })
    }
    pub fn agrees_with(&self, o: &Form1) -> Result<bool> {
        Ok(self.a_pi.agrees_with(&o.a_pi)? && self.a_t.agrees_with(&o.a_t)?)
    }
}

impl Form2 {
    pub fn new(lambda: Series) -> Form2 {
        Form2 { lambda }
    }
    pub fn add(&self, o: &Form2) -> Result<Form2> {
        Ok(Form2 { lambda: self.lambda.add(&o.lambda)? })
    }
    pub fn sub(&self, o: &Form2) -> Result<Form2> {
        Ok(Form2 { lambda: self.lambda.sub(&o.lambda)? })
    }
    pub fn scale(&self, s: &Series) -> Result<Form2> {
        Ok(Form2 { lambda: self.lambda.mul(s)? })
    }
}

/// `du/u = (du/dpi)/u dpi + (du/dT)/u dT`.
pub fn dlog(u: &Series) -> Result<Form1> {
    let inv = u.invert()?;
    Ok(Form1 { a_pi: u.d_pi()?.mul(&inv)?, a_t: u.d2()?.shift(-1, 0)?.mul(&inv)? })
}

/// `(a_pi b_T - a_T b_pi) dpi ^ dT`.
pub fn wedge(w1: &Form1, w2: &Form1) -> Result<Form2> {
    Ok(Form2 { lambda: w1.a_pi.mul(&w2.a_t)?.sub(&w1.a_t.mul(&w2.a_pi)?)? })
}

/// Coefficient of `T^{-1} pi^{-1}` in `lambda`.
pub fn res(w: &Form2) -> Result<CoeffElem> {
    w.lambda.coeff(-1, -1)
}

/// Trace of the residue, reduced mod `p^j` when `j` is given.
pub fn tr_res(w: &Form2, j: Option<u32>) -> Result<ResidueClass> {
    let r = res(w)?;
    let ring = w.lambda.ring();
    let t = ring.trace(&r);
    match j {
        None => Ok(ResidueClass::Exact(t)),
        Some(j) => {
            if t.denom_exp() > 0 {
                return Err(Error::NonIntegralResidue(format!(
                    "trace of the residue is {} before reduction mod p^{j}",
                    ring.display(&t)
                )));
            }
            Ok(ResidueClass::Mod { value: ring.reduce_mod(&t, j)?, j })
        }
    }
}

/// `mu = (1+pi) T lambda`.
fn to_log_frame(lambda: &Series) -> Result<Series> {
    let one_plus = Series::pi(lambda.sr()).add(&Series::one(lambda.sr()))?;
    lambda.mul(&one_plus)?.shift(1, 0)
}

fn from_log_frame(mu: &Series) -> Result<Series> {
    let one_plus = Series::pi(mu.sr()).add(&Series::one(mu.sr()))?;
    mu.mul(&one_plus.invert()?)?.shift(-1, 0)
}

/// `(1+pi)^k`, exact for `k >= 0`.
fn one_plus_pi_pow(sr: &Sr, k: i64) -> Result<Series> {
    Series::pi(sr).add(&Series::one(sr))?.pow_int(k)
}

/// The twisted `(phi, G)`-action on 2-forms. Pulling `mu` back through the log frame
/// leaves a polynomial Jacobian factor, so no division by `1+pi` is needed and deep
/// poles keep their full pi-window.
pub fn twisted_action(w: &Form2, op: FormOp, ops: &Ops) -> Result<Form2> {
    let sr = w.lambda.sr();
    let lambda = match op {
        FormOp::PhiOmega => {
            let p = sr.coeffs().p() as i64;
            let jac = one_plus_pi_pow(sr, p - 1)?.shift(p as i32 - 1, 0)?;
            ops.phi(&w.lambda)?.mul(&jac)?
        }
        FormOp::Gamma1 => {
            let c = ops.chi();
            let jac = one_plus_pi_pow(sr, c - 1)?.scale_int(c * c)?;
            ops.gamma1(&w.lambda)?.mul(&jac)?
        }
        FormOp::Gamma2 => ops.gamma2(&w.lambda)?.mul(&one_plus_pi_pow(sr, ops.twist())?)?,
    };
    Ok(Form2 { lambda })
}

/// `(gamma_2^c - 1)/(gamma_2 - 1)` acting on 2-forms.
pub fn gamma2_ratio_form(w: &Form2, c: PAdicExp, ops: &Ops) -> Result<Form2> {
    let mu = to_log_frame(&w.lambda)?;
    Ok(Form2 { lambda: from_log_frame(&ops.gamma2_ratio(c, &mu)?)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{CoeffRing, RingParams};
    use crate::galois::GaloisParams;
    use crate::series::{parse_series, SeriesRing, Sr, Window};

    fn setup() -> (Sr, Ops) {
        let ring = CoeffRing::new(RingParams::new(3, 2, 6, 4)).unwrap();
        let sr = SeriesRing::new(ring, Window { t_lo: -60, t_hi: 60, y_lo: -40, y_hi: 24 }).unwrap();
        let ops = Ops::base(&sr, &GaloisParams::defaults(3, 1));
        (sr, ops)
    }

    fn s(sr: &Sr, t: &str) -> Series {
        parse_series(sr, t).unwrap()
    }

    #[test]
    fn dlog_examples() {
        let (sr, _) = setup();
        let d = dlog(&s(&sr, "T")).unwrap();
        assert!(d.a_pi.is_zero());
        assert_eq!(d.a_t, s(&sr, "T^-1"));
        let u = s(&sr, "1 + pi + 3*T");
        let v = s(&sr, "1 + x*T^-1*pi");
        let lhs = dlog(&u.mul(&v).unwrap()).unwrap();
        let rhs = dlog(&u).unwrap().add(&dlog(&v).unwrap()).unwrap();
        assert!(lhs.agrees_with(&rhs).unwrap());
    }

    #[test]
    fn wedge_and_residue() {
        let (sr, _) = setup();
        let dpi = Form1 { a_pi: Series::one(&sr), a_t: Series::zero(&sr) };
        let dt = Form1 { a_pi: Series::zero(&sr), a_t: Series::one(&sr) };
        assert!(wedge(&dpi, &dpi).unwrap().lambda.is_zero());
        assert_eq!(wedge(&dpi, &dt).unwrap().lambda, Series::one(&sr));
        let w = Form2::new(s(&sr, "T*pi^-1 + 3*T^-1*pi^-1"));
        assert_eq!(res(&w).unwrap(), sr.coeffs().from_int(3));
    }

    #[test]
    fn residue_of_frobenius_pullback() {
        let (sr, ops) = setup();
        let lam = s(&sr, "T^-1*pi^-1");
        let w = Form2::new(ops.phi(&lam).unwrap());
        let dphi_pi = dlog(&ops.phi(&Series::pi(&sr)).unwrap()).unwrap().scale(&ops.phi(&Series::pi(&sr)).unwrap()).unwrap();
        let dphi_t = dlog(&s(&sr, "T^3")).unwrap().scale(&s(&sr, "T^3")).unwrap();
        let jac = wedge(&dphi_pi, &dphi_t).unwrap();
        let r = res(&w.scale(&jac.lambda).unwrap()).unwrap();
        assert_eq!(r, sr.coeffs().from_int(9));
        // the twisted action keeps the residue
        let t = twisted_action(&Form2::new(lam), FormOp::PhiOmega, &ops).unwrap();
        assert_eq!(res(&t).unwrap(), sr.coeffs().from_int(1));
    }

    #[test]
    fn vanishing_formulae() {
        let (sr, ops) = setup();
        let w = Form2::new(s(&sr, "x*T^-1*pi^-1 + 2*T^-2*pi + T^-1*pi^-2 + 5*pi^-1 + T*pi^3"));
        let g2 = twisted_action(&w, FormOp::Gamma2, &ops).unwrap().sub(&w).unwrap();
        assert!(res(&g2).unwrap().is_zero());
        let ph = twisted_action(&w, FormOp::PhiOmega, &ops).unwrap();
        let r0 = tr_res(&w, Some(3)).unwrap();
        assert_eq!(tr_res(&ph, Some(3)).unwrap(), r0);
        let a = ops.chi();
        let g1 = twisted_action(&gamma2_ratio_form(&w, PAdicExp::frac(1, a), &ops).unwrap(), FormOp::Gamma1, &ops)
            .unwrap();
        assert_eq!(tr_res(&g1, Some(3)).unwrap(), r0);
    }
}
