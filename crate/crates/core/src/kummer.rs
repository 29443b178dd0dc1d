//! The level-n Kummer map on principal units.
//!
//! Inputs are lifts `F(Y)` in `1 + (p, Y)`, written in the text variables `pi` and `T`;
//! at level n they are read with `pi = Y = pi_n` and `T` the chosen residue variable.
//! Everything below is computed modulo `p^n`.

use serde::Serialize;

use crate::complex::Cochain;
use crate::error::{Error, Result};
use crate::galois::{GaloisParams, Ops, ResVar};
use crate::series::{PAdicExp, Series, Sr};

/// Level-n working context: operators, the level-0 uniformizer and `tau`.
#[derive(Debug, Clone)]
pub struct Level {
    pub sr: Sr,
    pub ops: Ops,
    pub gp: GaloisParams,
    pub var: ResVar,
    pub n: u32,
    /// `pi = (1+Y)^{p^n} - 1`.
    pub pi0: Series,
    /// `tau = 1/pi - 1/2`.
    pub tau: Series,
    pub pi0_inv: Series,
}

impl Level {
    pub fn new(sr: &Sr, gp: &GaloisParams, var: ResVar) -> Result<Level> {
        let p = sr.coeffs().p();
        gp.validate(p)?;
        let n = gp.level;
        if n as i32 > sr.coeffs().m() as i32 {
            return Err(Error::Config(format!("level {n} exceeds the working precision")));
        }
        let ops = Ops::level(sr, gp, var);
        let pn = p.pow(n) as i64;
        let pi0 = Series::pi(sr).binomial_pow1p(PAdicExp::int(pn))?.sub(&Series::one(sr))?;
        let half = {
            let ring = sr.coeffs();
            ring.inv(&ring.from_int(2))?
        };
        let pi0_inv = pi0.with_prec(n as i32)?.invert()?;
        let tau = pi0_inv.sub(&Series::monomial(sr, &half, 0, 0)?)?;
        Ok(Level { sr: sr.clone(), ops, gp: *gp, var, n, pi0, tau, pi0_inv })
    }

    /// Reduce to the torsion level `p^n`.
    pub fn modn(&self, s: &Series) -> Result<Series> {
        s.with_prec(self.n as i32)
    }

    /// `(1 - chi(gamma_{1,n}))/p^n`.
    pub fn k1(&self) -> i64 {
        let pn = (self.sr.coeffs().p() as i64).pow(self.n);
        (1 - self.gp.chi_gamma1n) / pn
    }

    /// `eta_n(gamma_{2,n}) = eta(gamma_{2,n})/p^n`.
    pub fn eta_small(&self) -> i64 {
        let pn = (self.sr.coeffs().p() as i64).pow(self.n);
        self.gp.eta_gamma2n / pn
    }

    /// `gamma_{1,n}` on `D(1)`, that is `chi gamma_{1,n}`.
    pub fn gamma1_tw(&self, x: &Series) -> Result<Series> {
        self.ops.gamma1(x)?.scale_int(self.gp.chi_gamma1n)
    }
}

/// Element of `1 + (p, Y)`.
#[derive(Debug, Clone)]
pub struct PrincipalUnit(Series);

impl PrincipalUnit {
    pub fn new(s: Series) -> Result<PrincipalUnit> {
        s.sub(&Series::one(s.sr()))?.nilpotent_depth().map_err(|e| match e {
            Error::NotInDomain(msg) => Error::NotInDomain(format!("not a principal unit: {msg}")),
            other => other,
        })?;
        if let Some((_, _, ymin, _)) = s.sub(&Series::one(s.sr()))?.support_box() {
            if ymin < 0 {
                return Err(Error::NotInDomain("principal units must be integral power series in pi".into()));
            }
        }
        Ok(PrincipalUnit(s))
    }
    pub fn series(&self) -> &Series {
        &self.0
    }
    pub fn mul(&self, o: &PrincipalUnit) -> Result<PrincipalUnit> {
        Ok(PrincipalUnit(self.0.mul(&o.0)?))
    }
    pub fn pow(&self, k: i64) -> Result<PrincipalUnit> {
        Ok(PrincipalUnit(self.0.pow_int(k)?))
    }
}

/// `l(F) = (1 - phi/p) log F`.
pub fn l_map(ops: &Ops, f: &PrincipalUnit) -> Result<Series> {
    let lg = f.series().log_unit()?;
    lg.sub(&ops.phi(&lg)?.div_p(1)?)
}

/// `D1 log F` and `D2 log F` (with the level's `D2` normalization).
pub fn dlog_coords(ops: &Ops, f: &PrincipalUnit) -> Result<(Series, Series)> {
    let inv = f.series().invert()?;
    Ok((f.series().d1()?.mul(&inv)?, ops.d2(f.series())?.mul(&inv)?))
}

/// Output of [`kummer_coefficients`].
#[derive(Debug, Clone)]
pub struct KummerDatum {
    pub f_series: Series,
    /// `f tau`, the first cochain component.
    pub x: Series,
    pub a_gamma1: Series,
    pub b_gamma2: Series,
    pub a_lead: Series,
    pub b_lead: Series,
    pub diagnostics: KummerDiagnostics,
}

#[derive(Debug, Clone, Serialize)]
pub struct KummerDiagnostics {
    /// Reliable pi-window of the solved coefficients.
    pub a_window: Option<i32>,
    pub b_window: Option<i32>,
    /// `phi`-iterations consumed by the solver (both equations).
    pub residual_terms: usize,
}


fn high_part(s: &Series) -> Series {
    s.filter_terms(|_, j| j > 0)
}

/// Solve `(phi - 1) u = rhs` with `u = lead mod pi`, checking the leading congruence.
fn solve_with_lead(level: &Level, rhs: &Series, lead: &Series, what: &str) -> Result<(Series, usize)> {
    let ops = &level.ops;
    let v = level.modn(&rhs.sub(&ops.phi(lead)?.sub(lead)?)?)?;
    // the residual must lie in pi S_n for level-0 pi, which is stronger than mod Y
    let low = level.modn(&v.mul(&level.pi0_inv)?)?.filter_terms(|_, j| j < 0);
    if !low.is_zero() {
        return Err(Error::UniquenessCheckFailed(format!(
            "{what}: the leading-term congruence fails, residual / pi has polar part {low}"
        )));
    }
    let high = high_part(&v);
    let nterms = high.num_terms();
    let u = ops.solve_phi_minus_one(&high)?;
    let sol = level.modn(&lead.add(&u)?)?;
    let check = level.modn(&ops.phi(&sol)?.sub(&sol)?.sub(rhs)?)?;
    if !check.is_zero() {
        return Err(Error::UniquenessCheckFailed(format!("{what}: (phi - 1) u differs from the target by {check}")));
    }
    Ok((sol, nterms))
}

/// The cocycle coefficients `a_{gamma_1}`, `b_{gamma_2}` of `F` at level n.
pub fn kummer_coefficients(level: &Level, f: &PrincipalUnit) -> Result<KummerDatum> {
    let ops = &level.ops;
    let f_series = level.modn(&l_map(ops, f)?)?;
    let x = level.modn(&f_series.mul(&level.tau)?)?;
    let (d1, d2) = dlog_coords(ops, f)?;
    let a_lead = level.modn(&d1.scale_int(level.k1())?)?;
    // the sign is fixed by (phi - 1) b = (gamma_2 - 1)(f tau)
    let b_lead = level.modn(&d2.scale_int(-level.eta_small())?)?;
    let rhs_a = level.modn(&level.gamma1_tw(&x)?.sub(&x)?)?;
    let rhs_b = level.modn(&ops.gamma2(&x)?.sub(&x)?)?;
    let (a, na) = solve_with_lead(level, &rhs_a, &a_lead, "a_gamma1")?;
    let (b, nb) = solve_with_lead(level, &rhs_b, &b_lead, "b_gamma2")?;
    Ok(KummerDatum {
        diagnostics: KummerDiagnostics { a_window: a.y_hi(), b_window: b.y_hi(), residual_terms: na + nb },
        f_series,
        x,
        a_gamma1: a,
        b_gamma2: b,
        a_lead,
        b_lead,
    })
}

/// `iota_n(F) = [f tau, a_{gamma_1}, b_{gamma_2}]`, twisted once.
pub fn iota_n(level: &Level, f: &PrincipalUnit) -> Result<Cochain> {
    let k = kummer_coefficients(level, f)?;
    Cochain::new(1, vec![k.x, k.a_gamma1, k.b_gamma2], 1)
}

/// Cocycle identity `(gamma_2 - 1) a = (chi gamma_1 (gamma_2^{1/a} - 1)/(gamma_2 - 1) - 1) b`;
/// returns the difference (zero when it holds).
pub fn cocycle_defect(level: &Level, k: &KummerDatum) -> Result<Series> {
    let ops = &level.ops;
    let lhs = ops.gamma2(&k.a_gamma1)?.sub(&k.a_gamma1)?;
    let r = ops.gamma2_ratio(PAdicExp::frac(1, ops.chi()), &k.b_gamma2)?;
    let rhs = level.gamma1_tw(&r)?.sub(&k.b_gamma2)?;
    level.modn(&lhs.sub(&rhs)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{CoeffRing, RingParams};
    use crate::series::{parse_series, SeriesRing, Window};

    fn level() -> Level {
        let ring = CoeffRing::new(RingParams::new(3, 1, 6, 4)).unwrap();
        let sr = SeriesRing::new(ring, Window::defaults(3, 1, 6)).unwrap();
        Level::new(&sr, &GaloisParams::defaults(3, 1), ResVar::Tn).unwrap()
    }

    fn unit(l: &Level, t: &str) -> PrincipalUnit {
        PrincipalUnit::new(parse_series(&l.sr, t).unwrap()).unwrap()
    }

    #[test]
    fn l_map_examples() {
        let l = level();
        assert!(l_map(&l.ops, &unit(&l, "1 + pi")).unwrap().is_zero());
        assert!(l_map(&l.ops, &unit(&l, "1")).unwrap().is_zero());
    }

    #[test]
    fn cyclotomic_unit_has_trivial_b() {
        let l = level();
        let k = kummer_coefficients(&l, &unit(&l, "1 + pi")).unwrap();
        assert!(k.f_series.is_zero());
        assert!(k.b_gamma2.is_zero());
    }

    #[test]
    fn coefficients_and_cocycle() {
        let l = level();
        let f = unit(&l, "1 + pi*T + 3*T^-1*pi^2");
        let k = kummer_coefficients(&l, &f).unwrap();
        assert!(cocycle_defect(&l, &k).unwrap().is_zero());
        let g = unit(&l, "1 + pi^2*T^-1");
        let fg = f.mul(&g).unwrap();
        let (a, b, c) = (iota_n(&l, &f).unwrap(), iota_n(&l, &g).unwrap(), iota_n(&l, &fg).unwrap());
        for i in 0..3 {
            let d = l.modn(&c.comps[i].sub(&a.comps[i]).unwrap().sub(&b.comps[i]).unwrap()).unwrap();
            assert!(d.is_zero(), "component {i}: {d}");
        }
    }

    #[test]
    fn b_lead_sign() {
        let l = level();
        let f = unit(&l, "1 + pi*T");
        let k = kummer_coefficients(&l, &f).unwrap();
        let x = &k.x;
        let rhs = l.modn(&l.ops.gamma2(x).unwrap().sub(x).unwrap()).unwrap();
        assert!(solve_with_lead(&l, &rhs, &k.b_lead, "b").is_ok());
        let flipped = k.b_lead.neg();
        assert!(matches!(solve_with_lead(&l, &rhs, &flipped, "b"), Err(Error::UniquenessCheckFailed(_))));
    }

    #[test]
    fn residue_variable_t() {
        let ring = CoeffRing::new(RingParams::new(3, 1, 6, 4)).unwrap();
        let sr = SeriesRing::new(ring, Window::defaults(3, 1, 6)).unwrap();
        let l = Level::new(&sr, &GaloisParams::defaults(3, 1), ResVar::T).unwrap();
        let f = unit(&l, "1 + pi*T^-1 + pi^2*T");
        let k = kummer_coefficients(&l, &f).unwrap();
        assert!(cocycle_defect(&l, &k).unwrap().is_zero());
    }
}
