//! The closed-form higher Hilbert pairing exponent `Tr Res(Phi) mod p^n` for three lifts.
//!
//! Only the two-dimensional case of the alternating formula is implemented. With
//! `f_i = (1 - phi/p) log F_i`, `A = p^-2 f1 dlogF2^phi ^ dlogF3^phi`,
//! `B = p^-1 f2 dlogF1 ^ dlogF3^phi` and `C = f3 dlogF1 ^ dlogF2`, all read at level n,
//! the form is `Phi = -(1/pi) (s_A A + s_B B + C)` with signs fixed by a [`Convention`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{dlog, tr_res, wedge, Form2, ResidueClass};
use crate::kummer::{l_map, Level, PrincipalUnit};
use crate::series::Series;

/// Sign pattern of `Phi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// Agrees with the cohomological pairing: `-(1/pi)(-A + B + C)`.
    #[default]
    Consistent,
    /// The statement of the theorem: `-(1/pi)(A - B + C)`.
    Stated,
    /// The last line of its proof, with `dlogF2 ^ dlogF1`: `-(1/pi)(A - B - C)`.
    ProofFinal,
}

impl Convention {
    fn signs(self) -> (i64, i64, i64) {
        match self {
            Convention::Consistent => (-1, 1, 1),
            Convention::Stated => (1, -1, 1),
            Convention::ProofFinal => (1, -1, -1),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SymbolInput {
    pub f1: PrincipalUnit,
    pub f2: PrincipalUnit,
    pub f3: PrincipalUnit,
    pub convention: Convention,
}

impl SymbolInput {
    pub fn new(f1: PrincipalUnit, f2: PrincipalUnit, f3: PrincipalUnit) -> SymbolInput {
        SymbolInput { f1, f2, f3, convention: Convention::default() }
    }
}

/// Bookkeeping for one evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct Audit {
    /// Largest power of `p` in a denominator of `Phi` before the trace.
    pub phi_denominator: u32,
    pub phi_terms: usize,
    /// Absolute precision of `Phi`'s coefficients.
    pub phi_precision: i32,
    /// Reliable pi-window of `Phi`.
    pub phi_window: Option<i32>,
    /// The residue before reduction.
    pub residue: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymbolResult {
    pub exponent: u64,
    pub modulus: u64,
    pub audit: Audit,
}

/// `zeta_{p^n}^e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RootOfUnity {
    pub exponent: u64,
    pub order: u64,
}

impl RootOfUnity {
    pub fn new(exponent: i64, order: u64) -> RootOfUnity {
        RootOfUnity { exponent: exponent.rem_euclid(order as i64) as u64, order }
    }
    pub fn mul(&self, o: &RootOfUnity) -> Result<RootOfUnity> {
        if self.order != o.order {
            return Err(Error::ParamMismatch("roots of unity of different orders".into()));
        }
        Ok(RootOfUnity::new((self.exponent + o.exponent) as i64, self.order))
    }
    pub fn is_one(&self) -> bool {
        self.exponent == 0
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "1")
        } else {
            write!(f, "zeta_{}^{}", self.order, self.exponent)
        }
    }
}

/// `Phi` as a 2-form in the level-n coordinates.
pub fn phi_form(level: &Level, inp: &SymbolInput) -> Result<Form2> {
    let ops = &level.ops;
    let (u1, u2, u3) = (inp.f1.series(), inp.f2.series(), inp.f3.series());
    let f1 = l_map(ops, &inp.f1)?;
    let f2 = l_map(ops, &inp.f2)?;
    let f3 = l_map(ops, &inp.f3)?;
    let d1 = dlog(u1)?;
    let d2 = dlog(u2)?;
    let d2phi = dlog(&ops.phi(u2)?)?;
    let d3phi = dlog(&ops.phi(u3)?)?;
    let (sa, sb, sc) = inp.convention.signs();
    let a = wedge(&d2phi, &d3phi)?.lambda.mul(&f1)?.div_p(2)?;
    let b = wedge(&d1, &d3phi)?.lambda.mul(&f2)?.div_p(1)?;
    let c = wedge(&d1, &d2)?.lambda.mul(&f3)?;
    let inner = a.scale_int(sa)?.add(&b.scale_int(sb)?)?.add(&c.scale_int(sc)?)?;
    // 1/pi is only needed to the precision that survives the p^-2
    let inv = level.pi0.with_prec(level.n as i32 + 2)?.invert()?;
    Ok(Form2::new(inner.mul(&inv)?.neg()))
}

fn audit_of(w: &Form2, residue: String) -> Audit {
    Audit {
        phi_denominator: w.lambda.denom_exp(),
        phi_terms: w.lambda.num_terms(),
        phi_precision: w.lambda.prec(),
        phi_window: w.lambda.y_hi(),
        residue,
    }
}

/// `Tr Res(Phi) mod p^n`, with integrality checked before the reduction.
pub fn symbol_exponent(level: &Level, inp: &SymbolInput) -> Result<SymbolResult> {
    let w = phi_form(level, inp)?;
    let ring = level.sr.coeffs();
    let raw = tr_res(&w, None)?;
    let shown = match &raw {
        ResidueClass::Exact(c) => ring.display(c),
        ResidueClass::Mod { value, .. } => value.to_string(),
    };
    let exponent = match tr_res(&w, Some(level.n))? {
        ResidueClass::Mod { value, .. } => value,
        ResidueClass::Exact(_) => unreachable!("reduction requested"),
    };
    Ok(SymbolResult { exponent, modulus: ring.pow_p(level.n), audit: audit_of(&w, shown) })
}

/// `V_n(alpha_1, alpha_2, alpha_3)` as a power of `zeta_{p^n}`.
pub fn v_n(level: &Level, inp: &SymbolInput) -> Result<RootOfUnity> {
    let r = symbol_exponent(level, inp)?;
    Ok(RootOfUnity::new(r.exponent as i64, r.modulus))
}

/// Lifts that do not involve the residue variable.
pub fn is_pi_only(s: &Series) -> bool {
    s.terms().iter().all(|t| t.0 == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{CoeffRing, RingParams};
    use crate::galois::{GaloisParams, ResVar};
    use crate::series::{parse_series, SeriesRing, Window};

    fn level() -> Level {
        let ring = CoeffRing::new(RingParams::new(3, 1, 5, 4)).unwrap();
        let sr = SeriesRing::new(ring, Window::defaults(3, 1, 5)).unwrap();
        Level::new(&sr, &GaloisParams::defaults(3, 1), ResVar::Tn).unwrap()
    }

    fn unit(l: &Level, t: &str) -> PrincipalUnit {
        PrincipalUnit::new(parse_series(&l.sr, t).unwrap()).unwrap()
    }

    fn input(l: &Level, a: &str, b: &str, c: &str) -> SymbolInput {
        SymbolInput::new(unit(l, a), unit(l, b), unit(l, c))
    }

    #[test]
    fn pi_only_vanishes() {
        let l = level();
        let inp = input(&l, "1 + pi", "1 + 3*pi^2", "1 + pi^4");
        assert!(phi_form(&l, &inp).unwrap().lambda.is_zero());
        assert_eq!(symbol_exponent(&l, &inp).unwrap().exponent, 0);
    }

    #[test]
    fn presentation() {
        let z = RootOfUnity::new(5, 3);
        assert_eq!(z, RootOfUnity::new(2, 3));
        assert_eq!(RootOfUnity::new(0, 3).to_string(), "1");
        assert_eq!(z.to_string(), "zeta_3^2");
    }

    #[test]
    fn residue_is_integral() {
        let l = level();
        let inp = input(&l, "1 + pi*T", "1 + pi^2*T^-1", "1 + pi + pi*T^2");
        let r = symbol_exponent(&l, &inp).unwrap();
        assert!(r.exponent < 3);
    }
}
