//! Declarative job configuration shared by the CLI and the test harness.

use serde::{Deserialize, Serialize};

use crate::coeff::{CoeffRing, RingParams};
use crate::error::{Error, Result};
use crate::galois::{GaloisParams, Ops, ResVar};
use crate::kummer::Level;
use crate::series::{SeriesRing, Sr, Window};
use crate::symbol::Convention;

/// Per-field overrides of [`Window::defaults`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowOverrides {
    pub t_lo: Option<i32>,
    pub t_hi: Option<i32>,
    pub y_lo: Option<i32>,
    pub y_hi: Option<i32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JobConfig {
    pub p: u64,
    pub f: usize,
    pub n: u32,
    /// Working p-adic precision.
    pub m: u32,
    /// Denominator budget.
    pub budget: u32,
    /// `N` in `gamma_2(T) = (1+pi)^N T`.
    #[serde(rename = "N")]
    pub big_n: i64,
    /// `chi(gamma_1)`; the smallest primitive root mod `p^2` when absent.
    pub chi_gamma1: Option<i64>,
    pub window: WindowOverrides,
    pub res_var: ResVar,
    pub convention: Convention,
    pub oracle: bool,
    pub seed: u64,
    /// Overrides the per-suite case counts.
    pub cases: Option<usize>,
}

impl Default for JobConfig {
    fn default() -> Self {
        JobConfig {
            p: 3,
            f: 1,
            n: 1,
            m: 5,
            budget: 4,
            big_n: 1,
            chi_gamma1: None,
            window: WindowOverrides::default(),
            res_var: ResVar::Tn,
            convention: Convention::Consistent,
            oracle: false,
            seed: 0,
            cases: None,
        }
    }
}

/// Everything a computation needs, built once from a [`JobConfig`].
#[derive(Debug, Clone)]
pub struct Context {
    pub sr: Sr,
    pub gp: GaloisParams,
    /// Ring for base-level checks; deeper in pi so that `phi` of poles stays inside.
    pub base_sr: Sr,
    /// Action in the base coordinates `(pi, T)`.
    pub base: Ops,
    pub level: Level,
}

impl JobConfig {
    pub fn from_toml(text: &str) -> Result<JobConfig> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn window(&self) -> Window {
        let d = Window::defaults(self.p, self.n, self.m);
        let o = &self.window;
        Window {
            t_lo: o.t_lo.unwrap_or(d.t_lo),
            t_hi: o.t_hi.unwrap_or(d.t_hi),
            y_lo: o.y_lo.unwrap_or(d.y_lo),
            y_hi: o.y_hi.unwrap_or(d.y_hi),
        }
    }

    /// The level window with its pi-floor lowered to hold `phi` of poles up to order 4
    /// at full guard precision.
    pub fn base_window(&self) -> Window {
        let w = self.window();
        let (p, cap) = (self.p as i32, (self.m + self.budget) as i32);
        Window { y_lo: w.y_lo.min(-(4 * p + (p - 1) * (cap + 2))), ..w }
    }

    pub fn galois(&self) -> GaloisParams {
        let mut gp = GaloisParams::defaults(self.p, self.n);
        if let Some(c) = self.chi_gamma1 {
            gp.chi_gamma1 = c;
        }
        gp.eta_n = self.big_n;
        gp
    }

    pub fn context(&self) -> Result<Context> {
        let ring = CoeffRing::new(RingParams::new(self.p, self.f, self.m, self.budget))?;
        let sr = SeriesRing::new(ring.clone(), self.window())?;
        let base_sr = SeriesRing::new(ring, self.base_window())?;
        let gp = self.galois();
        let level = Level::new(&sr, &gp, self.res_var)?;
        Ok(Context { base: Ops::base(&base_sr, &gp), base_sr, sr, gp, level })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_defaults() {
        let c = JobConfig::from_toml("p = 5\nN = 2\nres_var = \"T\"\n[window]\ny_lo = -30\n").unwrap();
        assert_eq!((c.p, c.big_n, c.m, c.res_var), (5, 2, 5, ResVar::T));
        assert_eq!(c.window().y_lo, -30);
        assert!(JobConfig::from_toml("q = 1").is_err());
        assert!(JobConfig::default().context().is_ok());
        let bad = JobConfig { p: 4, ..JobConfig::default() };
        assert!(bad.context().is_err());
    }
}
