//! Canonical keys, scheme parameters and the batch integral engine.

mod cache;
mod compute;

pub use cache::{IntegralStore, CACHE_MAGIC};
pub use compute::{batch_compute, BatchOutcome, Engine, IntegralRecord};

use std::fmt;

use rug::Rational;
use sha2::{Digest, Sha256};

use crate::ball::{Ball, BigFloat, Precision};
use crate::error::{Error, Result};
use crate::quadrature::{bound_0s, bound_st, bound_st_formula, s_admissible, s_threshold, PanelLayout};
use crate::tail::{tail_error, tail_error_unchecked};

/// Sorted absolute orders of a 6-tuple, with the sign picked up by
/// reflecting negative odd orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeKey {
    pub orders: [u32; 6],
    pub sign: i8,
}

impl ModeKey {
    pub fn unsigned(orders: [u32; 6]) -> Self {
        ModeKey { orders, sign: 1 }
    }

    pub fn max_order(&self) -> u32 {
        self.orders[5]
    }
}

impl fmt::Display for ModeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = self.orders;
        let s = if self.sign < 0 { "-" } else { "+" };
        write!(f, "{s}({} {} {} {} {} {})", o[0], o[1], o[2], o[3], o[4], o[5])
    }
}

/// `I_k = sign * I_orders` via `J_{-n} = (-1)^n J_n` and symmetry of the
/// product.
pub fn canonical_key(k: &[i64; 6]) -> Result<ModeKey> {
    if k.iter().sum::<i64>().rem_euclid(2) != 0 {
        return Err(Error::OddSumKey(*k));
    }
    let mut flips = 0u64;
    let mut orders = [0u32; 6];
    for (o, &x) in orders.iter_mut().zip(k) {
        if x < 0 {
            flips += x.unsigned_abs();
        }
        *o = x.unsigned_abs() as u32;
    }
    orders.sort_unstable();
    Ok(ModeKey {
        orders,
        sign: if flips.is_multiple_of(2) { 1 } else { -1 },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// All validity hypotheses hold; bounds are rigorous.
    Certified,
    /// Small band limits; bounds are reported but not valid.
    Exploratory,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Certified => "certify",
            Mode::Exploratory => "explore",
        })
    }
}

/// Quadrature and asymptotics configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeParams {
    pub n: u32,
    pub s: Rational,
    pub t: Rational,
    pub d0: Rational,
    pub d1: Rational,
    pub points: usize,
    pub prec: Precision,
    pub mode: Mode,
}

/// Values replacing the derived defaults.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub s: Option<Rational>,
    pub t: Option<Rational>,
    pub d0: Option<Rational>,
    pub d1: Option<Rational>,
    pub points: Option<usize>,
    pub prec: Option<Precision>,
}

/// `[S, T]` panel counts are rounded up to a multiple of this.
const PANEL_ROUNDING: u64 = 100;

fn ceil_multiple(x: &Rational, step: &Rational) -> Rational {
    let q = Rational::from(x / step);
    let (_, ceil) = q.fract_ceil(rug::Integer::new());
    Rational::from(ceil * step)
}

/// Derives `S` and `T` for band limit `n` and checks all constraints.
pub fn scheme_params(n: u32, mode: Mode, ov: &Overrides) -> Result<SchemeParams> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidBandLimit {
            n,
            reason: "the band limit must be even and at least 2".into(),
        });
    }
    if mode == Mode::Certified && n < 20 {
        return Err(Error::InvalidBandLimit {
            n,
            reason: "certified mode needs N >= 20".into(),
        });
    }
    let d0 = ov.d0.clone().unwrap_or_else(|| Rational::from((1, 4)));
    let d1 = ov.d1.clone().unwrap_or_else(|| Rational::from((4, 5)));
    if d0 <= 0 || d1 <= 0 {
        return Err(Error::InvalidParams("panel half-widths must be positive".into()));
    }
    let s = match &ov.s {
        Some(s) => s.clone(),
        None => {
            let step = Rational::from(2 * &d0);
            let mut s = ceil_multiple(&Rational::from_f64(s_threshold(n)).expect("finite"), &step);
            while !s_admissible(&s, n) {
                s += &step;
            }
            s
        }
    };
    let t_min = Rational::from(10 * n * n);
    let t = match &ov.t {
        Some(t) => t.clone(),
        None => {
            let step = Rational::from(2 * &d1);
            let span = Rational::from(&t_min - &s).max(step.clone());
            let panels = Rational::from(&span / &step);
            let (_, k) = panels.fract_ceil(rug::Integer::new());
            let k = (k + (PANEL_ROUNDING - 1)) / PANEL_ROUNDING * PANEL_ROUNDING;
            &s + Rational::from(k * &step)
        }
    };
    let p = SchemeParams {
        n,
        s,
        t,
        d0,
        d1,
        points: ov.points.unwrap_or(12),
        prec: ov.prec.unwrap_or_default(),
        mode,
    };
    p.validate()?;
    Ok(p)
}

impl SchemeParams {
    pub fn validate(&self) -> Result<()> {
        self.layout_0s()?;
        self.layout_st()?;
        if self.points == 0 || self.points > crate::quadrature::MAX_RULE_POINTS {
            return Err(Error::InvalidParams(format!("unsupported rule size {}", self.points)));
        }
        if self.mode == Mode::Certified {
            if !s_admissible(&self.s, self.n) {
                return Err(Error::ValidityViolation(format!(
                    "S = {} is below 0.95 N^(3/2) ln N + 1 = {:.3}",
                    self.s.to_f64(),
                    s_threshold(self.n)
                )));
            }
            if self.t < 10 * self.n * self.n {
                return Err(Error::ValidityViolation(format!(
                    "T = {} is below 10 N^2 = {}",
                    self.t.to_f64(),
                    10 * self.n * self.n
                )));
            }
        }
        Ok(())
    }

    pub fn layout_0s(&self) -> Result<PanelLayout> {
        PanelLayout::new(Rational::new(), self.s.clone(), self.d0.clone())
    }

    pub fn layout_st(&self) -> Result<PanelLayout> {
        PanelLayout::new(self.s.clone(), self.t.clone(), self.d1.clone())
    }

    /// Stable textual form; the cache hash is taken over it.
    pub fn canonical_string(&self) -> String {
        format!(
            "N={};S={};T={};d0={};d1={};n={};prec={}",
            self.n,
            self.s,
            self.t,
            self.d0,
            self.d1,
            self.points,
            self.prec.bits(),
        )
    }

    /// First 16 hex digits of SHA-256 of [`Self::canonical_string`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_string().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Quadrature nodes on `[0, S]` and `[S, T]`.
    pub fn node_counts(&self) -> Result<(u64, u64)> {
        Ok((
            self.layout_0s()?.evaluation_count(self.points),
            self.layout_st()?.evaluation_count(self.points),
        ))
    }

    /// Human-readable summary.
    pub fn report(&self) -> String {
        let (n0, n1) = self.node_counts().unwrap_or((0, 0));
        format!(
            "N {}\nmode {}\nS {} ({:.4})\nT {} ({:.4})\nd0 {}\nd1 {}\npoints {}\nprecision {}\nnodes_0S {}\nnodes_ST {}\nS_min {:.6}\nT_min {}\nhash {}\n",
            self.n,
            self.mode,
            self.s,
            self.s.to_f64(),
            self.t,
            self.t.to_f64(),
            self.d0,
            self.d1,
            self.points,
            self.prec.bits(),
            n0,
            n1,
            s_threshold(self.n),
            10 * self.n * self.n,
            self.hash()
        )
    }
}

/// The three parts of the analytic error budget.
#[derive(Debug, Clone)]
pub struct ErrorBudget {
    pub bound_0s: Ball<BigFloat>,
    pub bound_st: Ball<BigFloat>,
    pub tail: Ball<BigFloat>,
    pub total: Ball<BigFloat>,
    /// `false` when some validity hypothesis fails (exploratory runs).
    pub valid: bool,
}

fn upper(b: &Ball<BigFloat>) -> Ball<BigFloat> {
    let (_, hi) = b.endpoints_big(136);
    Ball::from_endpoints(&hi, &hi, 128)
}

/// `bound_0S + bound_ST + tail_error`, rounded up.
pub fn scheme_error(p: &SchemeParams) -> Result<Ball<BigFloat>> {
    if p.mode != Mode::Certified {
        return Err(Error::ValidityViolation("scheme error is only certified for N >= 20".into()));
    }
    Ok(error_budget(p)?.total)
}

/// Evaluates the budget formulas; in exploratory mode they are evaluated
/// regardless of their hypotheses and flagged invalid.
pub fn error_budget(p: &SchemeParams) -> Result<ErrorBudget> {
    let n = p.points as u32;
    let b0 = bound_0s(&p.s, &p.d0, n)?;
    let strict = bound_st(&p.s, &p.t, &p.d1, n, p.n).and_then(|b| Ok((b, tail_error(p.n, &p.t)?)));
    let (b1, tail, valid) = match strict {
        Ok((b1, tail)) => (b1, tail, true),
        Err(e) if p.mode == Mode::Certified => return Err(e),
        Err(_) => {
            let b1 = bound_st_formula(&p.s, &p.d1, n)?;
            (b1, tail_error_unchecked(p.n, &p.t), false)
        }
    };
    let total = upper(&b0.add_at(&b1, 128).add_at(&tail, 128));
    Ok(ErrorBudget {
        bound_0s: b0,
        bound_st: b1,
        tail,
        total,
        valid,
    })
}

#[cfg(test)]
mod tests;
