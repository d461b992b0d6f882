use rug::float::Round;
use rug::Float;

use super::{Ball, Midpoint, Precision};
use crate::error::{Error, Result};

/// Elementary functions with certified enclosures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElemFn {
    Sqrt,
    Exp,
    Ln,
    Sin,
    Cos,
    PowInt(i32),
    Gamma,
}

// Location and value of the minimum of Gamma on (0, inf), rounded safely.
const GAMMA_ARGMIN_BELOW: f64 = 1.4616;
const GAMMA_ARGMIN_ABOVE: f64 = 1.4617;
const GAMMA_MIN_LOWER: f64 = 0.885603194;

pub fn ball_elem<M: Midpoint>(f: ElemFn, a: &Ball<M>, p: Precision) -> Result<Ball<M>> {
    let bits = p.bits();
    match f {
        ElemFn::Sqrt => a.sqrt_at(bits),
        ElemFn::Exp => Ok(a.exp_at(bits)),
        ElemFn::Ln => a.ln_at(bits),
        ElemFn::Sin => Ok(a.sin_at(bits)),
        ElemFn::Cos => Ok(a.cos_at(bits)),
        ElemFn::PowInt(k) => a.pow_int_at(k, bits),
        ElemFn::Gamma => a.gamma_at(bits),
    }
}

fn domain(function: &'static str, detail: String) -> Error {
    Error::DomainViolation { function, detail }
}

impl<M: Midpoint> Ball<M> {
    fn work_prec(bits: u32) -> u32 {
        M::effective_bits(bits) + 16
    }

    /// Applies a nondecreasing function given its directed-rounded evaluator.
    fn monotone<F>(&self, bits: u32, f: F) -> Ball<M>
    where
        F: Fn(&Float, u32, Round) -> Float,
    {
        let w = Self::work_prec(bits);
        let (lo, hi) = self.endpoints_big(w);
        let lo = f(&lo, w, Round::Down);
        let hi = f(&hi, w, Round::Up);
        Ball::from_endpoints(&lo, &hi, bits)
    }

    pub fn sqrt_at(&self, bits: u32) -> Result<Ball<M>> {
        let (lo, _) = self.endpoints_big(64);
        if lo.is_sign_negative() && !lo.is_zero() {
            return Err(domain("sqrt", format!("interval reaches {}", lo.to_f64())));
        }
        Ok(self.monotone(bits, |x, w, r| {
            if x.is_sign_negative() {
                Float::new(w)
            } else {
                Float::with_val_round(w, x.sqrt_ref(), r).0
            }
        }))
    }

    pub fn exp_at(&self, bits: u32) -> Ball<M> {
        self.monotone(bits, |x, w, r| Float::with_val_round(w, x.exp_ref(), r).0)
    }

    pub fn ln_at(&self, bits: u32) -> Result<Ball<M>> {
        let (lo, _) = self.endpoints_big(64);
        if lo <= 0 {
            return Err(domain("ln", format!("interval reaches {}", lo.to_f64())));
        }
        Ok(self.monotone(bits, |x, w, r| Float::with_val_round(w, x.ln_ref(), r).0))
    }

    /// `g` is sin or cos; both are 1-Lipschitz and bounded by 1.
    fn trig(&self, bits: u32, cos: bool) -> Ball<M> {
        let w = Self::work_prec(bits);
        let m = self.mid().to_big();
        let (down, up) = if cos {
            (
                Float::with_val_round(w, m.cos_ref(), Round::Down).0,
                Float::with_val_round(w, m.cos_ref(), Round::Up).0,
            )
        } else {
            (
                Float::with_val_round(w, m.sin_ref(), Round::Down).0,
                Float::with_val_round(w, m.sin_ref(), Round::Up).0,
            )
        };
        let r = Float::with_val(53, self.rad());
        let lo = Float::with_val_round(w, &down - &r, Round::Down).0.max(&Float::with_val(w, -1));
        let hi = Float::with_val_round(w, &up + &r, Round::Up).0.min(&Float::with_val(w, 1));
        Ball::from_endpoints(&lo, &hi, bits)
    }

    pub fn sin_at(&self, bits: u32) -> Ball<M> {
        self.trig(bits, false)
    }

    pub fn cos_at(&self, bits: u32) -> Ball<M> {
        self.trig(bits, true)
    }

    pub fn pow_int_at(&self, k: i32, bits: u32) -> Result<Ball<M>> {
        let mut e = k.unsigned_abs();
        let mut base = self.clone();
        let mut acc = Ball::one_at(bits);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_at(&base, bits);
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        if k.unsigned_abs().is_multiple_of(2) && k != 0 && self.contains_zero() {
            // even powers are nonnegative
            let w = Self::work_prec(bits);
            let (lo, hi) = acc.endpoints_big(w);
            if lo < 0 {
                acc = Ball::from_endpoints(&Float::new(w), &hi, bits);
            }
        }
        if k < 0 {
            Ball::one_at(bits).div_at(&acc, bits)
        } else {
            Ok(acc)
        }
    }

    pub fn gamma_at(&self, bits: u32) -> Result<Ball<M>> {
        let w = Self::work_prec(bits);
        let (lo, hi) = self.endpoints_big(w);
        if lo > 0 {
            let g = |x: &Float, r: Round| Float::with_val_round(w, x.gamma_ref(), r).0;
            if hi <= GAMMA_ARGMIN_BELOW {
                return Ok(Ball::from_endpoints(&g(&hi, Round::Down), &g(&lo, Round::Up), bits));
            }
            if lo >= GAMMA_ARGMIN_ABOVE {
                return Ok(Ball::from_endpoints(&g(&lo, Round::Down), &g(&hi, Round::Up), bits));
            }
            let top = g(&lo, Round::Up).max(&g(&hi, Round::Up));
            return Ok(Ball::from_endpoints(&Float::with_val(w, GAMMA_MIN_LOWER), &top, bits));
        }
        if hi >= 0 {
            return Err(domain("gamma", "interval touches the pole at 0".into()));
        }
        // reflection: Gamma(x) = pi / (sin(pi x) Gamma(1 - x))
        let pi = Ball::<M>::pi(bits + 8);
        let s = pi.mul_at(self, bits + 8).sin_at(bits + 8);
        if s.contains_zero() {
            return Err(domain("gamma", "interval contains a nonpositive integer".into()));
        }
        let one_minus = Ball::one_at(bits + 8).sub_at(self, bits + 8);
        let g = one_minus.gamma_at(bits + 8)?;
        Ok(pi.div_at(&s.mul_at(&g, bits + 8), bits + 8)?.round_to(bits))
    }

    pub fn sqrt(&self) -> Result<Ball<M>> {
        self.sqrt_at(self.bits())
    }

    pub fn exp(&self) -> Ball<M> {
        self.exp_at(self.bits())
    }

    pub fn ln(&self) -> Result<Ball<M>> {
        self.ln_at(self.bits())
    }

    pub fn sin(&self) -> Ball<M> {
        self.sin_at(self.bits())
    }

    pub fn cos(&self) -> Ball<M> {
        self.cos_at(self.bits())
    }

    pub fn pow_int(&self, k: i32) -> Result<Ball<M>> {
        self.pow_int_at(k, self.bits())
    }

    pub fn gamma(&self) -> Result<Ball<M>> {
        self.gamma_at(self.bits())
    }
}
