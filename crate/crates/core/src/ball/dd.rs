//! Double-word ("double-double") midpoints carrying 106 bits.
//!
//! Error constants are rounded-up versions of the relative bounds for the
//! accurate double-word algorithms (sum: 3u², product: 4u², quotient: 15u²,
//! with u = 2^-53), applied to the computed result.

use std::ops::{Add, Mul, Neg};

use num_traits::{One, Zero};
use rug::Float;

use super::{abs_diff_up, rad, Midpoint};

const U2: f64 = 1.0 / (1u128 << 106) as f64;
const ADD_ERR: f64 = 8.0 * U2;
const MUL_ERR: f64 = 8.0 * U2;
const DIV_ERR: f64 = 32.0 * U2;
const UNDERFLOW_GUARD: f64 = 1e-280;
const TINY: f64 = 1e-290;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };

    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    fn add_dd(self, y: DoubleDouble) -> DoubleDouble {
        let (sh, sl) = two_sum(self.hi, y.hi);
        let (th, tl) = two_sum(self.lo, y.lo);
        let c = sl + th;
        let (vh, vl) = fast_two_sum(sh, c);
        let w = tl + vl;
        let (hi, lo) = fast_two_sum(vh, w);
        DoubleDouble { hi, lo }
    }

    #[inline]
    fn mul_dd(self, y: DoubleDouble) -> DoubleDouble {
        let (ch, cl1) = two_prod(self.hi, y.hi);
        let tl0 = self.lo * y.lo;
        let tl1 = self.hi.mul_add(y.lo, tl0);
        let cl2 = self.lo.mul_add(y.hi, tl1);
        let cl3 = cl1 + cl2;
        let (hi, lo) = fast_two_sum(ch, cl3);
        DoubleDouble { hi, lo }
    }

    #[inline]
    fn mul_f64(self, y: f64) -> DoubleDouble {
        let (ch, cl1) = two_prod(self.hi, y);
        let cl3 = self.lo.mul_add(y, cl1);
        let (hi, lo) = fast_two_sum(ch, cl3);
        DoubleDouble { hi, lo }
    }

    #[inline]
    fn div_dd(self, y: DoubleDouble) -> DoubleDouble {
        let th = self.hi / y.hi;
        let r = y.mul_f64(th);
        let pi_h = self.hi - r.hi;
        let delta_l = self.lo - r.lo;
        let delta = pi_h + delta_l;
        let tl = delta / y.hi;
        let (hi, lo) = fast_two_sum(th, tl);
        DoubleDouble { hi, lo }
    }

    #[inline]
    fn err(self, rel: f64) -> f64 {
        let m = self.hi.abs();
        let e = rad::mul_up(m.next_up(), rel);
        if m < UNDERFLOW_GUARD {
            rad::add_up(e, TINY)
        } else {
            e
        }
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        DoubleDouble::ZERO
    }

    fn is_zero(&self) -> bool {
        self.hi == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        DoubleDouble { hi: 1.0, lo: 0.0 }
    }
}

impl Add for DoubleDouble {
    type Output = DoubleDouble;

    fn add(self, rhs: DoubleDouble) -> DoubleDouble {
        self.add_dd(rhs)
    }
}

impl Mul for DoubleDouble {
    type Output = DoubleDouble;

    fn mul(self, rhs: DoubleDouble) -> DoubleDouble {
        self.mul_dd(rhs)
    }
}

impl Neg for DoubleDouble {
    type Output = DoubleDouble;

    fn neg(self) -> DoubleDouble {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Midpoint for DoubleDouble {
    const KIND: &'static str = "dd";

    fn bits(&self) -> u32 {
        106
    }

    fn effective_bits(_requested: u32) -> u32 {
        106
    }

    fn from_f64(x: f64, _bits: u32) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    fn to_f64(&self) -> f64 {
        self.hi + self.lo
    }

    fn mag_up(&self) -> f64 {
        rad::add_up(self.hi.abs(), self.lo.abs())
    }

    fn mag_down(&self) -> f64 {
        rad::sub_down(self.hi.abs(), self.lo.abs())
    }

    #[inline]
    fn add_err(&self, rhs: &Self, _bits: u32) -> (Self, f64) {
        let z = self.add_dd(*rhs);
        (z, z.err(ADD_ERR))
    }

    #[inline]
    fn sub_err(&self, rhs: &Self, _bits: u32) -> (Self, f64) {
        let z = self.add_dd(-*rhs);
        (z, z.err(ADD_ERR))
    }

    #[inline]
    fn mul_err(&self, rhs: &Self, _bits: u32) -> (Self, f64) {
        if self.is_zero() || rhs.is_zero() {
            return (DoubleDouble::ZERO, 0.0);
        }
        let z = self.mul_dd(*rhs);
        (z, z.err(MUL_ERR))
    }

    #[inline]
    fn div_err(&self, rhs: &Self, _bits: u32) -> (Self, f64) {
        let z = self.div_dd(*rhs);
        (z, z.err(DIV_ERR))
    }

    fn mul_2si(&self, k: i32) -> Self {
        let s = 2f64.powi(k);
        DoubleDouble {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    fn to_big(&self) -> Float {
        if self.lo == 0.0 {
            return Float::with_val(53, self.hi);
        }
        let eh = exponent(self.hi);
        let el = exponent(self.lo);
        let prec = ((eh - el).max(0) as u32 + 54).min(2200);
        let mut f = Float::with_val(prec, self.hi);
        f += self.lo;
        f
    }

    fn from_big(x: &Float, _bits: u32) -> (Self, f64) {
        let hi = x.to_f64();
        if !hi.is_finite() {
            return (DoubleDouble { hi, lo: 0.0 }, f64::INFINITY);
        }
        let rest = Float::with_val(x.prec().max(53) + 64, x - hi);
        let lo = rest.to_f64();
        let z = DoubleDouble::new(hi, lo);
        let e = abs_diff_up(x, &z.to_big());
        (z, e)
    }
}

fn exponent(x: f64) -> i32 {
    if x == 0.0 {
        return -1100;
    }
    ((x.to_bits() >> 52) & 0x7ff) as i32 - 1023
}
