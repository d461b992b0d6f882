use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg};

use num_traits::{One, Zero};
use rug::float::Round;
use rug::Float;

use super::{rad, Midpoint};

/// MPFR midpoint whose precision is chosen at run time.
#[derive(Debug, Clone, PartialEq, PartialOrd)]
pub struct BigFloat(Float);

impl BigFloat {
    pub fn new(x: Float) -> Self {
        BigFloat(x)
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }
}

/// Half an ulp of `r` at `bits`, or zero when the operation was exact.
#[inline]
fn rounding_err(r: &Float, bits: u32, ord: Ordering) -> f64 {
    if ord == Ordering::Equal {
        return 0.0;
    }
    match r.get_exp() {
        Some(e) => rad::pow2(e - bits as i32 - 1),
        None => 0.0,
    }
}

impl Zero for BigFloat {
    fn zero() -> Self {
        BigFloat(Float::new(53))
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for BigFloat {
    fn one() -> Self {
        BigFloat(Float::with_val(53, 1))
    }
}

impl Add for BigFloat {
    type Output = BigFloat;

    fn add(self, rhs: BigFloat) -> BigFloat {
        let p = self.0.prec().max(rhs.0.prec());
        BigFloat(Float::with_val(p, &self.0 + &rhs.0))
    }
}

impl Mul for BigFloat {
    type Output = BigFloat;

    fn mul(self, rhs: BigFloat) -> BigFloat {
        let p = self.0.prec().max(rhs.0.prec());
        BigFloat(Float::with_val(p, &self.0 * &rhs.0))
    }
}

impl Neg for BigFloat {
    type Output = BigFloat;

    fn neg(self) -> BigFloat {
        BigFloat(-self.0)
    }
}

impl Midpoint for BigFloat {
    const KIND: &'static str = "mpfr";

    fn bits(&self) -> u32 {
        self.0.prec()
    }

    fn effective_bits(requested: u32) -> u32 {
        requested
    }

    fn from_f64(x: f64, bits: u32) -> Self {
        BigFloat(Float::with_val(bits.max(53), x))
    }

    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    fn mag_up(&self) -> f64 {
        self.0.as_abs().to_f64_round(Round::Up)
    }

    fn mag_down(&self) -> f64 {
        self.0.as_abs().to_f64_round(Round::Down)
    }

    #[inline]
    fn add_err(&self, rhs: &Self, bits: u32) -> (Self, f64) {
        let (r, ord) = Float::with_val_round(bits, &self.0 + &rhs.0, Round::Nearest);
        let e = rounding_err(&r, bits, ord);
        (BigFloat(r), e)
    }

    #[inline]
    fn sub_err(&self, rhs: &Self, bits: u32) -> (Self, f64) {
        let (r, ord) = Float::with_val_round(bits, &self.0 - &rhs.0, Round::Nearest);
        let e = rounding_err(&r, bits, ord);
        (BigFloat(r), e)
    }

    #[inline]
    fn mul_err(&self, rhs: &Self, bits: u32) -> (Self, f64) {
        let (r, ord) = Float::with_val_round(bits, &self.0 * &rhs.0, Round::Nearest);
        let e = rounding_err(&r, bits, ord);
        (BigFloat(r), e)
    }

    #[inline]
    fn div_err(&self, rhs: &Self, bits: u32) -> (Self, f64) {
        let (r, ord) = Float::with_val_round(bits, &self.0 / &rhs.0, Round::Nearest);
        let e = rounding_err(&r, bits, ord);
        (BigFloat(r), e)
    }

    fn mul_2si(&self, k: i32) -> Self {
        let mut r = self.0.clone();
        if k >= 0 {
            r <<= k as u32;
        } else {
            r >>= (-k) as u32;
        }
        BigFloat(r)
    }

    fn to_big(&self) -> Float {
        self.0.clone()
    }

    fn from_big(x: &Float, bits: u32) -> (Self, f64) {
        let bits = bits.max(53);
        let (r, ord) = Float::with_val_round(bits, x, Round::Nearest);
        let e = rounding_err(&r, bits, ord);
        (BigFloat(r), e)
    }
}
