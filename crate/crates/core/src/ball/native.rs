use rug::Float;

use super::{rad, Midpoint};

/// Below this magnitude FMA/TwoSum residuals may be inexact.
const UNDERFLOW_GUARD: f64 = 1e-290;
const TINY: f64 = 1e-300;

#[inline]
fn guard(r: f64, e: f64) -> f64 {
    let e = e.abs();
    if r.abs() < UNDERFLOW_GUARD {
        rad::add_up(e, TINY)
    } else {
        e
    }
}

impl Midpoint for f64 {
    const KIND: &'static str = "f64";

    fn bits(&self) -> u32 {
        53
    }

    fn effective_bits(_requested: u32) -> u32 {
        53
    }

    fn from_f64(x: f64, _bits: u32) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn mag_up(&self) -> f64 {
        self.abs()
    }

    fn mag_down(&self) -> f64 {
        self.abs()
    }

    #[inline]
    fn add_err(&self, rhs: &Self, _bits: u32) -> (Self, f64) {
        let (a, b) = (*self, *rhs);
        let s = a + b;
        // TwoSum: the rounding error is exactly representable
        let bb = s - a;
        let e = (a - (s - bb)) + (b - bb);
        (s, guard(s, e))
    }

    #[inline]
    fn sub_err(&self, rhs: &Self, bits: u32) -> (Self, f64) {
        self.add_err(&-*rhs, bits)
    }

    #[inline]
    fn mul_err(&self, rhs: &Self, _bits: u32) -> (Self, f64) {
        if *self == 0.0 || *rhs == 0.0 {
            return (0.0, 0.0);
        }
        let p = self * rhs;
        let e = self.mul_add(*rhs, -p);
        (p, guard(p, e))
    }

    #[inline]
    fn div_err(&self, rhs: &Self, _bits: u32) -> (Self, f64) {
        let q = self / rhs;
        // a - q b is exact, and |a/b - q| = |a - q b| / |b|
        let r = (-q).mul_add(*rhs, *self);
        (q, guard(q, rad::div_up(r.abs(), rhs.abs())))
    }

    fn mul_2si(&self, k: i32) -> Self {
        self * 2f64.powi(k)
    }

    fn to_big(&self) -> Float {
        Float::with_val(53, *self)
    }

    fn from_big(x: &Float, _bits: u32) -> (Self, f64) {
        let v = x.to_f64();
        (v, super::abs_diff_up(x, &Float::with_val(53, v)))
    }
}
