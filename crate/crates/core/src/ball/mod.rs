//! Midpoint-radius enclosure arithmetic.
//!
//! A [`Ball`] stores a midpoint of some [`Midpoint`] type together with an
//! `f64` radius that is always rounded upward. Every operation returns a ball
//! whose interval contains the exact result for all points of the operand
//! intervals. The midpoint type fixes how many bits are carried: `f64` (53),
//! [`DoubleDouble`] (106), or the MPFR-backed [`BigFloat`] (any precision).

mod dd;
mod elem;
mod mp;
mod native;
pub(crate) mod rad;

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Zero};
use rug::float::Round;
use rug::{Float, Rational};

use crate::error::{Error, Result};

pub use dd::DoubleDouble;
pub use elem::{ball_elem, ElemFn};
pub use mp::BigFloat;

/// Working precision in binary digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Precision(u32);

impl Precision {
    pub const DEFAULT: Precision = Precision(128);
    pub const DOUBLE: Precision = Precision(53);

    pub fn new(bits: u32) -> Result<Self> {
        if bits < 53 {
            return Err(Error::InvalidPrecision(bits));
        }
        Ok(Precision(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::DEFAULT
    }
}

/// Scalar type usable as a ball midpoint.
///
/// The `*_err` operations return the rounded result together with an upper
/// bound on its distance to the exact result.
pub trait Midpoint:
    Clone + fmt::Debug + PartialOrd + Send + Sync + Zero + One + Neg<Output = Self> + 'static
{
    /// Short tag identifying the backend in cache headers.
    const KIND: &'static str;

    /// Bits carried by this value.
    fn bits(&self) -> u32;

    /// Bits this backend will actually carry when asked for `requested`.
    fn effective_bits(requested: u32) -> u32;

    fn from_f64(x: f64, bits: u32) -> Self;
    fn to_f64(&self) -> f64;
    /// Upper bound on `|self|`.
    fn mag_up(&self) -> f64;
    /// Lower bound on `|self|`.
    fn mag_down(&self) -> f64;

    fn add_err(&self, rhs: &Self, bits: u32) -> (Self, f64);
    fn sub_err(&self, rhs: &Self, bits: u32) -> (Self, f64);
    fn mul_err(&self, rhs: &Self, bits: u32) -> (Self, f64);
    /// Caller guarantees `rhs != 0`.
    fn div_err(&self, rhs: &Self, bits: u32) -> (Self, f64);

    /// Exact multiplication by `2^k`.
    fn mul_2si(&self, k: i32) -> Self;

    /// Exact conversion to an MPFR value.
    fn to_big(&self) -> Float;
    fn from_big(x: &Float, bits: u32) -> (Self, f64);
}

/// Enclosure `[mid - rad, mid + rad]` of a real number.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball<M> {
    mid: M,
    rad: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Applies `op` at precision `p`.
pub fn ball_binop<M: Midpoint>(op: BinOp, a: &Ball<M>, b: &Ball<M>, p: Precision) -> Result<Ball<M>> {
    let bits = p.bits();
    Ok(match op {
        BinOp::Add => a.add_at(b, bits),
        BinOp::Sub => a.sub_at(b, bits),
        BinOp::Mul => a.mul_at(b, bits),
        BinOp::Div => a.div_at(b, bits)?,
    })
}

/// Smallest ball containing both operands.
pub fn ball_union<M: Midpoint>(a: &Ball<M>, b: &Ball<M>) -> Ball<M> {
    a.union(b)
}

impl<M: Midpoint> Ball<M> {
    pub fn new(mid: M, rad: f64) -> Self {
        debug_assert!(rad >= 0.0 && !rad.is_nan());
        Ball { mid, rad }
    }

    pub fn exact(mid: M) -> Self {
        Ball { mid, rad: 0.0 }
    }

    pub fn zero_at(bits: u32) -> Self {
        Ball::exact(M::from_f64(0.0, bits))
    }

    pub fn one_at(bits: u32) -> Self {
        Ball::exact(M::from_f64(1.0, bits))
    }

    /// Exact ball around a double.
    pub fn from_f64(x: f64, bits: u32) -> Self {
        Ball::exact(M::from_f64(x, bits))
    }

    pub fn from_i64(k: i64, bits: u32) -> Self {
        if (k.unsigned_abs()) < (1u64 << 53) {
            return Ball::from_f64(k as f64, bits);
        }
        Ball::from_big(&Float::with_val(64, k), bits)
    }

    /// Enclosure of `num / den`.
    pub fn from_ratio(num: i128, den: i128, bits: u32) -> Self {
        assert!(den != 0, "zero denominator");
        let q = Rational::from((num, den));
        Ball::from_rational(&q, bits)
    }

    pub fn from_rational(q: &Rational, bits: u32) -> Self {
        let b = M::effective_bits(bits);
        let lo = Float::with_val_round(b + 2, q, Round::Down).0;
        let hi = Float::with_val_round(b + 2, q, Round::Up).0;
        Ball::from_endpoints(&lo, &hi, bits)
    }

    /// Enclosure of an MPFR value (exact when it fits the backend).
    pub fn from_big(x: &Float, bits: u32) -> Self {
        let (mid, err) = M::from_big(x, bits);
        Ball { mid, rad: err }
    }

    /// Smallest ball around `[lo, hi]` representable at `bits`.
    pub fn from_endpoints(lo: &Float, hi: &Float, bits: u32) -> Self {
        debug_assert!(lo <= hi);
        let work = lo.prec().max(hi.prec()).max(M::effective_bits(bits)) + 2;
        let mid_big = Float::with_val(work, lo + hi) / 2u32;
        let (mid, _) = M::from_big(&mid_big, bits);
        let m = mid.to_big();
        let up = Float::with_val_round(53, hi - &m, Round::Up).0;
        let down = Float::with_val_round(53, &m - lo, Round::Up).0;
        let r = up.max(&down);
        let rad = r.to_f64_round(Round::Up).max(0.0);
        Ball { mid, rad }
    }

    pub fn pi(bits: u32) -> Self {
        let b = M::effective_bits(bits) + 2;
        let lo = Float::with_val_round(b, rug::float::Constant::Pi, Round::Down).0;
        let hi = Float::with_val_round(b, rug::float::Constant::Pi, Round::Up).0;
        Ball::from_endpoints(&lo, &hi, bits)
    }

    pub fn mid(&self) -> &M {
        &self.mid
    }

    pub fn rad(&self) -> f64 {
        self.rad
    }

    pub fn bits(&self) -> u32 {
        self.mid.bits()
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    /// Upper bound on `sup |x|` over the interval.
    pub fn mag_up(&self) -> f64 {
        rad::add_up(self.mid.mag_up(), self.rad)
    }

    /// Lower bound on `inf |x|` over the interval (zero if it straddles zero).
    pub fn mag_down(&self) -> f64 {
        let m = self.mid.mag_down();
        if m <= self.rad {
            0.0
        } else {
            rad::sub_down(m, self.rad)
        }
    }

    /// Lower endpoint rounded down to a double.
    pub fn lower_f64(&self) -> f64 {
        let (lo, _) = self.endpoints_big(64);
        lo.to_f64_round(Round::Down)
    }

    /// Upper endpoint rounded up to a double.
    pub fn upper_f64(&self) -> f64 {
        let (_, hi) = self.endpoints_big(64);
        hi.to_f64_round(Round::Up)
    }

    /// Outward-rounded endpoints at `prec` bits.
    pub fn endpoints_big(&self, prec: u32) -> (Float, Float) {
        let m = self.mid.to_big();
        let r = Float::with_val(53, self.rad);
        let lo = Float::with_val_round(prec, &m - &r, Round::Down).0;
        let hi = Float::with_val_round(prec, &m + &r, Round::Up).0;
        (lo, hi)
    }

    /// Exact endpoints.
    pub fn endpoints_exact(&self) -> (Rational, Rational) {
        let m = self.mid.to_big().to_rational().expect("finite midpoint");
        let r = Rational::from_f64(self.rad).expect("finite radius");
        (Rational::from(&m - &r), m + r)
    }

    pub fn is_finite(&self) -> bool {
        self.rad.is_finite() && self.mid.to_big().is_finite()
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.mag_down() <= self.rad && {
            let (lo, hi) = self.endpoints_exact();
            lo <= 0 && hi >= 0
        }
    }

    /// True if every point of the interval is strictly positive.
    pub fn is_positive(&self) -> bool {
        self.mid > M::zero() && self.endpoints_exact().0 > 0
    }

    pub fn is_negative(&self) -> bool {
        self.mid < M::zero() && self.endpoints_exact().1 < 0
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        let (lo, hi) = self.endpoints_exact();
        let x = Rational::from_f64(x).expect("finite");
        lo <= x && x <= hi
    }

    pub fn contains_rational(&self, x: &Rational) -> bool {
        let (lo, hi) = self.endpoints_exact();
        &lo <= x && x <= &hi
    }

    /// Interval containment `other ⊆ self`.
    pub fn contains(&self, other: &Ball<M>) -> bool {
        let (lo, hi) = self.endpoints_exact();
        let (olo, ohi) = other.endpoints_exact();
        lo <= olo && ohi <= hi
    }

    pub fn overlaps(&self, other: &Ball<M>) -> bool {
        let (lo, hi) = self.endpoints_exact();
        let (olo, ohi) = other.endpoints_exact();
        lo <= ohi && olo <= hi
    }

    pub fn union(&self, other: &Ball<M>) -> Ball<M> {
        if self.contains(other) {
            return self.clone();
        }
        if other.contains(self) {
            return other.clone();
        }
        let bits = self.bits().max(other.bits());
        let prec = M::effective_bits(bits) + 8;
        let (alo, ahi) = self.endpoints_big(prec);
        let (blo, bhi) = other.endpoints_big(prec);
        let lo = if alo < blo { alo } else { blo };
        let hi = if ahi > bhi { ahi } else { bhi };
        Ball::from_endpoints(&lo, &hi, bits)
    }

    /// Adds `extra` to the radius.
    pub fn add_error(&self, extra: f64) -> Ball<M> {
        Ball {
            mid: self.mid.clone(),
            rad: rad::add_up(self.rad, extra.abs()),
        }
    }

    pub fn neg(&self) -> Ball<M> {
        Ball {
            mid: -self.mid.clone(),
            rad: self.rad,
        }
    }

    pub fn abs(&self) -> Ball<M> {
        if self.mid < M::zero() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn add_at(&self, rhs: &Ball<M>, bits: u32) -> Ball<M> {
        let (mid, e) = self.mid.add_err(&rhs.mid, bits);
        Ball {
            mid,
            rad: rad::add_up(rad::add_up(self.rad, rhs.rad), e),
        }
    }

    pub fn sub_at(&self, rhs: &Ball<M>, bits: u32) -> Ball<M> {
        let (mid, e) = self.mid.sub_err(&rhs.mid, bits);
        Ball {
            mid,
            rad: rad::add_up(rad::add_up(self.rad, rhs.rad), e),
        }
    }

    pub fn mul_at(&self, rhs: &Ball<M>, bits: u32) -> Ball<M> {
        let (mid, e) = self.mid.mul_err(&rhs.mid, bits);
        let mut r = e;
        if self.rad != 0.0 || rhs.rad != 0.0 {
            let a = rad::mul_up(self.mid.mag_up(), rhs.rad);
            let b = rad::mul_up(rhs.mid.mag_up(), self.rad);
            let c = rad::mul_up(self.rad, rhs.rad);
            r = rad::add_up(rad::add_up(rad::add_up(a, b), c), e);
        }
        Ball { mid, rad: r }
    }

    pub fn div_at(&self, rhs: &Ball<M>, bits: u32) -> Result<Ball<M>> {
        let den_lo = rhs.mag_down();
        if den_lo <= 0.0 || rhs.mid.is_zero() {
            return Err(Error::DivisionByEnclosedZero);
        }
        let (mid, e) = self.mid.div_err(&rhs.mid, bits);
        let mut r = e;
        if self.rad != 0.0 || rhs.rad != 0.0 {
            // |a/b - am/bm| <= (|am| rb + |bm| ra) / (|bm| (|bm| - rb))
            let num = rad::add_up(
                rad::mul_up(self.mid.mag_up(), rhs.rad),
                rad::mul_up(rhs.mid.mag_up(), self.rad),
            );
            let den = rad::mul_down(rhs.mid.mag_down(), den_lo);
            r = rad::add_up(rad::div_up(num, den), e);
        }
        Ok(Ball { mid, rad: r })
    }

    pub fn div(&self, rhs: &Ball<M>) -> Result<Ball<M>> {
        self.div_at(rhs, self.bits().max(rhs.bits()))
    }

    pub fn sqr(&self) -> Ball<M> {
        let sq = self * self;
        if !self.contains_zero() {
            return sq;
        }
        let bits = self.bits();
        let prec = M::effective_bits(bits) + 8;
        let (_, hi) = sq.endpoints_big(prec);
        Ball::from_endpoints(&Float::with_val(prec, 0), &hi, bits)
    }

    /// Exact multiplication by `2^k`.
    pub fn mul_2si(&self, k: i32) -> Ball<M> {
        let scale = 2f64.powi(k);
        let rad = if self.rad == 0.0 {
            0.0
        } else {
            let r = self.rad * scale;
            // results in the subnormal range may have rounded down
            if r < 1e-290 {
                r.next_up()
            } else {
                r
            }
        };
        Ball {
            mid: self.mid.mul_2si(k),
            rad,
        }
    }

    pub fn mul_i64(&self, k: i64) -> Ball<M> {
        self * &Ball::from_i64(k, self.bits())
    }

    pub fn div_i64(&self, k: i64) -> Result<Ball<M>> {
        self.div(&Ball::from_i64(k, self.bits()))
    }

    /// Re-expresses the ball with another midpoint backend.
    pub fn convert<N: Midpoint>(&self, bits: u32) -> Ball<N> {
        let m = self.mid.to_big();
        let (mid, e) = N::from_big(&m, bits);
        Ball {
            mid,
            rad: rad::add_up(self.rad, e),
        }
    }

    /// Containment-preserving rounding to fewer bits.
    pub fn round_to(&self, bits: u32) -> Ball<M> {
        self.convert::<M>(bits)
    }

    pub fn to_big_ball(&self) -> Ball<BigFloat> {
        self.convert(self.bits().max(53))
    }

    /// `true` when `rad <= tol * max(1, |mid|)`.
    pub fn is_tight(&self, tol: f64) -> bool {
        self.rad <= tol * self.mid.mag_up().max(1.0)
    }

    /// Sum in index order.
    pub fn sum_ordered<'a, I>(items: I, bits: u32) -> Ball<M>
    where
        I: IntoIterator<Item = &'a Ball<M>>,
    {
        let mut acc = Ball::zero_at(bits);
        for x in items {
            acc = acc.add_at(x, bits);
        }
        acc
    }

    /// Decimal form `mid ± rad`; parsing it back yields a superset of `self`.
    pub fn to_decimal(&self) -> String {
        let bits = self.bits();
        let digits = (bits as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2;
        let m = self.mid.to_big();
        let s = if m.is_zero() {
            "0".to_string()
        } else {
            m.to_string_radix(10, Some(digits))
        };
        // distance between the printed and the binary midpoint
        let back = parse_float(&s, bits + 64).expect("own output parses");
        let delta = abs_diff_up(&back, &m);
        let slack = if back.is_zero() {
            0.0
        } else {
            rad::mul_up(back.to_f64_round(Round::Up).abs().next_up(), rad::pow2(-(bits as i32) - 60))
        };
        let r = Float::with_val(53, rad::add_up(rad::add_up(self.rad, delta), slack));
        let rs = if r.is_zero() {
            "0".to_string()
        } else {
            r.to_string_radix_round(10, Some(6), Round::Up)
        };
        format!("{s} ± {rs}")
    }

    /// Parses `mid ± rad` (or `mid +/- rad`, or a bare `mid`) at `bits`.
    pub fn parse_decimal(text: &str, bits: u32) -> Result<Ball<M>> {
        let t = text.trim();
        let (ms, rs) = if let Some((a, b)) = t.split_once('±') {
            (a.trim(), b.trim())
        } else if let Some((a, b)) = t.split_once("+/-") {
            (a.trim(), b.trim())
        } else {
            (t, "0")
        };
        let work = M::effective_bits(bits) + 2;
        let m_lo = parse_float_round(ms, work, Round::Down).ok_or_else(|| Error::Parse(text.to_string()))?;
        let m_hi = parse_float_round(ms, work, Round::Up).ok_or_else(|| Error::Parse(text.to_string()))?;
        let r = parse_float_round(rs, 53, Round::Up).ok_or_else(|| Error::Parse(text.to_string()))?;
        if r.is_sign_negative() && !r.is_zero() {
            return Err(Error::Parse(text.to_string()));
        }
        let lo = Float::with_val_round(work, &m_lo - &r, Round::Down).0;
        let hi = Float::with_val_round(work, &m_hi + &r, Round::Up).0;
        Ok(Ball::from_endpoints(&lo, &hi, bits))
    }
}

/// Upper bound on `|a - b|` as a double.
pub(crate) fn abs_diff_up(a: &Float, b: &Float) -> f64 {
    let d = if a >= b {
        Float::with_val_round(53, a - b, Round::Up).0
    } else {
        Float::with_val_round(53, b - a, Round::Up).0
    };
    d.to_f64_round(Round::Up)
}

fn parse_float(s: &str, prec: u32) -> Option<Float> {
    parse_float_round(s, prec, Round::Nearest)
}

fn parse_float_round(s: &str, prec: u32, round: Round) -> Option<Float> {
    let parsed = Float::parse(s).ok()?;
    let (f, _) = Float::with_val_round(prec, parsed, round);
    f.is_finite().then_some(f)
}

impl<M: Midpoint> fmt::Display for Ball<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

impl<M: Midpoint> FromStr for Ball<M> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ball::parse_decimal(s, Precision::DEFAULT.bits())
    }
}

impl<'a, M: Midpoint> Add<&'a Ball<M>> for &'a Ball<M> {
    type Output = Ball<M>;

    fn add(self, rhs: &'a Ball<M>) -> Ball<M> {
        self.add_at(rhs, self.bits().max(rhs.bits()))
    }
}

impl<'a, M: Midpoint> Sub<&'a Ball<M>> for &'a Ball<M> {
    type Output = Ball<M>;

    fn sub(self, rhs: &'a Ball<M>) -> Ball<M> {
        self.sub_at(rhs, self.bits().max(rhs.bits()))
    }
}

impl<'a, M: Midpoint> Mul<&'a Ball<M>> for &'a Ball<M> {
    type Output = Ball<M>;

    fn mul(self, rhs: &'a Ball<M>) -> Ball<M> {
        self.mul_at(rhs, self.bits().max(rhs.bits()))
    }
}

impl<M: Midpoint> Add for Ball<M> {
    type Output = Ball<M>;

    fn add(self, rhs: Ball<M>) -> Ball<M> {
        &self + &rhs
    }
}

impl<M: Midpoint> Sub for Ball<M> {
    type Output = Ball<M>;

    fn sub(self, rhs: Ball<M>) -> Ball<M> {
        &self - &rhs
    }
}

impl<M: Midpoint> Mul for Ball<M> {
    type Output = Ball<M>;

    fn mul(self, rhs: Ball<M>) -> Ball<M> {
        &self * &rhs
    }
}

impl<M: Midpoint> Neg for Ball<M> {
    type Output = Ball<M>;

    fn neg(self) -> Ball<M> {
        Ball {
            mid: -self.mid,
            rad: self.rad,
        }
    }
}

impl<'a, M: Midpoint> Sum<&'a Ball<M>> for Ball<M> {
    fn sum<I: Iterator<Item = &'a Ball<M>>>(iter: I) -> Ball<M> {
        let mut acc: Option<Ball<M>> = None;
        for x in iter {
            acc = Some(match acc {
                None => x.clone(),
                Some(a) => &a + x,
            });
        }
        acc.unwrap_or_else(|| Ball::exact(M::zero()))
    }
}

impl<M: Midpoint> PartialOrd for Ball<M> {
    /// Certain ordering only: `Some` when the intervals are disjoint or both exact and equal.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let (lo, hi) = self.endpoints_exact();
        let (olo, ohi) = other.endpoints_exact();
        if hi < olo {
            Some(Ordering::Less)
        } else if lo > ohi {
            Some(Ordering::Greater)
        } else if lo == hi && olo == ohi && lo == olo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests;
