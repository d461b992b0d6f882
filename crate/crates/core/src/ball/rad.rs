//! Upward/downward rounded helpers for radii (nonnegative doubles).

#[inline]
pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s == 0.0 {
        0.0
    } else {
        s.next_up()
    }
}

#[inline]
pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    (a * b).next_up()
}

#[inline]
pub(crate) fn div_up(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    (a / b).next_up()
}

#[inline]
pub(crate) fn mul_down(a: f64, b: f64) -> f64 {
    (a * b).next_down().max(0.0)
}

#[inline]
pub(crate) fn sub_down(a: f64, b: f64) -> f64 {
    (a - b).next_down().max(0.0)
}


/// `2^k` as a double (saturating at the subnormal floor).
#[inline]
pub(crate) fn pow2(k: i32) -> f64 {
    if k < -1074 {
        f64::from_bits(1)
    } else {
        2f64.powi(k)
    }
}
