use proptest::prelude::*;
use rug::{Float, Rational};

use super::*;

fn q(x: f64) -> Rational {
    Rational::from_f64(x).unwrap()
}

fn encloses_big<M: Midpoint>(b: &Ball<M>, lo: &Float, hi: &Float) -> bool {
    let (blo, bhi) = b.endpoints_exact();
    blo <= lo.to_rational().unwrap() && hi.to_rational().unwrap() <= bhi
}

fn binop_examples<M: Midpoint>(bits: u32) {
    let p = Precision::new(bits).unwrap();
    let one = Ball::<M>::from_f64(1.0, bits);
    let two = Ball::<M>::from_f64(2.0, bits);
    let three = Ball::<M>::from_f64(3.0, bits);

    let s = ball_binop(BinOp::Add, &one, &two, p).unwrap();
    assert!(s.contains_f64(3.0));
    assert!(s.rad() < 1e-28);

    let x = Ball::<M>::new(M::from_f64(0.7, bits), 0.25);
    let z = ball_binop(BinOp::Mul, &Ball::zero_at(bits), &Ball::exact(M::from_f64(0.7, bits)), p).unwrap();
    assert!(z.contains_f64(0.0));
    assert_eq!(z.rad(), 0.0);
    assert!(ball_binop(BinOp::Mul, &Ball::zero_at(bits), &x, p).unwrap().contains_f64(0.0));

    let third = ball_binop(BinOp::Div, &one, &three, p).unwrap();
    assert!(third.rad() > 0.0);
    assert!(third.contains_rational(&Rational::from((1, 3))));

    let straddle = Ball::<M>::new(M::from_f64(0.1, bits), 0.2);
    assert!(matches!(
        ball_binop(BinOp::Div, &one, &straddle, p),
        Err(Error::DivisionByEnclosedZero)
    ));
}

fn elem_examples<M: Midpoint>(bits: u32) {
    let p = Precision::new(bits).unwrap();
    let zero = Ball::<M>::zero_at(bits);
    let one = Ball::<M>::one_at(bits);
    assert!(ball_elem(ElemFn::Cos, &zero, p).unwrap().contains_f64(1.0));
    let e = ball_elem(ElemFn::Exp, &one, p).unwrap();
    assert!(ball_elem(ElemFn::Ln, &e, p).unwrap().contains_f64(1.0));

    let half = Ball::<M>::from_f64(0.5, bits);
    let g = ball_elem(ElemFn::Gamma, &half, p).unwrap();
    let pi_lo = Float::with_val_round(400, rug::float::Constant::Pi, rug::float::Round::Down).0;
    let pi_hi = Float::with_val_round(400, rug::float::Constant::Pi, rug::float::Round::Up).0;
    let (lo, hi) = (Float::with_val(400, pi_lo.sqrt_ref()), Float::with_val(400, pi_hi.sqrt_ref()));
    assert!(encloses_big(&g, &lo, &hi), "gamma(1/2) = {g}");
    assert!(g.rad() < 1e-14);

    // Gamma(-1/2) = -2 sqrt(pi)
    let gm = ball_elem(ElemFn::Gamma, &half.neg(), p).unwrap();
    assert!(encloses_big(&gm, &(Float::with_val(400, &hi * -2)), &(Float::with_val(400, &lo * -2))));

    let x = Ball::<M>::from_f64(1.5, bits);
    let x5 = ball_elem(ElemFn::PowInt(5), &x, p).unwrap();
    assert!(x5.contains_f64(7.59375));
    let xm2 = ball_elem(ElemFn::PowInt(-2), &x, p).unwrap();
    assert!(xm2.contains_rational(&Rational::from((4, 9))));
    let s = ball_elem(ElemFn::Sqrt, &Ball::<M>::from_f64(2.0, bits), p).unwrap();
    assert!(s.sqr().contains_f64(2.0));
    let straddle = Ball::<M>::new(M::from_f64(0.0, bits), 1.0);
    let sq = ball_elem(ElemFn::PowInt(2), &straddle, p).unwrap();
    assert!(sq.lower_f64() > -1e-15 && sq.contains_f64(1.0));

    assert!(matches!(
        ball_elem(ElemFn::Sqrt, &Ball::<M>::from_f64(-1.0, bits), p),
        Err(Error::DomainViolation { .. })
    ));
    assert!(ball_elem(ElemFn::Ln, &zero, p).is_err());
    assert!(ball_elem(ElemFn::Gamma, &zero, p).is_err());
    assert!(ball_elem(ElemFn::Gamma, &Ball::<M>::from_f64(-1.0, bits), p).is_err());
    assert!(ball_elem(ElemFn::Gamma, &Ball::<M>::new(M::from_f64(1.5, bits), 1.0), p).is_ok());
}

fn union_examples<M: Midpoint>(bits: u32) {
    let one = Ball::<M>::one_at(bits);
    assert_eq!(ball_union(&one, &one), one);
    let a = Ball::<M>::new(M::from_f64(0.0, bits), 1.0);
    let b = Ball::<M>::from_f64(2.0, bits);
    let u = ball_union(&a, &b);
    assert!(u.contains(&a) && u.contains(&b));
    assert!(u.contains_f64(-1.0) && u.contains_f64(2.0));
}

#[test]
fn examples_f64() {
    binop_examples::<f64>(53);
    elem_examples::<f64>(53);
    union_examples::<f64>(53);
}

#[test]
fn examples_dd() {
    binop_examples::<DoubleDouble>(106);
    elem_examples::<DoubleDouble>(106);
    union_examples::<DoubleDouble>(106);
}

#[test]
fn examples_mpfr() {
    for bits in [53, 128, 300] {
        binop_examples::<BigFloat>(bits);
        elem_examples::<BigFloat>(bits);
        union_examples::<BigFloat>(bits);
    }
}

#[test]
fn precision_floor() {
    assert!(Precision::new(52).is_err());
    assert_eq!(Precision::default().bits(), 128);
}

#[test]
fn radius_shrinks_with_precision() {
    let mut last = f64::INFINITY;
    for bits in [64, 128, 256, 512] {
        let one = BallMp::one_at(bits);
        let r = one.div_at(&BallMp::from_f64(3.0, bits), bits).unwrap();
        let e = BallMp::from_f64(0.3, bits).exp_at(bits);
        let rad = r.rad().max(e.rad());
        assert!(rad <= last);
        last = rad;
    }
    assert!(last < 1e-150);
}

#[test]
fn decimal_form() {
    let third = BallMp::one_at(128).div(&BallMp::from_f64(3.0, 128)).unwrap();
    let s = third.to_decimal();
    assert!(s.contains(" ± "), "{s}");
    let back = BallMp::parse_decimal(&s, 128).unwrap();
    assert!(back.contains(&third));
    let plain = Ball64::parse_decimal("0.25", 53).unwrap();
    assert!(plain.contains_f64(0.25));
    assert!(Ball64::parse_decimal("1.0 +/- 0.5", 53).unwrap().contains_f64(1.4));
    assert!(Ball64::parse_decimal("nonsense", 53).is_err());
}

type BallMpT = Ball<BigFloat>;
use crate::{Ball64, BallMp};

fn arb_ball() -> impl Strategy<Value = (f64, f64)> {
    (-1e3f64..1e3, prop_oneof![Just(0.0), 0.0f64..1.0])
}

fn check_binop<M: Midpoint>(a: (f64, f64), b: (f64, f64), t: (f64, f64), bits: u32) {
    let ba = Ball::<M>::new(M::from_f64(a.0, bits), a.1);
    let bb = Ball::<M>::new(M::from_f64(b.0, bits), b.1);
    // exact sample points inside each interval
    let x = q(a.0) + q(a.1) * q(2.0 * t.0 - 1.0);
    let y = q(b.0) + q(b.1) * q(2.0 * t.1 - 1.0);
    assert!(ba.add_at(&bb, bits).contains_rational(&Rational::from(&x + &y)));
    assert!(ba.sub_at(&bb, bits).contains_rational(&Rational::from(&x - &y)));
    assert!(ba.mul_at(&bb, bits).contains_rational(&Rational::from(&x * &y)));
    if let Ok(d) = ba.div_at(&bb, bits) {
        assert!(d.contains_rational(&Rational::from(&x / &y)));
    }
}

proptest! {
    #[test]
    fn containment_f64(a in arb_ball(), b in arb_ball(), t in (0.0f64..=1.0, 0.0f64..=1.0)) {
        check_binop::<f64>(a, b, t, 53);
    }

    #[test]
    fn containment_dd(a in arb_ball(), b in arb_ball(), t in (0.0f64..=1.0, 0.0f64..=1.0)) {
        check_binop::<DoubleDouble>(a, b, t, 106);
    }

    #[test]
    fn containment_mpfr(a in arb_ball(), b in arb_ball(), t in (0.0f64..=1.0, 0.0f64..=1.0)) {
        check_binop::<BigFloat>(a, b, t, 90);
    }

    #[test]
    fn union_contains_both(a in arb_ball(), b in arb_ball()) {
        let ba = Ball64::new(a.0, a.1);
        let bb = Ball64::new(b.0, b.1);
        let u = ball_union(&ba, &bb);
        prop_assert!(u.contains(&ba) && u.contains(&bb));
        prop_assert!(ball_union(&ba, &ba).contains(&ba));
    }

    #[test]
    fn decimal_round_trip(m in -1e6f64..1e6, r in 0.0f64..1e-3, bits in 53u32..400) {
        let b = BallMpT::new(BigFloat::from_f64(m, bits), r)
            .div_at(&BallMpT::from_f64(7.0, bits), bits).unwrap();
        let back = BallMpT::parse_decimal(&b.to_decimal(), bits).unwrap();
        prop_assert!(back.contains(&b));
        let d = Ball::<DoubleDouble>::from_f64(m, 106).div(&Ball::from_f64(3.0, 106)).unwrap();
        let back = Ball::<DoubleDouble>::parse_decimal(&d.to_decimal(), 106).unwrap();
        prop_assert!(back.contains(&d));
    }

    #[test]
    fn trig_contains_exact(x in -50.0f64..50.0, r in 0.0f64..0.5, t in 0.0f64..=1.0) {
        let b = BallMpT::new(BigFloat::from_f64(x, 128), r);
        let pt = x + r * (2.0 * t - 1.0);
        let sin_pt = Float::with_val(200, pt).sin();
        let s = b.sin();
        // the sample point was rounded to f64; allow that much slack
        let ok = s.add_error(1e-13).contains_rational(&sin_pt.to_rational().unwrap());
        prop_assert!(ok);
    }
}

