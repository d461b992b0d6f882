use rug::Rational;

use super::*;
use crate::ball::DoubleDouble;

fn rat(x: f64) -> Rational {
    Rational::from_f64(x).unwrap()
}

#[test]
fn one_and_two_points() {
    let p = Precision::default();
    let r1 = legendre_rule(1, p).unwrap();
    assert!(r1.nodes[0].contains_f64(0.0));
    assert!(r1.weights[0].contains_f64(2.0));

    let r2 = legendre_rule(2, p).unwrap();
    // 1/sqrt(3): x^2 encloses 1/3
    for x in &r2.nodes {
        assert!(x.sqr().contains_rational(&Rational::from((1, 3))));
    }
    assert!(r2.nodes[0].is_negative());
    for w in &r2.weights {
        assert!(w.contains_f64(1.0));
    }
}

#[test]
fn moments_are_exact() {
    let p = Precision::default();
    for n in [3, 5, 12, 20, 33, 64] {
        let rule = legendre_rule(n, p).unwrap();
        assert_eq!(rule.n(), n);
        for i in 1..n {
            assert!(rule.nodes[i - 1].upper_f64() < rule.nodes[i].lower_f64());
            assert!(rule.nodes[i].overlaps(&rule.nodes[n - 1 - i].neg()));
        }
        for w in &rule.weights {
            assert!(w.is_positive());
        }
        for k in 0..(2 * n as u32) {
            let exact = if k % 2 == 1 { Rational::new() } else { Rational::from((2, k + 1)) };
            let m = rule.moment(k, 160);
            assert!(m.contains_rational(&exact), "n={n} k={k} {m}");
            assert!(m.rad() < 1e-30, "n={n} k={k} {m}");
        }
    }
}

#[test]
fn converted_rule_keeps_moments() {
    let rule = legendre_rule(12, Precision::default()).unwrap().convert::<DoubleDouble>(106);
    for k in 0..24u32 {
        let exact = if k % 2 == 1 { Rational::new() } else { Rational::from((2, k + 1)) };
        assert!(rule.moment(k, 106).contains_rational(&exact));
    }
}

#[test]
fn rejects_unsupported_sizes() {
    assert!(legendre_rule(0, Precision::default()).is_err());
    assert!(legendre_rule(65, Precision::default()).is_err());
}

#[test]
fn layout_alignment() {
    let l = PanelLayout::new(rat(0.0), rat(6000.0), rat(0.25)).unwrap();
    assert_eq!(l.k, 12000);
    assert_eq!(l.evaluation_count(12), 144_000);
    let l = PanelLayout::new(rat(6000.0), rat(150000.0), Rational::from((4, 5))).unwrap();
    assert_eq!(l.evaluation_count(12), 1_080_000);
    assert!(PanelLayout::new(rat(0.0), rat(1.0), rat(0.3)).is_err());
    assert_eq!(l.center(0), Rational::from((30004, 5)));
}

#[test]
fn simple_panel_sums() {
    let rule = legendre_rule(12, Precision::default()).unwrap();
    let layout = PanelLayout::new(rat(0.0), rat(4.0), rat(0.5)).unwrap();
    let meter = Meter::new();
    let one = panel_sum(|r| Ok(Ball::one_at(r.bits())), &layout, &rule, Some(&meter)).unwrap();
    assert!(one.contains_f64(4.0));
    assert_eq!(meter.get(), 48);

    let sym = PanelLayout::new(rat(-1.0), rat(1.0), rat(1.0)).unwrap();
    let cube = panel_sum(|r| r.pow_int(3), &sym, &rule, None).unwrap();
    assert!(cube.contains_f64(0.0));
    let quad = panel_sum(|r| Ok(r.sqr()), &layout, &rule, None).unwrap();
    assert!(quad.contains_rational(&Rational::from((64, 3))));
}

#[test]
fn panel_nodes_match_layout() {
    let rule = legendre_rule(12, Precision::default()).unwrap();
    let layout = PanelLayout::new(rat(0.0), rat(2.0), rat(0.25)).unwrap();
    let nodes = layout.nodes::<BigFloat>(&rule, 128);
    assert_eq!(nodes.len(), 48);
    let total = nodes.iter().fold(Ball::<BigFloat>::zero_at(128), |acc, (_, w)| acc.add_at(w, 128));
    assert!(total.contains_f64(2.0));
    for w in nodes.windows(2) {
        assert!(w[0].0.upper_f64() < w[1].0.lower_f64());
    }
}

#[test]
fn reference_scale_bounds() {
    let b = bound_0s(&rat(6000.0), &rat(0.25), 12).unwrap();
    assert!(b.upper_f64() <= 0.1e-10, "{b}");
    let b = bound_0s(&rat(260.0), &rat(0.25), 12).unwrap();
    assert!(b.upper_f64() <= 1e-14, "{b}");
    let d4 = bound_0s(&rat(260.0), &rat(0.125), 12).unwrap();
    assert!(d4.upper_f64() < b.lower_f64());

    let d1 = Rational::from((4, 5));
    let b = bound_st(&rat(6000.0), &rat(150000.0), &d1, 12, 120).unwrap();
    assert!(b.upper_f64() <= 1.1e-10, "{b}");
    let b1 = bound_st(&rat(256.0), &rat(4096.0), &d1, 12, 20).unwrap();
    let b2 = bound_st(&rat(256.0), &rat(8192.0), &d1, 12, 20).unwrap();
    assert_eq!(b1, b2);
    // direct evaluation of the formula gives 2.5107e-9
    assert!(b1.upper_f64() <= 2.52e-9 && b1.lower_f64() >= 2.50e-9, "{b1}");

    assert!(matches!(
        bound_st(&rat(250.0), &rat(4096.0), &d1, 12, 20),
        Err(Error::ValidityViolation(_))
    ));
}

#[test]
fn bounds_stable_in_precision() {
    // the bound is computed at a fixed precision and rounded up
    let a = bound_0s(&rat(6000.0), &rat(0.25), 12).unwrap();
    let b = bound_0s(&rat(6000.0), &rat(0.25), 12).unwrap();
    assert_eq!(a, b);
}
