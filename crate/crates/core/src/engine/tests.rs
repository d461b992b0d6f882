use rug::Rational;

use super::*;
use crate::ball::DoubleDouble;

#[test]
fn canonical_examples() {
    let k = canonical_key(&[0; 6]).unwrap();
    assert_eq!((k.orders, k.sign), ([0; 6], 1));
    let k = canonical_key(&[2, -2, 0, 1, -1, 0]).unwrap();
    assert_eq!((k.orders, k.sign), ([0, 0, 1, 1, 2, 2], -1));
    let k = canonical_key(&[-3, 3, 0, 0, 0, 0]).unwrap();
    assert_eq!((k.orders, k.sign), ([0, 0, 0, 0, 3, 3], -1));
    assert!(matches!(canonical_key(&[1, 0, 0, 0, 0, 0]), Err(Error::OddSumKey(_))));
}

#[test]
fn derived_parameters() {
    let p = scheme_params(20, Mode::Certified, &Overrides::default()).unwrap();
    assert_eq!(p.s, 256);
    assert_eq!(p.t, 4096);
    assert_eq!(p.node_counts().unwrap(), (6144, 28800));

    let p120 = scheme_params(120, Mode::Certified, &Overrides::default()).unwrap();
    assert!(p120.s.to_f64() >= s_threshold(120));
    assert!(p120.t >= 144000);
    let reference = Overrides {
        s: Some(Rational::from(6000)),
        t: Some(Rational::from(150000)),
        ..Default::default()
    };
    let p = scheme_params(120, Mode::Certified, &reference).unwrap();
    assert_eq!(p.node_counts().unwrap(), (144_000, 1_080_000));

    assert!(matches!(
        scheme_params(10, Mode::Certified, &Overrides::default()),
        Err(Error::InvalidBandLimit { .. })
    ));
    assert!(scheme_params(21, Mode::Exploratory, &Overrides::default()).is_err());
    let small = scheme_params(2, Mode::Exploratory, &Overrides::default()).unwrap();
    assert_eq!(small.s, 3);
    let bad = Overrides { s: Some(Rational::from((1, 3))), ..Default::default() };
    assert!(scheme_params(20, Mode::Exploratory, &bad).is_err());
    let low_t = Overrides { t: Some(Rational::from(3000)), ..Default::default() };
    assert!(matches!(
        scheme_params(20, Mode::Certified, &low_t),
        Err(Error::ValidityViolation(_))
    ));
}

#[test]
fn hash_depends_on_every_parameter() {
    let p = scheme_params(20, Mode::Certified, &Overrides::default()).unwrap();
    assert_eq!(p.hash(), p.clone().hash());
    assert_eq!(p.hash().len(), 16);
    let mut q = p.clone();
    q.prec = Precision::new(192).unwrap();
    assert_ne!(p.hash(), q.hash());
    let mut q = p.clone();
    q.d1 = Rational::from((2, 5));
    assert_ne!(p.hash(), q.hash());
}

#[test]
fn budgets() {
    let p = scheme_params(20, Mode::Certified, &Overrides::default()).unwrap();
    let e = scheme_error(&p).unwrap();
    assert!(e.upper_f64() <= 2.1e-8, "{e}");
    let mut bigger_t = p.clone();
    bigger_t.t = Rational::from(4096 + 1600);
    assert!(scheme_error(&bigger_t).unwrap().upper_f64() <= e.upper_f64());

    let x = scheme_params(4, Mode::Exploratory, &Overrides::default()).unwrap();
    assert!(scheme_error(&x).is_err());
    assert!(!error_budget(&x).unwrap().valid);
    assert!(error_budget(&p).unwrap().valid);
}

fn tiny() -> SchemeParams {
    scheme_params(2, Mode::Exploratory, &Overrides::default()).unwrap()
}

#[test]
fn sign_contract() {
    let e = Engine::<DoubleDouble>::new(&tiny(), 4).unwrap();
    let signed = e.compute_integral(&canonical_key(&[1, -1, 0, 0, 2, -2]).unwrap()).unwrap();
    let plain = e.compute_integral(&ModeKey::unsigned([0, 0, 1, 1, 2, 2])).unwrap();
    assert_eq!(signed.value, plain.value.neg());
    assert!(e.compute_integral(&ModeKey::unsigned([0, 0, 0, 0, 0, 5])).is_err());
}

#[test]
fn grouping_does_not_change_values() {
    let e = Engine::<DoubleDouble>::new(&tiny(), 4).unwrap();
    let mut keys = Vec::new();
    for a in 0..=4u32 {
        for b in a..=4 {
            for c in b..=4 {
                if (a + b + c) % 2 == 0 {
                    keys.push([0, 0, 1, a, b, c]);
                }
            }
        }
    }
    keys.sort_unstable();
    let together = e.compute_many(&keys, 1).unwrap();
    for (k, v) in keys.iter().zip(&together) {
        assert_eq!(&e.compute_integral(&ModeKey::unsigned(*k)).unwrap().value, v);
    }
    assert_eq!(e.compute_many(&keys, 3).unwrap(), together);
}

#[test]
fn cache_round_trip_and_recovery() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("integrals.log");
    let p = tiny();
    let keys: Vec<ModeKey> = [[0u32, 0, 0, 0, 0, 0], [0, 0, 1, 1, 2, 2], [0, 0, 0, 0, 2, 2]]
        .iter()
        .map(|o| ModeKey::unsigned(*o))
        .collect();

    let empty = batch_compute::<DoubleDouble>(&[], &p, Some(&path), 1).unwrap();
    assert!(empty.store.is_empty());
    assert!(!path.exists());

    let first = batch_compute::<DoubleDouble>(&keys, &p, Some(&path), 1).unwrap();
    assert_eq!(first.computed, 3);
    assert!(first.evaluations > 0);
    let second = batch_compute::<DoubleDouble>(&keys, &p, Some(&path), 1).unwrap();
    assert_eq!(second.computed, 0);
    assert_eq!(second.evaluations, 0);
    for (k, v) in first.store.iter() {
        assert!(second.store.get(k).unwrap().contains(v));
    }

    // torn final record
    let mut text = std::fs::read_to_string(&path).unwrap();
    text.truncate(text.len() - 10);
    std::fs::write(&path, &text).unwrap();
    let third = batch_compute::<DoubleDouble>(&keys, &p, Some(&path), 1).unwrap();
    assert_eq!(third.computed, 1);
    assert!(std::fs::read_to_string(&path).unwrap().ends_with('\n'));

    // another scheme: header mismatch, everything recomputed
    let mut other = p.clone();
    other.prec = Precision::new(160).unwrap();
    let fourth = batch_compute::<DoubleDouble>(&keys, &other, Some(&path), 1).unwrap();
    assert_eq!(fourth.computed, 3);
    let head = std::fs::read_to_string(&path).unwrap();
    assert!(head.starts_with(&format!("{CACHE_MAGIC} v1 scheme={}", other.hash())));
}

#[test]
fn store_lookup() {
    let mut s = IntegralStore::<f64>::new("h".into());
    s.insert([0, 0, 1, 1, 2, 2], Ball::from_f64(0.5, 53));
    assert!(s.value_signed(&[1, -1, 0, 0, 2, -2]).unwrap().contains_f64(-0.5));
    assert!(s.value_signed(&[1, 1, 0, 0, 2, 2]).unwrap().contains_f64(0.5));
    assert!(matches!(s.value_signed(&[0; 6]), Err(Error::MissingKey(_))));
    assert!(s.to_text().starts_with("0 0 1 1 2 2 "));
}

mod props {
    use proptest::prelude::*;

    use super::super::canonical_key;

    proptest! {
        #[test]
        fn canonical_form_is_invariant(k in prop::array::uniform6(-40i64..=40), rot in 0usize..6, flip in 0usize..6) {
            let mut k = k;
            if k.iter().sum::<i64>() % 2 != 0 {
                k[0] += 1;
            }
            let base = canonical_key(&k).unwrap();
            prop_assert!(base.orders.windows(2).all(|w| w[0] <= w[1]));

            // permutations leave the key unchanged
            let mut p = k;
            p.rotate_left(rot);
            prop_assert_eq!(canonical_key(&p).unwrap(), base);

            // J_{-n} = (-1)^n J_n
            let mut q = k;
            q[flip] = -q[flip];
            let c = canonical_key(&q).unwrap();
            prop_assert_eq!(c.orders, base.orders);
            let expect = if k[flip] % 2 == 0 { base.sign } else { -base.sign };
            prop_assert_eq!(c.sign, expect);

            // negating all six orders keeps the sign since the sum is even
            let all = k.map(|x| -x);
            prop_assert_eq!(canonical_key(&all).unwrap(), base);
        }
    }
}
