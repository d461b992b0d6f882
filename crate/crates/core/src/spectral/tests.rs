use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::ball::DoubleDouble;
use crate::engine::{batch_compute, scheme_params, Overrides};

fn t(a: i32, b: i32, c: i32) -> Triple {
    Triple([a, b, c])
}

#[test]
fn index_sets() {
    assert_eq!(enumerate_x_d(2, 0), vec![t(-2, 0, 2)]);
    assert_eq!(
        enumerate_x_d(4, 0),
        vec![t(-4, 0, 4), t(-4, 2, 2), t(-2, -2, 4), t(-2, 0, 2)]
    );
    for n in [2u32, 4, 10, 20] {
        let k = n as i32;
        assert_eq!(enumerate_x_d(n, 3 * k), vec![t(k, k, k)]);
        assert_eq!(block_labels(n).len() as u32, 3 * n / 2 + 1);
        // brute force over the cube
        for d in block_labels(n) {
            let mut brute = Vec::new();
            for a in (-k..=k).step_by(2) {
                for b in (-k..=k).step_by(2) {
                    for c in (-k..=k).step_by(2) {
                        if a <= b && b <= c && a + b + c == d && (a, b, c) != (0, 0, 0) {
                            brute.push(t(a, b, c));
                        }
                    }
                }
            }
            assert_eq!(enumerate_x_d(n, d), brute);
        }
    }
    assert_eq!(enumerate_x_d(120, 0).len(), 1860);
}

#[test]
fn multiplicities() {
    assert_eq!(multiplicity(&t(2, 2, 2)), 1);
    assert_eq!(multiplicity(&t(-4, 2, 2)), 3);
    assert_eq!(multiplicity(&t(-4, 0, 4)), 6);
}

#[test]
fn entry_term_structure() {
    let terms = entry_terms(&t(-2, 0, 2), &t(-4, 2, 2));
    assert_eq!(terms.len(), 6 * 14);
    assert_eq!(terms.iter().map(|x| x.1).sum::<i64>(), 0);
    assert_eq!(terms.iter().map(|x| x.1.abs()).sum::<i64>(), 6 * 16);
    assert!(terms.iter().all(|(k, _)| k.iter().sum::<i64>() % 2 == 0));
}

#[test]
fn small_key_sets() {
    let k2 = required_keys(2);
    assert!(k2.len() <= 26);
    assert!(k2.iter().any(|k| k.orders == [0, 0, 0, 0, 2, 2]));
    let k4 = required_keys(4);
    assert!(k4.windows(2).all(|w| w[0] < w[1]));
    assert!(k4.iter().all(|k| k.orders.iter().sum::<u32>() % 2 == 0 && k.orders[5] <= 8));
}

fn synthetic(d: i32, rows: &[&[f64]]) -> BlockMatrix<DoubleDouble> {
    let n = rows.len();
    let index = (0..n as i32).map(|i| t(-2 * n as i32 + 2 * i, 0, 0)).collect();
    let entries = rows.iter().flat_map(|r| r.iter().map(|&x| Ball::from_f64(x, 128))).collect();
    BlockMatrix::from_entries(d, index, entries, Ball::zero_at(128))
}

#[test]
fn eigen_enclosures() {
    let id = synthetic(0, &[&[1.0, 0.0], &[0.0, 1.0]]);
    let l = min_eig(&id).unwrap();
    assert!(l.contains_f64(1.0) && l.rad() < 1e-25, "{l}");
    let l = min_eig(&synthetic(0, &[&[1.0, 0.0], &[0.0, 2.0]])).unwrap();
    assert!(l.contains_f64(1.0) && l.rad() < 1e-25);
    let l = min_eig(&synthetic(0, &[&[2.0, 1.0], &[1.0, 2.0]])).unwrap();
    assert!(l.contains_f64(1.0) && l.rad() < 1e-25);

    // second difference matrix: lambda_min = 2 - 2 cos(pi / (n + 1))
    for n in [5usize, 17, 40] {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match i.abs_diff(j) {
                        0 => 2.0,
                        1 => -1.0,
                        _ => 0.0,
                    })
                    .collect()
            })
            .collect();
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let l = min_eig(&synthetic(0, &refs)).unwrap();
        let x = Ball::<BigFloat>::pi(160).div_i64(n as i64 + 1).unwrap().cos();
        let exact = Ball::<BigFloat>::from_i64(2, 160).sub_at(&x.mul_i64(2), 160);
        assert!(l.to_big_ball().overlaps(&exact), "n = {n}: {l} vs {exact}");
        assert!(l.rad() < 1e-24, "n = {n}: {l}");
    }

    // radii widen the enclosure to cover all members
    let mut wide = synthetic(0, &[&[1.0, 0.0], &[0.0, 3.0]]);
    wide = BlockMatrix::from_entries(
        0,
        wide.index.clone(),
        (0..4).map(|i| wide.get(i / 2, i % 2).add_error(1e-3)).collect(),
        Ball::zero_at(128),
    );
    let l = min_eig(&wide).unwrap();
    assert!(l.contains_f64(1.0) && l.contains_f64(1.0009) && l.contains_f64(0.9991));
}

#[test]
fn verdict_ordering() {
    let lam = Ball::<DoubleDouble>::parse_decimal("0.5 ± 0.01", 128).unwrap();
    assert!(!block_verdict(&lam, &Ball::from_f64(0.6, 128)));
    assert!(block_verdict(&lam, &Ball::from_f64(0.4, 128)));
    assert!(!block_verdict(&lam, &Ball::from_f64(0.495, 128)));
}

#[test]
fn ratios() {
    let one = synthetic(0, &[&[3.0]]);
    assert!(diag_ratio(&one, 0).unwrap().contains_f64(0.0));
    let a = synthetic(0, &[&[2.0, -1.0, 0.5], &[-1.0, 4.0, 1.0], &[0.5, 1.0, 1.0]]);
    let r = diag_ratio(&a, 0).unwrap();
    assert!(r.contains_f64(0.75));
    let scaled = BlockMatrix::from_entries(
        0,
        a.index.clone(),
        (0..9).map(|i| a.get(i / 3, i % 3).mul_i64(7)).collect(),
        Ball::zero_at(128),
    );
    assert!(diag_ratio(&scaled, 0).unwrap().overlaps(&r));
    let z = synthetic(0, &[&[0.0, 1.0], &[1.0, 1.0]]);
    assert!(matches!(diag_ratio(&z, 0), Err(Error::ZeroDiagonal(_))));
}

fn small_store(n: u32) -> (SchemeParams, IntegralStore<DoubleDouble>) {
    let p = scheme_params(n, Mode::Exploratory, &Overrides::default()).unwrap();
    let keys = required_keys(n);
    let out = batch_compute::<DoubleDouble>(&keys, &p, None, 1).unwrap();
    (p, out.store)
}

#[test]
fn assembled_blocks() {
    let (p, store) = small_store(4);
    let eps = error_budget(&p).unwrap().total;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for d in block_labels(4) {
        let b = assemble_block(4, d, &store, &eps, 128).unwrap();
        assert_eq!(b.dim(), enumerate_x_d(4, d).len());
        let h = hexagon_block(&b);
        assert_eq!(h.dim() as u32, b.index.iter().map(multiplicity).sum::<u32>());
        let s = &PERMUTATIONS[rng.gen_range(0..6)];
        for i in 0..h.dim() {
            for j in 0..h.dim() {
                let pi = h.position(&h.index[i].permuted(s)).unwrap();
                let pj = h.position(&h.index[j].permuted(s)).unwrap();
                assert_eq!(h.get(i, j), h.get(pi, pj));
            }
        }
    }
    let b0 = assemble_block(4, 0, &store, &eps, 128).unwrap();
    let disc = disc_block(4, &b0).unwrap();
    assert!(disc.index.iter().all(|m| b0.index.contains(m) && 2 * m.norm_sq() <= 48));

    let (_, store2) = small_store(2);
    let b = assemble_block(2, 0, &store2, &eps, 128).unwrap();
    assert_eq!(b.dim(), 1);
    assert_eq!(hexagon_block(&b).dim(), 6);
    assert_eq!(disc_block(2, &b).unwrap().dim(), 0);
    let direct = q_entry(&t(-2, 0, 2), &t(-2, 0, 2), &store2, 128).unwrap();
    assert_eq!(b.get(0, 0), &direct);
}

#[test]
fn exploratory_certificate_never_passes() {
    let (p, store) = small_store(2);
    let c = certify(&p, &store, 1).unwrap();
    assert_eq!(c.blocks.len(), 4);
    assert!(!c.budget_valid && !c.pass);
    assert!(c.table().lines().count() == 5);
    assert!(c.report().contains("verdict: FAIL"));
}

mod props {
    use proptest::prelude::*;

    use super::super::*;

    proptest! {
        #[test]
        fn index_set_invariants(half_n in 1u32..=15, half_d in 0i32..=45) {
            let n = 2 * half_n;
            let d = 2 * (half_d % (3 * half_n as i32 + 1));
            let x = enumerate_x_d(n, d);
            prop_assert!(x.windows(2).all(|w| w[0] < w[1]));
            for m in &x {
                prop_assert_eq!(m.sum(), d);
                prop_assert!(m.0[0] <= m.0[1] && m.0[1] <= m.0[2]);
                prop_assert!(m.0.iter().all(|v| v % 2 == 0 && v.abs() <= n as i32));
                prop_assert!(*m != Triple([0, 0, 0]));
            }
            // orbit sizes add up to the expanded set
            let mut z: Vec<Triple> = x
                .iter()
                .flat_map(|m| PERMUTATIONS.iter().map(move |p| m.permuted(p)))
                .collect();
            z.sort_unstable();
            z.dedup();
            prop_assert_eq!(z.len() as u32, x.iter().map(multiplicity).sum::<u32>());
        }
    }
}
