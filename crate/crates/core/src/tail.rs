//! Tail `[T, inf)` of the six-fold product integrals.
//!
//! On the tail each `J_n(z)` is replaced by the first three terms of its
//! Hankel expansion. The product `z prod J_{n_j}(z)` then equals
//! `(2/pi)^3 (A z^-2 + B z^-3 + C z^-4)` up to the budgeted remainder, where
//! `A`, `B`, `C` are trigonometric polynomials in `z`. These are expanded
//! into sums of `cos(f z + q pi/4)` with exact dyadic coefficients and
//! integrated term by term.

use std::collections::BTreeMap;

use rug::Rational;

use crate::ball::{Ball, BigFloat, Midpoint, Precision};
use crate::error::{Error, Result};

type Mp = Ball<BigFloat>;

/// Every coefficient is an integer multiple of `1 / COEFF_DEN`.
pub const COEFF_DEN: i64 = 1 << 13;

/// Powers of `1/z` carried by `A`, `B`, `C`.
pub const POWERS: [u32; 3] = [2, 3, 4];

/// `coeff / COEFF_DEN * cos(freq z + phase_q pi/4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TrigTerm {
    pub freq: u32,
    pub phase_q: u8,
    pub coeff: i64,
}

impl TrigTerm {
    pub fn coeff_rational(&self) -> Rational {
        Rational::from((self.coeff, COEFF_DEN))
    }

    pub fn coeff_ball<M: Midpoint>(&self, bits: u32) -> Ball<M> {
        Ball::from_rational(&self.coeff_rational(), bits)
    }

    /// `phase_q pi / 4`.
    pub fn phase<M: Midpoint>(&self, bits: u32) -> Ball<M> {
        Ball::<M>::pi(bits + 4).mul_i64(self.phase_q as i64).mul_2si(-2).round_to(bits)
    }

    /// Value of the term at `z`.
    pub fn eval(&self, z: &Mp, bits: u32) -> Mp {
        let arg = z.mul_i64(self.freq as i64).add_at(&self.phase::<BigFloat>(bits), bits);
        self.coeff_ball::<BigFloat>(bits).mul_at(&arg.cos_at(bits), bits)
    }
}

/// `A`, `B`, `C` as cosine sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailCoefficients {
    pub a_terms: Vec<TrigTerm>,
    pub b_terms: Vec<TrigTerm>,
    pub c_terms: Vec<TrigTerm>,
}

impl TailCoefficients {
    pub fn by_power(&self) -> [&[TrigTerm]; 3] {
        [&self.a_terms, &self.b_terms, &self.c_terms]
    }
}

/// Phase of `cos(omega_j)` in units of `pi/4`: `omega = z - pi/4 - n pi/2`.
fn cos_phase(n: i64) -> i64 {
    (-1 - 2 * n).rem_euclid(8)
}

/// Accumulates `weight * prod_j cos(z + q_j pi/4)` into `acc` keyed by
/// `(freq, q)`, with the `2^-6` of the product-to-sum identity folded into
/// the weight's denominator.
fn expand_cos_product(phases: &[i64; 6], weight: i64, acc: &mut BTreeMap<(u32, u8), i64>) {
    // (signed frequency + 6, q) -> multiplicity
    let mut states = [[0i64; 8]; 13];
    states[6][0] = 1;
    for &qj in phases {
        let mut next = [[0i64; 8]; 13];
        for f in 0..13 {
            for q in 0..8 {
                let c = states[f][q];
                if c == 0 {
                    continue;
                }
                if f + 1 < 13 {
                    next[f + 1][(q as i64 + qj).rem_euclid(8) as usize] += c;
                }
                if f >= 1 {
                    next[f - 1][(q as i64 - qj).rem_euclid(8) as usize] += c;
                }
            }
        }
        states = next;
    }
    for (fi, row) in states.iter().enumerate() {
        let f = fi as i64 - 6;
        for (q, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let (f, q) = if f < 0 { (-f, (-(q as i64)).rem_euclid(8)) } else { (f, q as i64) };
            let q = if f == 0 { q.min(8 - q) % 8 } else { q };
            *acc.entry((f as u32, q as u8)).or_insert(0) += c * weight;
        }
    }
}

fn collect(acc: BTreeMap<(u32, u8), i64>) -> Vec<TrigTerm> {
    acc.into_iter()
        // cos(pi/2) = cos(3 pi/2) = 0: constant terms with such phases vanish
        .filter(|&((f, q), c)| c != 0 && !(f == 0 && q % 4 == 2))
        .map(|((freq, phase_q), coeff)| TrigTerm { freq, phase_q, coeff })
        .collect()
}

/// Product-to-sum expansion of `A`, `B`, `C` for orders `k`.
///
/// With `beta = (n^2 - 1/4)/2` and `gamma = (n^2 - 1/4)(n^2 - 9/4)/8`:
/// `A = prod cos`, `B = -sum_j beta_j sin_j prod_{i != j} cos_i`,
/// `C = sum_{j < l} beta_j beta_l sin_j sin_l prod cos - (sum gamma_j) prod cos`.
pub fn expand_products(k: &[i64; 6]) -> TailCoefficients {
    let cq: Vec<i64> = k.iter().map(|&n| cos_phase(n)).collect();
    let base: [i64; 6] = [cq[0], cq[1], cq[2], cq[3], cq[4], cq[5]];
    // 8 beta = 4n^2 - 1, 128 gamma = (4n^2 - 1)(4n^2 - 9)
    let b8: Vec<i64> = k.iter().map(|&n| 4 * n * n - 1).collect();
    let g128: i64 = k.iter().map(|&n| (4 * n * n - 1) * (4 * n * n - 9)).sum();

    // The product-to-sum sum carries 1/64; COEFF_DEN = 64 * 128.
    let mut a = BTreeMap::new();
    expand_cos_product(&base, 128, &mut a);

    let mut b = BTreeMap::new();
    for j in 0..6 {
        let mut ph = base;
        ph[j] = (ph[j] - 2).rem_euclid(8); // sin x = cos(x - pi/2)
        expand_cos_product(&ph, -16 * b8[j], &mut b);
    }

    let mut c = BTreeMap::new();
    for j in 0..6 {
        for l in (j + 1)..6 {
            let mut ph = base;
            ph[j] = (ph[j] - 2).rem_euclid(8);
            ph[l] = (ph[l] - 2).rem_euclid(8);
            expand_cos_product(&ph, 2 * b8[j] * b8[l], &mut c);
        }
    }
    expand_cos_product(&base, -g128, &mut c);

    TailCoefficients {
        a_terms: collect(a),
        b_terms: collect(b),
        c_terms: collect(c),
    }
}

/// `cos(q pi/4)` and `sin(q pi/4)`.
fn unit_phase(q: u8, bits: u32) -> (Mp, Mp) {
    let r = Mp::from_f64(0.5, bits).sqrt_at(bits).expect("positive");
    let one = Mp::one_at(bits);
    let zero = Mp::zero_at(bits);
    match q % 8 {
        0 => (one, zero),
        1 => (r.clone(), r),
        2 => (zero, one),
        3 => (r.neg(), r),
        4 => (one.neg(), zero),
        5 => (r.neg(), r.neg()),
        6 => (zero, one.neg()),
        _ => (r.clone(), r.neg()),
    }
}

/// `int_T^inf z^-p e^(i f z) dz` by repeated integration by parts, with
/// `depth` explicit terms; the remainder
/// `(p)_depth / f^depth * T^(1-p-depth) / (p+depth-1)` goes into both radii.
pub fn by_parts(f: u32, p: u32, t: &Rational, depth: u32, bits: u32) -> Result<(Mp, Mp)> {
    let ft = Rational::from(t * f);
    if f == 0 || p < 2 || ft < p + 4 {
        return Err(Error::NonConvergence {
            product: ft.to_f64(),
            needed: (p + 4) as f64,
        });
    }
    let w = bits + 32;
    let tb = Mp::from_rational(t, w);
    let fb = Mp::from_i64(f as i64, w);
    let inv_t = Mp::one_at(w).div_at(&tb, w)?;
    let inv_f = Mp::one_at(w).div_at(&fb, w)?;
    // term_j = (p)_j T^(-p-j) f^(-j-1) (-i)^(j+1)
    let mut mag = inv_t.pow_int_at(p as i32, w)?.mul_at(&inv_f, w);
    let (mut sre, mut sim) = (Mp::zero_at(w), Mp::zero_at(w));
    for j in 0..depth {
        match (j + 1) % 4 {
            0 => sre = sre.add_at(&mag, w),
            1 => sim = sim.sub_at(&mag, w),
            2 => sre = sre.sub_at(&mag, w),
            _ => sim = sim.add_at(&mag, w),
        }
        mag = mag.mul_at(&Mp::from_i64((p + j) as i64, w), w).mul_at(&inv_t, w).mul_at(&inv_f, w);
    }
    // remainder: (p)_J f^-J T^(1-p-J) / (p+J-1) = mag * f * T / (p + J - 1)
    let rem = mag
        .mul_at(&fb, w)
        .mul_at(&tb, w)
        .div_at(&Mp::from_i64((p + depth - 1) as i64, w), w)?;
    let rem = rem.upper_f64();
    let ftb = Mp::from_rational(&ft, w);
    let (c, s) = (ftb.cos_at(w), ftb.sin_at(w));
    // F = -(c + i s)(sre + i sim)
    let re = c.mul_at(&sre, w).sub_at(&s.mul_at(&sim, w), w).neg();
    let im = c.mul_at(&sim, w).add_at(&s.mul_at(&sre, w), w).neg();
    Ok((re.add_error(rem).round_to(bits), im.add_error(rem).round_to(bits)))
}

/// Depth at which the by-parts remainder is below `2^-(bits+8)` relative to
/// the leading term.
fn auto_depth(f: u32, p: u32, t: f64, bits: u32) -> u32 {
    let ft = f as f64 * t;
    let goal = -((bits + 8) as f64) * std::f64::consts::LN_2;
    let mut log_ratio = 0.0;
    let mut j = 0;
    while log_ratio > goal && j < 4000 {
        log_ratio += ((p + j) as f64 / ft).ln();
        j += 1;
        if (p + j) as f64 >= ft {
            break;
        }
    }
    j.max(1) + 1
}

/// Precomputed `int_T^inf z^-p cos(f z + q pi/4) dz` for every admissible
/// `(p, f, q)`, shared by all keys at one `T`.
#[derive(Debug, Clone)]
pub struct TailContext<M: Midpoint> {
    t: Rational,
    bits: u32,
    // [p - 2][f / 2][q]
    table: Vec<Vec<Vec<Ball<M>>>>,
    two_over_pi_cubed: Ball<M>,
}

impl<M: Midpoint> TailContext<M> {
    pub fn new(t: &Rational, p: Precision) -> Result<Self> {
        let bits = p.bits();
        let w = bits + 16;
        let tf = t.to_f64();
        let mut table = Vec::with_capacity(3);
        for &pw in &POWERS {
            let mut by_f = Vec::with_capacity(4);
            for f in [0u32, 2, 4, 6] {
                let mut by_q = Vec::with_capacity(8);
                if f == 0 {
                    // T^(1-p) / (p-1)
                    let tb = Mp::from_rational(t, w);
                    let base = tb
                        .pow_int_at(1 - pw as i32, w)?
                        .div_at(&Mp::from_i64(pw as i64 - 1, w), w)?;
                    for q in 0..8u8 {
                        let (c, _) = unit_phase(q, w);
                        by_q.push(c.mul_at(&base, w).convert(bits));
                    }
                } else {
                    let depth = auto_depth(f, pw, tf, w);
                    let (re, im) = by_parts(f, pw, t, depth, w)?;
                    for q in 0..8u8 {
                        let (c, s) = unit_phase(q, w);
                        let v = c.mul_at(&re, w).sub_at(&s.mul_at(&im, w), w);
                        by_q.push(v.convert(bits));
                    }
                }
                by_f.push(by_q);
            }
            table.push(by_f);
        }
        let tp = Mp::from_f64(2.0, w).div_at(&Mp::pi(w), w)?.pow_int_at(3, w)?;
        Ok(TailContext {
            t: t.clone(),
            bits,
            table,
            two_over_pi_cubed: tp.convert(bits),
        })
    }

    pub fn t(&self) -> &Rational {
        &self.t
    }

    /// `int_T^inf z^-p cos(f z + q pi/4) dz`.
    pub fn integral(&self, freq: u32, phase_q: u8, power: u32) -> &Ball<M> {
        &self.table[(power - 2) as usize][(freq / 2) as usize][(phase_q % 8) as usize]
    }

    /// `(2/pi)^3 int_T^inf (A z^-2 + B z^-3 + C z^-4) dz`.
    pub fn tail_main(&self, coeffs: &TailCoefficients) -> Ball<M> {
        let bits = self.bits;
        let mut acc = Ball::<M>::zero_at(bits);
        for (terms, &pw) in coeffs.by_power().iter().zip(&POWERS) {
            for term in terms.iter() {
                let g = self.integral(term.freq, term.phase_q, pw);
                acc = acc.add_at(&g.mul_at(&Ball::from_i64(term.coeff, bits), bits), bits);
            }
        }
        acc.mul_2si(-13).mul_at(&self.two_over_pi_cubed, bits)
    }

    pub fn tail_for_orders(&self, k: &[i64; 6]) -> Ball<M> {
        self.tail_main(&expand_products(k))
    }
}

/// Certified tail main term for orders `k` from `T` on.
pub fn tail_main(k: &[i64; 6], t: &Rational, p: Precision) -> Result<Ball<BigFloat>> {
    Ok(TailContext::<BigFloat>::new(t, p)?.tail_for_orders(k))
}

/// `19 N^6/T^5 + 0.68 N^8/T^5 + 0.35 N^10/T^6 + 0.13 N^12/T^7 + 16 N^14/T^8`,
/// rounded up.
pub fn tail_error(n: u32, t: &Rational) -> Result<Ball<BigFloat>> {
    if n < 20 {
        return Err(Error::ValidityViolation(format!("tail bound needs N >= 20, got {n}")));
    }
    if *t < 10 * n * n {
        return Err(Error::ValidityViolation(format!(
            "tail bound needs T >= 10 N^2 = {}, got {}",
            10 * n * n,
            t.to_f64()
        )));
    }
    Ok(tail_error_unchecked(n, t))
}

/// The same formula without the validity checks (exploratory runs).
pub fn tail_error_unchecked(n: u32, t: &Rational) -> Ball<BigFloat> {
    let b = 128;
    let nb = Mp::from_i64(n as i64, b);
    let tb = Mp::from_rational(t, b);
    let term = |c: (i128, i128), np: i32, tp: i32| {
        Mp::from_ratio(c.0, c.1, b)
            .mul_at(&nb.pow_int_at(np, b).expect("power"), b)
            .div_at(&tb.pow_int_at(tp, b).expect("power"), b)
            .expect("positive T")
    };
    let sum = term((19, 1), 6, 5)
        .add_at(&term((68, 100), 8, 5), b)
        .add_at(&term((35, 100), 10, 6), b)
        .add_at(&term((13, 100), 12, 7), b)
        .add_at(&term((16, 1), 14, 8), b);
    let (_, hi) = sum.endpoints_big(b + 8);
    Mp::from_endpoints(&hi, &hi, b)
}
