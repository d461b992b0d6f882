//! Gauss-Legendre rules with certified nodes and weights, composite panel
//! sums, and the a priori discretisation bounds on `[0, S]` and `[S, T]`.

use std::sync::atomic::{AtomicU64, Ordering};

use rug::{Float, Rational};

use crate::ball::{Ball, BigFloat, Midpoint, Precision};
use crate::error::{Error, Result};

/// Largest supported rule size.
pub const MAX_RULE_POINTS: usize = 64;

/// Bound on `|J_n(z)|` for `|Im z| <= 1` with large real part.
pub const STRIP_CONSTANT: f64 = 3.36;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule<M: Midpoint = BigFloat> {
    pub nodes: Vec<Ball<M>>,
    pub weights: Vec<Ball<M>>,
}

impl<M: Midpoint> GaussRule<M> {
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn convert<N: Midpoint>(&self, bits: u32) -> GaussRule<N> {
        GaussRule {
            nodes: self.nodes.iter().map(|x| x.convert(bits)).collect(),
            weights: self.weights.iter().map(|w| w.convert(bits)).collect(),
        }
    }

    /// `sum_i w_i x_i^k`.
    pub fn moment(&self, k: u32, bits: u32) -> Ball<M> {
        let mut acc = Ball::zero_at(bits);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let xk = x.pow_int_at(k as i32, bits).expect("nonnegative power");
            acc = acc.add_at(&w.mul_at(&xk, bits), bits);
        }
        acc
    }
}

type Mp = Ball<BigFloat>;

/// Monic Legendre polynomial `p_n` and its derivative at `x`.
fn legendre_eval(n: usize, x: &Mp, bits: u32) -> (Mp, Mp) {
    let mut p_prev = Mp::one_at(bits);
    let mut d_prev = Mp::zero_at(bits);
    if n == 0 {
        return (p_prev, d_prev);
    }
    let mut p = x.clone();
    let mut d = Mp::one_at(bits);
    for k in 1..n {
        let k = k as i128;
        let beta = Mp::from_ratio(k * k, 4 * k * k - 1, bits);
        let p_next = x.mul_at(&p, bits).sub_at(&beta.mul_at(&p_prev, bits), bits);
        let d_next = p
            .add_at(&x.mul_at(&d, bits), bits)
            .sub_at(&beta.mul_at(&d_prev, bits), bits);
        p_prev = p;
        d_prev = d;
        p = p_next;
        d = d_next;
    }
    (p, d)
}

/// Certified sign of `p_n` at an exact point, if decidable.
fn sign_at(n: usize, x: &Float, bits: u32) -> Option<i8> {
    let xb = Mp::from_big(x, bits);
    let (p, _) = legendre_eval(n, &xb, bits);
    if p.is_positive() {
        Some(1)
    } else if p.is_negative() {
        Some(-1)
    } else {
        None
    }
}

/// Certified Gauss-Legendre rule with `n` points.
pub fn legendre_rule(n: usize, p: Precision) -> Result<GaussRule> {
    if n == 0 || n > MAX_RULE_POINTS {
        return Err(Error::RootIsolationFailure {
            degree: n,
            detail: format!("supported sizes are 1..={MAX_RULE_POINTS}"),
        });
    }
    let bits = p.bits();
    let work = bits + 32 + 4 * n as u32;

    // Positive roots only; the rule is symmetric. The grid is uniform in
    // angle so that it keeps up with the clustering of roots near 1.
    let half = n / 2;
    let mut grid: Vec<Float> = Vec::new();
    let last = if n.is_multiple_of(2) { 2 * n } else { 2 * n - 1 };
    for j in 0..=last {
        let t = (std::f64::consts::PI * j as f64 / (4 * n) as f64).cos();
        let t = if j == 0 { 1.0 } else if j == 2 * n { 0.0 } else { t };
        grid.push(Float::with_val(53, t));
    }
    let mut signs = Vec::with_capacity(grid.len());
    for g in grid.iter_mut() {
        let mut s = sign_at(n, g, work);
        let mut tries = 0;
        while s.is_none() && tries < 8 {
            *g = Float::with_val(work, &*g * (1.0 - 1e-9));
            s = sign_at(n, g, work);
            tries += 1;
        }
        match s {
            Some(s) => signs.push(s),
            None => {
                return Err(Error::RootIsolationFailure {
                    degree: n,
                    detail: format!("undecidable sign near {}", g.to_f64()),
                })
            }
        }
    }
    let mut brackets = Vec::new();
    for j in 0..grid.len() - 1 {
        if signs[j] != signs[j + 1] {
            // grid runs from 1 down towards 0
            brackets.push((grid[j + 1].clone(), grid[j].clone(), signs[j + 1]));
        }
    }
    if brackets.len() != half {
        return Err(Error::RootIsolationFailure {
            degree: n,
            detail: format!("found {} sign changes, expected {half}", brackets.len()),
        });
    }

    let mut pos_nodes = Vec::with_capacity(half);
    for (mut lo, mut hi, s_lo) in brackets {
        for _ in 0..(work + 8) {
            let mid = Float::with_val(work + 2, &lo + &hi) / 2u32;
            match sign_at(n, &mid, work) {
                Some(s) if s == s_lo => lo = mid,
                Some(_) => hi = mid,
                None => break,
            }
            let width = Float::with_val(work, &hi - &lo);
            if width.is_zero() || width.get_exp().unwrap_or(i32::MIN) < -((work - 4) as i32) {
                break;
            }
        }
        pos_nodes.push(Mp::from_endpoints(&lo, &hi, work));
    }
    pos_nodes.reverse();

    // c_n = (2n)! / (2^n (n!)^2) converts the monic p_n to P_n.
    let mut cn = Rational::from(1);
    for k in 1..=n as u32 {
        cn *= Rational::from((2 * k - 1, k));
    }
    let cn = Mp::from_rational(&cn, work);
    let two = Mp::from_f64(2.0, work);
    let weight = |x: &Mp| -> Result<Mp> {
        let (_, d) = legendre_eval(n, x, work);
        let pd = cn.mul_at(&d, work).sqr();
        let one_minus = Mp::one_at(work).sub_at(&x.sqr(), work);
        two.div_at(&one_minus.mul_at(&pd, work), work)
    };

    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for x in pos_nodes.iter().rev() {
        nodes.push(x.neg().round_to(bits));
        weights.push(weight(x)?.round_to(bits));
    }
    if n % 2 == 1 {
        nodes.push(Mp::zero_at(bits));
        weights.push(weight(&Mp::zero_at(work))?.round_to(bits));
    }
    for x in &pos_nodes {
        nodes.push(x.round_to(bits));
        weights.push(weight(x)?.round_to(bits));
    }
    Ok(GaussRule { nodes, weights })
}

/// `K` panels of half-width `d` covering `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelLayout {
    pub a: Rational,
    pub b: Rational,
    pub k: u64,
    pub d: Rational,
}

impl PanelLayout {
    pub fn new(a: Rational, b: Rational, d: Rational) -> Result<Self> {
        if d <= 0 || b <= a {
            return Err(Error::InvalidParams(format!("empty layout [{a}, {b}] with d = {d}")));
        }
        let k = Rational::from(&b - &a) / Rational::from(2 * &d);
        if *k.denom() != 1 {
            return Err(Error::InvalidParams(format!(
                "length {} is not a multiple of 2d = {}",
                Rational::from(&b - &a),
                Rational::from(2 * &d)
            )));
        }
        let k = k.numer().to_u64().ok_or_else(|| Error::InvalidParams("too many panels".into()))?;
        Ok(PanelLayout { a, b, k, d })
    }

    /// Exact centre of panel `j`.
    pub fn center(&self, j: u64) -> Rational {
        &self.a + Rational::from(&self.d * (2 * j + 1))
    }

    /// Quadrature nodes `c_j + d x_i` and weights `d w_i`, panel by panel.
    pub fn nodes<M: Midpoint>(&self, rule: &GaussRule<BigFloat>, bits: u32) -> Vec<(Ball<M>, Ball<M>)> {
        let work = bits + 8;
        let d = Mp::from_rational(&self.d, work);
        let dw: Vec<Mp> = rule.weights.iter().map(|w| d.mul_at(w, work)).collect();
        let dx: Vec<Mp> = rule.nodes.iter().map(|x| d.mul_at(x, work)).collect();
        let mut out = Vec::with_capacity(self.k as usize * rule.n());
        for j in 0..self.k {
            let c = Mp::from_rational(&self.center(j), work);
            for (x, w) in dx.iter().zip(&dw) {
                out.push((c.add_at(x, work).convert(bits), w.convert(bits)));
            }
        }
        out
    }

    pub fn evaluation_count(&self, rule_points: usize) -> u64 {
        self.k * rule_points as u64
    }
}

/// Counts integrand evaluations.
#[derive(Debug, Default)]
pub struct Meter(AtomicU64);

impl Meter {
    pub fn new() -> Self {
        Meter(AtomicU64::new(0))
    }

    pub fn add(&self, k: u64) {
        self.0.fetch_add(k, Ordering::Relaxed);
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.0.store(0, Ordering::Relaxed);
    }
}

/// Composite rule applied to `f`, summed panel by panel in index order.
///
/// Only arithmetic error is enclosed; the discretisation error is bounded
/// separately by [`bound_0s`] and [`bound_st`].
pub fn panel_sum<M, F>(
    f: F,
    layout: &PanelLayout,
    rule: &GaussRule<M>,
    meter: Option<&Meter>,
) -> Result<Ball<M>>
where
    M: Midpoint,
    F: Fn(&Ball<M>) -> Result<Ball<M>>,
{
    let bits = rule.nodes.first().map(|x| x.bits()).unwrap_or(53);
    let d = Ball::<M>::from_rational(&layout.d, bits);
    let mut total = Ball::zero_at(bits);
    for j in 0..layout.k {
        let c = Ball::<M>::from_rational(&layout.center(j), bits);
        let mut panel = Ball::zero_at(bits);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let r = c.add_at(&d.mul_at(x, bits), bits);
            let v = f(&r)?;
            panel = panel.add_at(&w.mul_at(&v, bits), bits);
        }
        if let Some(m) = meter {
            m.add(rule.n() as u64);
        }
        total = total.add_at(&d.mul_at(&panel, bits), bits);
    }
    Ok(total)
}

const BOUND_BITS: u32 = 128;

fn common_factor(d: &Rational, n: u32) -> Mp {
    // pi 2^(-2n-1) d^(2n)
    let pi = Mp::pi(BOUND_BITS);
    let d = Mp::from_rational(d, BOUND_BITS);
    let d2n = d.pow_int_at(2 * n as i32, BOUND_BITS).expect("positive power");
    pi.mul_at(&d2n, BOUND_BITS).mul_2si(-(2 * n as i32) - 1)
}

fn upper(b: &Mp) -> Mp {
    let (_, hi) = b.endpoints_big(BOUND_BITS + 8);
    Mp::from_endpoints(&hi, &hi, BOUND_BITS)
}

/// `pi 2^(-2n-1) d^(2n) e^6 (S + 2d + 1)^2`, rounded up.
pub fn bound_0s(s: &Rational, d: &Rational, n: u32) -> Result<Ball<BigFloat>> {
    if *s <= 0 || *d <= 0 || n == 0 {
        return Err(Error::InvalidParams("bound_0S needs S > 0, d > 0, n >= 1".into()));
    }
    let e6 = Mp::from_f64(6.0, BOUND_BITS).exp();
    let span = (s + Rational::from(2 * d)) + 1u32;
    let span = Mp::from_rational(&span, BOUND_BITS).sqr();
    Ok(upper(&common_factor(d, n).mul_at(&e6, BOUND_BITS).mul_at(&span, BOUND_BITS)))
}

/// Smallest admissible `S` for band limit `n_max`: `0.95 N^(3/2) ln N + 1`.
pub fn s_threshold(n_max: u32) -> f64 {
    let n = n_max as f64;
    0.95 * n.powf(1.5) * n.ln() + 1.0
}

/// Certified `S >= 0.95 N^(3/2) ln N + 1`.
pub fn s_admissible(s: &Rational, n_max: u32) -> bool {
    let b = 128;
    let n = Mp::from_i64(n_max as i64, b);
    let rhs = Mp::from_f64(0.95, b)
        .mul_at(&n.pow_int_at(3, b).expect("cube").sqrt_at(b).expect("positive"), b)
        .mul_at(&n.ln_at(b).expect("positive"), b)
        .add_at(&Mp::one_at(b), b);
    let (_, hi) = rhs.endpoints_exact();
    *s >= hi
}

/// `pi 2^(-2n-1) d^(2n) 3.36^6 / (S - 1 - 2d)`, rounded up.
pub fn bound_st(s: &Rational, t: &Rational, d: &Rational, n: u32, n_max: u32) -> Result<Ball<BigFloat>> {
    if !s_admissible(s, n_max) {
        return Err(Error::ValidityViolation(format!(
            "S = {} is below 0.95 N^(3/2) ln N + 1 = {:.3} for N = {n_max}",
            s.to_f64(),
            s_threshold(n_max)
        )));
    }
    if t <= s {
        return Err(Error::ValidityViolation("bound_ST needs T > S".into()));
    }
    bound_st_formula(s, d, n)
}

/// The `[S, T]` bound formula without the hypothesis on `S`.
pub fn bound_st_formula(s: &Rational, d: &Rational, n: u32) -> Result<Ball<BigFloat>> {
    let gap = Rational::from(s - 1u32) - Rational::from(2 * d);
    if gap <= 0 || *d <= 0 || n == 0 {
        return Err(Error::ValidityViolation("bound_ST needs S - 1 - 2d > 0".into()));
    }
    let c6 = Mp::from_ratio(336, 100, BOUND_BITS).pow_int_at(6, BOUND_BITS)?;
    let gap = Mp::from_rational(&gap, BOUND_BITS);
    let v = common_factor(d, n).mul_at(&c6, BOUND_BITS).div_at(&gap, BOUND_BITS)?;
    Ok(upper(&v))
}

#[cfg(test)]
mod tests;
