//! Bessel functions `J_n` of integer order on the nonnegative real axis.
//!
//! Small arguments use the power series with an alternating-tail bound;
//! large arguments use the Hankel expansion, whose remainders for real order
//! and positive argument are bounded by the first neglected term once enough
//! terms are taken.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;
use rug::float::Round;
use rug::{Float, Integer};

use crate::ball::{Ball, BigFloat, Midpoint, Precision};
use crate::error::{Error, Result};

type Mp = Ball<BigFloat>;

/// Arguments at or beyond this use the Hankel expansion first.
const HANKEL_FROM: f64 = 40.0;
const RETRIES: u32 = 3;

/// Radius every point evaluation must reach at precision `bits`.
pub fn target_radius(bits: u32) -> f64 {
    (2f64).powi(-(bits as i32 - 20))
}

/// Enclosure of `J_n` over the interval of `x`.
pub fn bessel_j<M: Midpoint>(n: i64, x: &Ball<M>, p: Precision) -> Result<Ball<M>> {
    let bits = p.bits();
    let (lo, _) = x.endpoints_big(64);
    if lo < 0 {
        return Err(Error::DomainViolation {
            function: "bessel_j",
            detail: format!("argument interval reaches {}", lo.to_f64()),
        });
    }
    let xm = x.mid().to_big();
    let v = bessel_point(n.unsigned_abs() as u32, &xm, bits)?;
    // |J_n'| <= 1 on the real line
    let v = v.add_error(x.rad());
    let v = if n < 0 && n % 2 != 0 { v.neg() } else { v };
    Ok(v.convert(bits))
}

/// `J_n(x)` at an exact nonnegative point, to radius [`target_radius`].
pub fn bessel_point(n: u32, x: &Float, bits: u32) -> Result<Mp> {
    let row = RowContext::new(x, bits);
    row.eval(n)
}

/// `J_0(x), ..., J_k(x)` at one exact point.
pub fn bessel_row(k: u32, x: &Float, bits: u32) -> Result<Vec<Mp>> {
    let row = RowContext::new(x, bits);
    (0..=k).map(|n| row.eval(n)).collect()
}

/// Quantities shared by all orders at one argument.
struct RowContext<'a> {
    x: &'a Float,
    bits: u32,
    hankel: Option<HankelShared>,
}

struct HankelShared {
    work: u32,
    /// sqrt(2 / (pi x))
    scale: Mp,
    /// cos(x - pi/4), sin(x - pi/4)
    c: Mp,
    s: Mp,
}

impl<'a> RowContext<'a> {
    fn new(x: &'a Float, bits: u32) -> Self {
        let hankel = if x.to_f64() >= HANKEL_FROM {
            let work = bits + 40;
            let xb = Mp::from_big(x, work);
            let pi = Mp::pi(work);
            let scale = Mp::from_f64(2.0, work)
                .div_at(&pi.mul_at(&xb, work), work)
                .and_then(|v| v.sqrt_at(work))
                .expect("positive argument");
            let (sd, _) = Float::with_val_round(work, x.sin_ref(), Round::Down);
            let (su, _) = Float::with_val_round(work, x.sin_ref(), Round::Up);
            let (cd, _) = Float::with_val_round(work, x.cos_ref(), Round::Down);
            let (cu, _) = Float::with_val_round(work, x.cos_ref(), Round::Up);
            let sin_x = Mp::from_endpoints(&sd, &su, work);
            let cos_x = Mp::from_endpoints(&cd, &cu, work);
            let root_half = Mp::from_f64(0.5, work).sqrt_at(work).expect("positive");
            let c = cos_x.add_at(&sin_x, work).mul_at(&root_half, work);
            let s = sin_x.sub_at(&cos_x, work).mul_at(&root_half, work);
            Some(HankelShared { work, scale, c, s })
        } else {
            None
        };
        RowContext { x, bits, hankel }
    }

    fn eval(&self, n: u32) -> Result<Mp> {
        if self.x.is_zero() {
            return Ok(if n == 0 { Mp::one_at(self.bits) } else { Mp::zero_at(self.bits) });
        }
        let target = target_radius(self.bits);
        if let Some(h) = &self.hankel {
            if let Some(v) = hankel(n, self.x, h, target) {
                if v.rad() <= target {
                    return Ok(v.round_to(self.bits));
                }
            }
        }
        let mut extra = 0;
        let mut best = f64::INFINITY;
        for _ in 0..=RETRIES {
            let v = series(n, self.x, self.bits + extra, target);
            if v.rad() <= target {
                return Ok(v.round_to(self.bits));
            }
            best = best.min(v.rad());
            extra += 64;
        }
        Err(Error::PrecisionExhausted {
            order: n as i64,
            bits: self.bits,
            target: best,
        })
    }
}

/// Power series `sum (-1)^m (x/2)^(2m+n) / (m! (m+n)!)`.
fn series(n: u32, x: &Float, bits: u32, target: f64) -> Mp {
    let xf = x.to_f64();
    let work = bits + 32 + (1.45 * xf).ceil() as u32 + 2 * (n + 1).ilog2();
    let mut h = Float::with_val(work, x);
    h >>= 1u32;
    let h = Mp::from_big(&h, work);
    let h2 = h.sqr();
    let h2_up = h2.upper_f64();
    let fact = Integer::from(Integer::factorial(n));
    let fact = Mp::from_big(&Float::with_val(work.max(fact.significant_bits() + 2), &fact), work);
    let mut t = h
        .pow_int_at(n as i32, work)
        .expect("nonnegative power")
        .div_at(&fact, work)
        .expect("positive factorial");
    let mut sum = Mp::zero_at(work);
    let mut m: u64 = 0;
    loop {
        let denom = ((m + 1) * (m + 1 + n as u64)) as f64;
        if h2_up < denom && t.mag_up() <= target / 8.0 {
            return sum.add_error(t.mag_up());
        }
        sum = sum.add_at(&t, work);
        let step = h2
            .div_at(&Mp::from_i64(((m + 1) * (m + 1 + n as u64)) as i64, work), work)
            .expect("positive denominator");
        t = t.mul_at(&step, work).neg();
        m += 1;
    }
}

/// Hankel expansion, or `None` when the terms stop decreasing too early.
fn hankel(n: u32, x: &Float, h: &HankelShared, target: f64) -> Option<Mp> {
    let work = h.work;
    let xb = Mp::from_big(x, work);
    let mu = 4 * (n as i64) * (n as i64);
    let tol = target / 16.0;
    let max_terms = (4.0 * x.to_f64()) as u64 + 2 * n as u64 + 100;

    let mut p = Mp::zero_at(work);
    let mut q = Mp::zero_at(work);
    let mut u = Mp::one_at(work);
    let mut k: u64 = 0;
    let mut prev_mag = f64::INFINITY;
    loop {
        // next term u_{k+1}
        let odd = (2 * k + 1) as i64;
        let next = u
            .mul_at(&Mp::from_i64(mu - odd * odd, work), work)
            .div_at(&xb.mul_i64(8 * (k as i64 + 1)), work)
            .ok()?;
        // u is u_k with k even: P takes u_k, Q takes u_{k+1}
        let ell = k / 2;
        if k.is_multiple_of(2)
            && 2 * ell >= n as u64
            && u.mag_up() <= tol
            && next.mag_up() <= tol
        {
            p = p.add_error(u.mag_up());
            q = q.add_error(next.mag_up());
            break;
        }
        let sign = if (k / 2).is_multiple_of(2) { 1 } else { -1 };
        let term = if sign > 0 { u.clone() } else { u.neg() };
        if k.is_multiple_of(2) {
            p = p.add_at(&term, work);
        } else {
            q = q.add_at(&term, work);
        }
        let mag = next.mag_up();
        if k > n as u64 + 2 && mag > prev_mag && mag > tol {
            return None;
        }
        if k > max_terms {
            return None;
        }
        prev_mag = mag;
        u = next;
        k += 1;
    }

    // omega = x - pi/4 - n pi/2
    let (cw, sw) = match n % 4 {
        0 => (h.c.clone(), h.s.clone()),
        1 => (h.s.clone(), h.c.neg()),
        2 => (h.c.neg(), h.s.neg()),
        _ => (h.s.neg(), h.c.clone()),
    };
    let inner = p.mul_at(&cw, work).sub_at(&q.mul_at(&sw, work), work);
    Some(h.scale.mul_at(&inner, work))
}

/// `J_o(x_i)` for all orders `0..=K` and nodes `x_i`, stored order-major.
#[derive(Debug, Clone)]
pub struct BesselTable<M: Midpoint> {
    max_order: u32,
    n_nodes: usize,
    values: Vec<Vec<Ball<M>>>,
}

impl<M: Midpoint> BesselTable<M> {
    /// Evaluates every column independently; the result does not depend on
    /// the number of threads.
    pub fn build(max_order: u32, nodes: &[Ball<BigFloat>], p: Precision) -> Result<Self> {
        let bits = p.bits();
        let columns: Vec<Vec<Ball<M>>> = nodes
            .par_iter()
            .map(|x| {
                let (lo, _) = x.endpoints_big(64);
                if lo < 0 {
                    return Err(Error::DomainViolation {
                        function: "bessel_table",
                        detail: format!("node interval reaches {}", lo.to_f64()),
                    });
                }
                let xm = x.mid().to_big();
                let row = bessel_row(max_order, &xm, bits)?;
                Ok(row.into_iter().map(|v| v.add_error(x.rad()).convert(bits)).collect())
            })
            .collect::<Result<_>>()?;
        let mut values: Vec<Vec<Ball<M>>> =
            (0..=max_order).map(|_| Vec::with_capacity(nodes.len())).collect();
        for col in columns {
            for (o, v) in col.into_iter().enumerate() {
                values[o].push(v);
            }
        }
        Ok(BesselTable {
            max_order,
            n_nodes: nodes.len(),
            values,
        })
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    /// `J_order` at every node.
    pub fn order(&self, order: u32) -> &[Ball<M>] {
        &self.values[order as usize]
    }

    pub fn get(&self, order: u32, node: usize) -> &Ball<M> {
        &self.values[order as usize][node]
    }

    /// Writes a header line carrying `key`, then one ball per line,
    /// order by order.
    pub fn save(&self, path: &Path, key: &str) -> Result<()> {
        let tmp = path.with_extension("tmp");
        {
            let mut w = std::io::BufWriter::new(fs::File::create(&tmp)?);
            writeln!(
                w,
                "bandcert-bessel-table key={key} kind={} orders={} nodes={}",
                M::KIND,
                self.max_order + 1,
                self.n_nodes
            )?;
            for row in &self.values {
                for v in row {
                    writeln!(w, "{}", v.to_decimal())?;
                }
            }
            w.flush()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Loads a table saved under the same key, or `None` if the file is
    /// missing or belongs to another configuration.
    pub fn load(path: &Path, key: &str, bits: u32) -> Result<Option<Self>> {
        let file = match fs::File::open(path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let mut lines = BufReader::new(file).lines();
        let header = match lines.next() {
            Some(h) => h?,
            None => return Ok(None),
        };
        let mut fields = header.split_whitespace();
        if fields.next() != Some("bandcert-bessel-table") {
            return Ok(None);
        }
        let mut orders = 0usize;
        let mut n_nodes = 0usize;
        for f in fields {
            match f.split_once('=') {
                Some(("key", k)) if k != key => return Ok(None),
                Some(("kind", k)) if k != M::KIND => return Ok(None),
                Some(("orders", v)) => orders = v.parse().map_err(|_| corrupt(path, "orders"))?,
                Some(("nodes", v)) => n_nodes = v.parse().map_err(|_| corrupt(path, "nodes"))?,
                _ => {}
            }
        }
        if orders == 0 {
            return Err(corrupt(path, "empty table"));
        }
        let mut values = Vec::with_capacity(orders);
        for _ in 0..orders {
            let mut row = Vec::with_capacity(n_nodes);
            for _ in 0..n_nodes {
                let line = lines.next().ok_or_else(|| corrupt(path, "truncated"))??;
                row.push(Ball::parse_decimal(&line, bits)?);
            }
            values.push(row);
        }
        Ok(Some(BesselTable {
            max_order: orders as u32 - 1,
            n_nodes,
            values,
        }))
    }
}

fn corrupt(path: &Path, detail: &str) -> Error {
    Error::CacheCorruption {
        path: path.to_path_buf(),
        detail: detail.to_string(),
    }
}
