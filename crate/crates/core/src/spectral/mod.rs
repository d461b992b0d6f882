//! Index sets, Q-block assembly and certified smallest eigenvalues.

mod analysis;
mod eig;

pub use analysis::{diag_ratio, disc_block, hexagon_block, midpoint_spectrum, HexagonBlock, Spectrum};
pub use eig::min_eig;

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;

use crate::ball::{Ball, BigFloat, Midpoint};
use crate::engine::{canonical_key, error_budget, IntegralStore, Mode, ModeKey, SchemeParams};
use crate::error::{Error, Result};

/// Even triple `(m1, m2, m3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple(pub [i32; 3]);

impl Triple {
    pub fn sum(&self) -> i32 {
        self.0.iter().sum()
    }

    pub fn norm_sq(&self) -> i64 {
        self.0.iter().map(|&x| (x as i64) * (x as i64)).sum()
    }

    pub fn permuted(&self, p: &[usize; 3]) -> Triple {
        Triple([self.0[p[0]], self.0[p[1]], self.0[p[2]]])
    }

    pub fn sorted(&self) -> Triple {
        let mut m = self.0;
        m.sort_unstable();
        Triple(m)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// The six elements of `S_3` as index maps.
pub const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// The six distinct permutations of `(1, -1, 0)`.
const SHIFTS: [[i64; 3]; 6] = [[1, -1, 0], [1, 0, -1], [-1, 1, 0], [0, 1, -1], [-1, 0, 1], [0, -1, 1]];

/// Even block labels `0, 2, ..., 3N`.
pub fn block_labels(n: u32) -> Vec<i32> {
    (0..=3 * n as i32).step_by(2).collect()
}

/// Sorted even triples summing to `d` with entries in `[-N, N]`, excluding
/// the zero triple, in lexicographic order.
pub fn enumerate_x_d(n: u32, d: i32) -> Vec<Triple> {
    let n = n as i32;
    let mut out = Vec::new();
    if d % 2 != 0 {
        return out;
    }
    for m1 in (-n..=n).step_by(2) {
        if m1 % 2 != 0 {
            continue;
        }
        for m2 in (m1..=n).step_by(2) {
            let m3 = d - m1 - m2;
            if m3 < m2 || m3 > n {
                continue;
            }
            if m1 == 0 && m2 == 0 && m3 == 0 {
                continue;
            }
            out.push(Triple([m1, m2, m3]));
        }
    }
    out
}

/// Number of distinct permutations of `m`.
pub fn multiplicity(m: &Triple) -> u32 {
    let [a, b, c] = m.sorted().0;
    if a == c {
        1
    } else if a == b || b == c {
        3
    } else {
        6
    }
}

fn concat(a: [i64; 3], b: [i64; 3]) -> [i64; 6] {
    [a[0], a[1], a[2], b[0], b[1], b[2]]
}

fn widen(m: &Triple) -> [i64; 3] {
    [m.0[0] as i64, m.0[1] as i64, m.0[2] as i64]
}

/// Signed integral indices entering `Q_{m,n}`, with their weights before
/// the factor `1/6`: `R` terms positive, `L` terms negative.
pub fn entry_terms(m: &Triple, n: &Triple) -> Vec<([i64; 6], i64)> {
    let mv = widen(m);
    let mut out = Vec::with_capacity(96);
    for p in &PERMUTATIONS {
        let ns = widen(&n.permuted(p));
        let diff = [mv[0] - ns[0], mv[1] - ns[1], mv[2] - ns[2]];
        let neg = [-ns[0], -ns[1], -ns[2]];
        out.push((concat(diff, [0, 0, 0]), 2));
        for s in &SHIFTS {
            out.push((concat(diff, *s), 1));
        }
        out.push((concat(mv, neg), -2));
        for s in &SHIFTS {
            out.push((concat(mv, [neg[0] + s[0], neg[1] + s[1], neg[2] + s[2]]), -1));
        }
    }
    out
}

/// Every canonical key needed to assemble all blocks at band limit `n`,
/// sorted by orders.
pub fn required_keys(n: u32) -> Vec<ModeKey> {
    required_keys_for(n, &block_labels(n))
}

/// Keys needed for the given blocks only.
pub fn required_keys_for(n: u32, blocks: &[i32]) -> Vec<ModeKey> {
    let per_block: Vec<HashSet<[u32; 6]>> = blocks
        .par_iter()
        .map(|&d| {
            let x = enumerate_x_d(n, d);
            let mut set = HashSet::new();
            for m in &x {
                for q in &x {
                    for (k, _) in entry_terms(m, q) {
                        set.insert(canonical_key(&k).expect("even sums").orders);
                    }
                }
            }
            set
        })
        .collect();
    let mut all: HashSet<[u32; 6]> = HashSet::new();
    for s in per_block {
        all.extend(s);
    }
    let mut keys: Vec<ModeKey> = all.into_iter().map(ModeKey::unsigned).collect();
    keys.sort_unstable();
    keys
}

/// `Q_{m,n}` from stored integral enclosures.
pub fn q_entry<M: Midpoint>(m: &Triple, n: &Triple, store: &IntegralStore<M>, bits: u32) -> Result<Ball<M>> {
    let mut acc = Ball::<M>::zero_at(bits);
    for (k, w) in entry_terms(m, n) {
        let v = store.value_signed(&k)?;
        acc = acc.add_at(&v.mul_i64(w), bits);
    }
    acc.div_i64(6)
}

/// One symmetric Q-block.
#[derive(Debug, Clone)]
pub struct BlockMatrix<M: Midpoint> {
    pub d: i32,
    pub index: Vec<Triple>,
    /// Row-major, `dim * dim`.
    entries: Vec<Ball<M>>,
    /// Bound on the scheme error of every entry.
    pub scheme_eps: Ball<BigFloat>,
}

impl<M: Midpoint> BlockMatrix<M> {
    /// Builds a block from a full matrix; `entries.len()` must be `dim^2`.
    pub fn from_entries(d: i32, index: Vec<Triple>, entries: Vec<Ball<M>>, scheme_eps: Ball<BigFloat>) -> Self {
        assert_eq!(entries.len(), index.len() * index.len());
        BlockMatrix { d, index, entries, scheme_eps }
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Ball<M> {
        &self.entries[i * self.dim() + j]
    }

    pub fn position(&self, m: &Triple) -> Option<usize> {
        self.index.binary_search(m).ok()
    }

    /// Midpoint matrix rounded to doubles.
    pub fn mid_matrix(&self) -> nalgebra::DMatrix<f64> {
        let n = self.dim();
        nalgebra::DMatrix::from_fn(n, n, |i, j| self.get(i, j).mid_f64())
    }

    /// Largest row sum of the radius matrix, an upper bound on the
    /// operator norm of the arithmetic uncertainty.
    pub fn radius_norm(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = Ball::<f64>::zero_at(53);
                for j in 0..n {
                    s = s.add_at(&Ball::from_f64(self.get(i, j).rad(), 53), 53);
                }
                s.upper_f64()
            })
            .fold(0.0, f64::max)
    }
}

/// Assembles block `d`; `scheme_error` bounds the error of one integral.
///
/// The exact matrix is symmetric, but `(i, j)` and `(j, i)` use different
/// integrals, so the approximations agree only up to the scheme error.
/// Fails with [`Error::Asymmetric`] when the two enclosures, each widened by
/// `16 * scheme_error`, are disjoint; otherwise stores the symmetric part,
/// which is still within `16 * scheme_error` of the exact entry.
pub fn assemble_block<M: Midpoint>(
    n: u32,
    d: i32,
    store: &IntegralStore<M>,
    scheme_error: &Ball<BigFloat>,
    bits: u32,
) -> Result<BlockMatrix<M>> {
    let index = enumerate_x_d(n, d);
    let dim = index.len();
    let mut raw = Vec::with_capacity(dim * dim);
    for m in &index {
        for q in &index {
            raw.push(q_entry(m, q, store, bits)?);
        }
    }
    let scheme_eps = scheme_error.mul_i64(16);
    let slack = (2.0 * scheme_eps.upper_f64()).next_up();
    let mut entries = raw.clone();
    for i in 0..dim {
        for j in i + 1..dim {
            let (a, b) = (&raw[i * dim + j], &raw[j * dim + i]);
            if !a.add_error(slack).overlaps(b) {
                return Err(Error::Asymmetric { d: d as u32, i, j });
            }
            let s = a.add_at(b, bits).mul_2si(-1);
            entries[i * dim + j] = s.clone();
            entries[j * dim + i] = s;
        }
    }
    Ok(BlockMatrix {
        d,
        index,
        entries,
        scheme_eps,
    })
}

/// Outcome for one block.
#[derive(Debug, Clone)]
pub struct BlockRecord<M: Midpoint> {
    pub d: i32,
    pub dim: usize,
    pub lambda_min: Ball<M>,
    /// `dim * 16 * scheme_error`
    pub op_norm_err: Ball<BigFloat>,
    /// Row-sum bound on the arithmetic radii, for diagnostics.
    pub radius_norm: f64,
    pub pass: bool,
}

/// Positive-definiteness certificate for all blocks at one band limit.
#[derive(Debug, Clone)]
pub struct Certificate<M: Midpoint> {
    pub n: u32,
    pub scheme_hash: String,
    pub scheme_error: Ball<BigFloat>,
    /// `false` when the error budget hypotheses do not hold.
    pub budget_valid: bool,
    pub blocks: Vec<BlockRecord<M>>,
    pub pass: bool,
}

fn verdict(lambda: &Ball<BigFloat>, op: &Ball<BigFloat>) -> bool {
    let (lo, _) = lambda.endpoints_big(lambda.bits() + 8);
    let (_, hi) = op.endpoints_big(op.bits() + 8);
    lo > hi
}

/// Decides one block: passes iff the certified lower bound on the
/// smallest eigenvalue exceeds `op_norm_err`.
pub fn block_verdict<M: Midpoint>(lambda_min: &Ball<M>, op_norm_err: &Ball<BigFloat>) -> bool {
    verdict(&lambda_min.to_big_ball(), op_norm_err)
}

/// Assembles every block, encloses its smallest eigenvalue and compares
/// it with the operator-norm bound of the scheme error.
pub fn certify<M: Midpoint>(params: &SchemeParams, store: &IntegralStore<M>, workers: usize) -> Result<Certificate<M>> {
    let budget = error_budget(params)?;
    let valid = budget.valid && params.mode == Mode::Certified;
    let eps = budget.total;
    let bits = params.prec.bits();
    let n = params.n;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;
    let blocks: Vec<BlockRecord<M>> = pool.install(|| {
        block_labels(n)
            .par_iter()
            .map(|&d| {
                let b = assemble_block(n, d, store, &eps, bits)?;
                let lambda_min = min_eig(&b)?;
                let op_norm_err = b.scheme_eps.mul_i64(b.dim() as i64);
                let pass = block_verdict(&lambda_min, &op_norm_err);
                Ok(BlockRecord {
                    d,
                    dim: b.dim(),
                    radius_norm: b.radius_norm(),
                    lambda_min,
                    op_norm_err,
                    pass,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let pass = valid && blocks.iter().all(|b| b.pass);
    Ok(Certificate {
        n,
        scheme_hash: params.hash(),
        scheme_error: eps,
        budget_valid: valid,
        blocks,
        pass,
    })
}

fn split_decimal<M: Midpoint>(b: &Ball<M>) -> (String, String) {
    let s = b.to_decimal();
    match s.split_once(" ± ") {
        Some((m, r)) => (m.to_string(), r.to_string()),
        None => (s, "0".into()),
    }
}

impl<M: Midpoint> Certificate<M> {
    /// Block with the smallest eigenvalue midpoint.
    pub fn minimal_block(&self) -> Option<&BlockRecord<M>> {
        self.blocks
            .iter()
            .min_by(|a, b| a.lambda_min.mid_f64().total_cmp(&b.lambda_min.mid_f64()))
    }

    /// `true` when the smallest eigenvalue sits in block `D = 0`.
    pub fn minimum_at_zero(&self) -> bool {
        self.minimal_block().is_some_and(|b| b.d == 0)
    }

    /// Whitespace-separated `D dim lambda_mid lambda_rad op_norm_err verdict`.
    pub fn table(&self) -> String {
        let mut s = String::from("# D dim lambda_min_mid lambda_min_rad op_norm_err verdict\n");
        for b in &self.blocks {
            let (m, r) = split_decimal(&b.lambda_min);
            s += &format!(
                "{} {} {} {} {:.6e} {}\n",
                b.d,
                b.dim,
                m,
                r,
                b.op_norm_err.upper_f64(),
                if b.pass { "pass" } else { "fail" }
            );
        }
        s
    }

    /// Human-readable summary.
    pub fn report(&self) -> String {
        let mut s = format!(
            "band limit N = {}\nscheme {}\nscheme error per integral <= {:.6e}\nper-entry error 16 eps <= {:.6e}\nerror budget {}\nblocks {}\n",
            self.n,
            self.scheme_hash,
            self.scheme_error.upper_f64(),
            self.scheme_error.mul_i64(16).upper_f64(),
            if self.budget_valid { "valid" } else { "NOT valid (exploratory)" },
            self.blocks.len()
        );
        for b in &self.blocks {
            s += &format!(
                "D = {:4}  dim {:5}  lambda_min >= {:.10e}  op_norm_err <= {:.6e}  radius_norm {:.3e}  {}\n",
                b.d,
                b.dim,
                b.lambda_min.lower_f64(),
                b.op_norm_err.upper_f64(),
                b.radius_norm,
                if b.pass { "pass" } else { "FAIL" }
            );
        }
        if let Some(b) = self.minimal_block() {
            s += &format!("smallest eigenvalue in block D = {}: {}\n", b.d, b.lambda_min.to_decimal());
        }
        if !self.minimum_at_zero() {
            s += "warning: the smallest eigenvalue is not attained at D = 0\n";
        }
        s += &format!("verdict: {}\n", if self.pass { "PASS" } else { "FAIL" });
        s
    }
}

#[cfg(test)]
mod tests;
