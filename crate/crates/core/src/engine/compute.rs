use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;

use super::cache::{CacheLog, IntegralStore};
use super::{ModeKey, SchemeParams};
use crate::ball::{Ball, BigFloat, Midpoint};
use crate::bessel::BesselTable;
use crate::error::{Error, Result};
use crate::quadrature::{legendre_rule, Meter};
use crate::tail::TailContext;

/// Keys handled by one task; consecutive keys share product prefixes.
const CHUNK: usize = 64;
/// Keys computed between two cache appends.
const FLUSH_EVERY: usize = 4096;

/// Arithmetic enclosure of one integral, before the scheme error.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralRecord<M: Midpoint> {
    pub key: ModeKey,
    pub value: Ball<M>,
    pub scheme_hash: String,
}

/// Shared node table, Bessel table and tail integrals for one scheme.
pub struct Engine<M: Midpoint> {
    params: SchemeParams,
    hash: String,
    /// `r_i` on `[0, S]` followed by `[S, T]`.
    nodes: Vec<Ball<BigFloat>>,
    /// `d w_i r_i`
    weights: Vec<Ball<M>>,
    split: usize,
    bessel: BesselTable<M>,
    tail: TailContext<M>,
    meter: Meter,
}

impl<M: Midpoint> Engine<M> {
    /// Builds every table needed for keys with orders up to `max_order`.
    pub fn new(params: &SchemeParams, max_order: u32) -> Result<Self> {
        let bits = params.prec.bits();
        let rule = legendre_rule(params.points, params.prec)?;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut split = 0;
        for (idx, layout) in [params.layout_0s()?, params.layout_st()?].iter().enumerate() {
            for (r, dw) in layout.nodes::<BigFloat>(&rule, bits + 8) {
                let w = dw.mul_at(&r, bits + 8);
                weights.push(w.convert::<M>(bits));
                nodes.push(r.round_to(bits + 8));
            }
            if idx == 0 {
                split = nodes.len();
            }
        }
        let bessel = BesselTable::build(max_order, &nodes, params.prec)?;
        let tail = TailContext::new(&params.t, params.prec)?;
        Ok(Engine {
            params: params.clone(),
            hash: params.hash(),
            nodes,
            weights,
            split,
            bessel,
            tail,
            meter: Meter::new(),
        })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn max_order(&self) -> u32 {
        self.bessel.max_order()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Ball<BigFloat>] {
        &self.nodes
    }

    pub fn bessel(&self) -> &BesselTable<M> {
        &self.bessel
    }

    pub fn tail_context(&self) -> &TailContext<M> {
        &self.tail
    }

    /// Integrand evaluations performed so far.
    pub fn evaluations(&self) -> u64 {
        self.meter.get()
    }

    fn check_orders(&self, orders: &[u32; 6]) -> Result<()> {
        if orders[5] > self.bessel.max_order() {
            return Err(Error::InvalidParams(format!(
                "order {} exceeds the table maximum {}",
                orders[5],
                self.bessel.max_order()
            )));
        }
        Ok(())
    }

    /// Enclosure of `I_key` without the scheme error, sign applied.
    pub fn compute_integral(&self, key: &ModeKey) -> Result<IntegralRecord<M>> {
        self.check_orders(&key.orders)?;
        let mut v = self.compute_sorted(&[key.orders]).pop().expect("one key");
        if key.sign < 0 {
            v = v.neg();
        }
        Ok(IntegralRecord {
            key: *key,
            value: v,
            scheme_hash: self.hash.clone(),
        })
    }

    /// Values for sorted canonical orders. Each product is formed as
    /// `((((w J_o1) J_o2) J_o3) J_o4) J_o5) J_o6` whatever the neighbours
    /// are, so results do not depend on how keys are grouped.
    fn compute_sorted(&self, keys: &[[u32; 6]]) -> Vec<Ball<M>> {
        let bits = self.params.prec.bits();
        let n = self.nodes.len();
        let mut levels: Vec<Vec<Ball<M>>> = (0..5).map(|_| Vec::with_capacity(n)).collect();
        let mut prefix: Option<[u32; 5]> = None;
        let mut out = Vec::with_capacity(keys.len());
        for k in keys {
            let start = match prefix {
                Some(p) => (0..5).find(|&j| p[j] != k[j]).unwrap_or(5),
                None => 0,
            };
            for lvl in start..5 {
                let row = self.bessel.order(k[lvl]);
                let (done, rest) = levels.split_at_mut(lvl);
                let prev: &[Ball<M>] = if lvl == 0 { &self.weights } else { &done[lvl - 1] };
                let cur = &mut rest[0];
                cur.clear();
                cur.extend(prev.iter().zip(row).map(|(a, b)| a.mul_at(b, bits)));
            }
            prefix = Some([k[0], k[1], k[2], k[3], k[4]]);

            let last = self.bessel.order(k[5]);
            let top = &levels[4];
            let mut s0 = Ball::<M>::zero_at(bits);
            for i in 0..self.split {
                s0 = s0.add_at(&top[i].mul_at(&last[i], bits), bits);
            }
            let mut s1 = Ball::<M>::zero_at(bits);
            for i in self.split..n {
                s1 = s1.add_at(&top[i].mul_at(&last[i], bits), bits);
            }
            let signed = [k[0] as i64, k[1] as i64, k[2] as i64, k[3] as i64, k[4] as i64, k[5] as i64];
            let tail = self.tail.tail_for_orders(&signed);
            out.push(s0.add_at(&s1, bits).add_at(&tail, bits));
            self.meter.add(n as u64);
        }
        out
    }

    /// Values for `keys` (canonical orders), in the given order, using a
    /// pool of `workers` threads.
    pub fn compute_many(&self, keys: &[[u32; 6]], workers: usize) -> Result<Vec<Ball<M>>> {
        for k in keys {
            self.check_orders(k)?;
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;
        Ok(pool.install(|| {
            keys.par_chunks(CHUNK)
                .map(|c| self.compute_sorted(c))
                .collect::<Vec<_>>()
                .into_iter()
                .flatten()
                .collect()
        }))
    }

    /// Resolves every key from the cache or by computation.
    pub fn batch(
        &self,
        keys: &[ModeKey],
        cache: Option<&Path>,
        workers: usize,
    ) -> Result<BatchOutcome<M>> {
        batch_inner(&self.params, keys, cache, workers, Some(self))
    }
}

/// Result of [`batch_compute`].
#[derive(Debug)]
pub struct BatchOutcome<M: Midpoint> {
    pub store: IntegralStore<M>,
    pub from_cache: usize,
    pub computed: usize,
    pub evaluations: u64,
}

/// Resolves every key from the cache at `cache` (if given) or by
/// computation; tables are only built when something is missing.
pub fn batch_compute<M: Midpoint>(
    keys: &[ModeKey],
    params: &SchemeParams,
    cache: Option<&Path>,
    workers: usize,
) -> Result<BatchOutcome<M>> {
    batch_inner(params, keys, cache, workers, None)
}

fn batch_inner<M: Midpoint>(
    params: &SchemeParams,
    keys: &[ModeKey],
    cache: Option<&Path>,
    workers: usize,
    engine: Option<&Engine<M>>,
) -> Result<BatchOutcome<M>> {
    let hash = params.hash();
    let bits = params.prec.bits();
    let mut wanted: Vec<[u32; 6]> = keys.iter().map(|k| k.orders).collect();
    wanted.sort_unstable();
    wanted.dedup();

    let mut store = IntegralStore::new(hash.clone());
    if wanted.is_empty() {
        return Ok(BatchOutcome { store, from_cache: 0, computed: 0, evaluations: 0 });
    }
    let mut log = match cache {
        Some(path) => Some(CacheLog::<M>::open(path, &hash, bits)?),
        None => None,
    };
    let mut missing = Vec::new();
    let mut from_cache = 0;
    for k in &wanted {
        match log.as_ref().and_then(|l| l.get(k)) {
            Some(v) => {
                store.insert(*k, v.clone());
                from_cache += 1;
            }
            None => missing.push(*k),
        }
    }
    if missing.is_empty() {
        return Ok(BatchOutcome { store, from_cache, computed: 0, evaluations: 0 });
    }

    let owned;
    let engine = match engine {
        Some(e) => e,
        None => {
            let max_order = missing.iter().map(|k| k[5]).max().unwrap_or(0);
            owned = Engine::<M>::new(params, max_order)?;
            &owned
        }
    };
    let before = engine.evaluations();
    let total = wanted.len();
    let mut done = from_cache;
    for block in missing.chunks(FLUSH_EVERY) {
        let values = engine.compute_many(block, workers)?;
        for (k, v) in block.iter().zip(&values) {
            if v.mid_f64().abs() > 10.0 {
                eprintln!("warning: |I{:?}| = {} exceeds the sanity bound 10", k, v.mid_f64());
            }
        }
        if let Some(l) = log.as_mut() {
            l.append(block, &values)?;
        }
        for (k, v) in block.iter().zip(values) {
            store.insert(*k, v);
        }
        done += block.len();
        eprintln!("integrals {done} / {total}");
        std::io::stderr().flush().ok();
    }
    Ok(BatchOutcome {
        store,
        from_cache,
        computed: missing.len(),
        evaluations: engine.evaluations() - before,
    })
}
