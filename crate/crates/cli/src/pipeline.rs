use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use bandcert::engine::{batch_compute, error_budget, BatchOutcome, IntegralStore, SchemeParams};
use bandcert::spectral::{assemble_block, block_labels, certify, required_keys_for, BlockMatrix, Certificate};
use bandcert::{Ball, BigFloat, Midpoint};

use crate::config::RunConfig;
use crate::Result;

/// Resolves every integral needed by `blocks`, from the cache when possible.
pub fn compute_store<M: Midpoint>(cfg: &RunConfig, params: &SchemeParams, blocks: &[i32]) -> Result<BatchOutcome<M>> {
    let keys = required_keys_for(params.n, blocks);
    Ok(batch_compute::<M>(&keys, params, cfg.cache.as_deref(), cfg.workers)?)
}

/// Report and table paths of the certificate for `cfg`.
pub fn certificate_paths(cfg: &RunConfig) -> (PathBuf, PathBuf) {
    (
        cfg.out.join(format!("certificate_N{}.txt", cfg.n)),
        cfg.out.join(format!("certificate_N{}.dat", cfg.n)),
    )
}

/// Full pipeline: integrals, blocks, eigenvalue enclosures, verdict. Writes
/// the report and the table into `cfg.out`.
pub fn run_certify<M: Midpoint>(cfg: &RunConfig) -> Result<Certificate<M>> {
    let params = cfg.params()?;
    let outcome = compute_store::<M>(cfg, &params, &block_labels(params.n))?;
    let cert = certify(&params, &outcome.store, cfg.workers)?;
    fs::create_dir_all(&cfg.out)?;
    let (report, table) = certificate_paths(cfg);
    fs::write(report, format!("{}{}", params.report(), cert.report()))?;
    fs::write(table, cert.table())?;
    Ok(cert)
}

/// Lazily assembled blocks over one integral store.
pub struct Blocks<M: Midpoint> {
    pub params: SchemeParams,
    pub store: IntegralStore<M>,
    eps: Ball<BigFloat>,
    built: BTreeMap<i32, BlockMatrix<M>>,
}

impl<M: Midpoint> Blocks<M> {
    pub fn new(params: SchemeParams, store: IntegralStore<M>) -> Result<Self> {
        let eps = error_budget(&params)?.total;
        Ok(Blocks {
            params,
            store,
            eps,
            built: BTreeMap::new(),
        })
    }

    /// Computes the integrals for `blocks` and wraps them.
    pub fn compute(cfg: &RunConfig, blocks: &[i32]) -> Result<Self> {
        let params = cfg.params()?;
        let outcome = compute_store::<M>(cfg, &params, blocks)?;
        Blocks::new(params, outcome.store)
    }

    pub fn block(&mut self, d: i32) -> Result<&BlockMatrix<M>> {
        if !self.built.contains_key(&d) {
            let b = assemble_block(self.params.n, d, &self.store, &self.eps, self.params.prec.bits())?;
            self.built.insert(d, b);
        }
        Ok(&self.built[&d])
    }
}
