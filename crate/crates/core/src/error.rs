use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by a ball whose interval contains zero")]
    DivisionByEnclosedZero,

    #[error("argument outside the domain of {function}: {detail}")]
    DomainViolation { function: &'static str, detail: String },

    #[error("precision must be at least 53 bits, got {0}")]
    InvalidPrecision(u32),

    #[error("could not reach radius {target:e} for J_{order} at precision {bits}")]
    PrecisionExhausted { order: i64, bits: u32, target: f64 },

    #[error("could not isolate the {degree} roots of the Legendre polynomial: {detail}")]
    RootIsolationFailure { degree: usize, detail: String },

    #[error("validity condition violated: {0}")]
    ValidityViolation(String),

    #[error("by-parts majorant cannot be certified: |f|T = {product} < {needed}")]
    NonConvergence { product: f64, needed: f64 },

    #[error("mode key {0:?} has an odd component sum")]
    OddSumKey([i64; 6]),

    #[error("invalid band limit N = {n}: {reason}")]
    InvalidBandLimit { n: u32, reason: String },

    #[error("invalid scheme parameters: {0}")]
    InvalidParams(String),

    #[error("cache {path} is corrupt: {detail}")]
    CacheCorruption { path: PathBuf, detail: String },

    #[error("integral store has no record for orders {0:?}")]
    MissingKey([u32; 6]),

    #[error("symmetric eigensolve failed: {0}")]
    EigensolveFailure(String),

    #[error("block D = {d} is not symmetric within radii at ({i}, {j})")]
    Asymmetric { d: u32, i: usize, j: usize },

    #[error("diagonal entry of row {0:?} encloses zero")]
    ZeroDiagonal([i32; 3]),

    #[error("cannot parse ball from {0:?}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
