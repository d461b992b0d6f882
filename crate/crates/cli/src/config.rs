use std::path::PathBuf;

use bandcert::engine::{scheme_params, Mode, Overrides, SchemeParams};
use rug::{Integer, Rational};

use crate::{AnalysisError, Result};

/// Everything a subcommand needs to run the pipeline.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: u32,
    pub mode: Mode,
    pub overrides: Overrides,
    /// Integral cache for band limit `n`.
    pub cache: Option<PathBuf>,
    pub workers: usize,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn new(n: u32, mode: Mode) -> Self {
        RunConfig {
            n,
            mode,
            overrides: Overrides::default(),
            cache: None,
            workers: default_workers(),
            out: PathBuf::from("."),
        }
    }

    pub fn params(&self) -> Result<SchemeParams> {
        scheme_params(self.n, self.mode, &self.overrides).map_err(|e| match e {
            bandcert::Error::InvalidBandLimit { .. } | bandcert::Error::ValidityViolation(_) => {
                AnalysisError::Usage(e.to_string())
            }
            e => e.into(),
        })
    }

    /// Same settings at another band limit; the cache file gets a suffix so
    /// that schemes do not overwrite each other.
    pub fn with_n(&self, n: u32) -> RunConfig {
        let mut c = self.clone();
        if n != self.n {
            c.n = n;
            c.cache = self.cache.as_ref().map(|p| {
                let mut s = p.clone().into_os_string();
                s.push(format!(".N{n}"));
                PathBuf::from(s)
            });
        }
        c
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Parses `3`, `-7/4` or the exact decimal `0.25`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || AnalysisError::Usage(format!("cannot parse `{s}` as a rational number"));
    if t.contains('/') {
        return Rational::from_str_radix(t, 10).map_err(|_| bad());
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num = Integer::from_str_radix(&digits, 10).map_err(|_| bad())?;
    let den = Integer::from(Integer::u_pow_u(10, frac.len() as u32));
    let q = Rational::from((num, den));
    Ok(if neg { -q } else { q })
}

/// Parses a comma-separated list of band limits.
pub fn parse_n_list(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| AnalysisError::Usage(format!("bad band limit `{x}`"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("0.25").unwrap(), Rational::from((1, 4)));
        assert_eq!(parse_rational("4/5").unwrap(), Rational::from((4, 5)));
        assert_eq!(parse_rational("6000").unwrap(), Rational::from(6000));
        assert_eq!(parse_rational("-1.5").unwrap(), Rational::from((-3, 2)));
        assert!(parse_rational("1e3").is_err());
        assert!(parse_rational(".").is_err());
        assert_eq!(parse_n_list("20, 40").unwrap(), vec![20, 40]);
    }

    #[test]
    fn cache_suffix() {
        let mut c = RunConfig::new(20, Mode::Certified);
        c.cache = Some(PathBuf::from("/tmp/x.log"));
        assert_eq!(c.with_n(40).cache.unwrap(), PathBuf::from("/tmp/x.log.N40"));
        assert_eq!(c.with_n(20).cache.unwrap(), PathBuf::from("/tmp/x.log"));
    }
}
