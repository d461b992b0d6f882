use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{canonical_key, ModeKey};
use crate::ball::{Ball, Midpoint};
use crate::error::{Error, Result};

/// First word of every integral cache file.
pub const CACHE_MAGIC: &str = "bandcert-integrals";

/// Integral values keyed by canonical orders (sign `+1`).
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralStore<M: Midpoint> {
    scheme_hash: String,
    map: BTreeMap<[u32; 6], Ball<M>>,
}

impl<M: Midpoint> IntegralStore<M> {
    pub fn new(scheme_hash: String) -> Self {
        IntegralStore { scheme_hash, map: BTreeMap::new() }
    }

    pub fn scheme_hash(&self) -> &str {
        &self.scheme_hash
    }

    pub fn insert(&mut self, orders: [u32; 6], value: Ball<M>) {
        self.map.insert(orders, value);
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, orders: &[u32; 6]) -> Option<&Ball<M>> {
        self.map.get(orders)
    }

    /// `I_key` with the key's sign applied.
    pub fn value(&self, key: &ModeKey) -> Result<Ball<M>> {
        let v = self.map.get(&key.orders).ok_or(Error::MissingKey(key.orders))?;
        Ok(if key.sign < 0 { v.neg() } else { v.clone() })
    }

    /// `I_k` for a signed 6-tuple.
    pub fn value_signed(&self, k: &[i64; 6]) -> Result<Ball<M>> {
        self.value(&canonical_key(k)?)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u32; 6], &Ball<M>)> {
        self.map.iter()
    }

    pub fn extend(&mut self, other: IntegralStore<M>) {
        self.map.extend(other.map);
    }

    /// One `o1 .. o6 mid ± rad` line per record, sorted by orders.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.map {
            s.push_str(&record_line(k, v));
            s.push('\n');
        }
        s
    }
}

fn record_line<M: Midpoint>(k: &[u32; 6], v: &Ball<M>) -> String {
    format!("{} {} {} {} {} {} {}", k[0], k[1], k[2], k[3], k[4], k[5], v.to_decimal())
}

fn parse_record<M: Midpoint>(line: &str, bits: u32) -> Option<([u32; 6], Ball<M>)> {
    let mut parts = line.splitn(7, ' ');
    let mut k = [0u32; 6];
    for o in k.iter_mut() {
        *o = parts.next()?.parse().ok()?;
    }
    if k.windows(2).any(|w| w[0] > w[1]) {
        return None;
    }
    let v = Ball::parse_decimal(parts.next()?, bits).ok()?;
    Some((k, v))
}

/// Append-only record log with a header naming the scheme.
pub(crate) struct CacheLog<M: Midpoint> {
    path: PathBuf,
    records: HashMap<[u32; 6], Ball<M>>,
}

impl<M: Midpoint> CacheLog<M> {
    fn header(hash: &str) -> String {
        format!("{CACHE_MAGIC} v1 scheme={hash} kind={}", M::KIND)
    }

    /// Opens or creates the log. A header for another scheme is reported
    /// and the file restarted; a torn final line is dropped.
    pub(crate) fn open(path: &Path, hash: &str, bits: u32) -> Result<Self> {
        let header = Self::header(hash);
        let mut records = HashMap::new();
        let mut rewrite = true;
        match File::open(path) {
            Ok(f) => {
                let reader = BufReader::new(f);
                let mut lines = reader.lines();
                match lines.next() {
                    Some(Ok(h)) if h == header => {
                        rewrite = false;
                        let mut all: Vec<String> = lines.collect::<std::io::Result<_>>()?;
                        // a last line without newline may be torn
                        if !all.is_empty() && !fs::read(path)?.ends_with(b"\n") {
                            all.pop();
                            rewrite = true;
                        }
                        let n = all.len();
                        for (i, line) in all.iter().enumerate() {
                            match parse_record::<M>(line, bits) {
                                Some((k, v)) => {
                                    records.insert(k, v);
                                }
                                None if i + 1 == n => rewrite = true,
                                None => {
                                    let e = Error::CacheCorruption {
                                        path: path.to_path_buf(),
                                        detail: format!("unreadable record on line {}", i + 2),
                                    };
                                    eprintln!("warning: {e}; dropping it");
                                    rewrite = true;
                                }
                            }
                        }
                    }
                    Some(Ok(h)) => {
                        let e = Error::CacheCorruption {
                            path: path.to_path_buf(),
                            detail: format!("header `{h}` does not match `{header}`"),
                        };
                        eprintln!("warning: {e}; recomputing");
                    }
                    _ => {}
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(e.into()),
        }
        let log = CacheLog { path: path.to_path_buf(), records };
        if rewrite {
            log.rewrite(&header)?;
        }
        Ok(log)
    }

    /// Writes header and current records to a temporary file, then renames.
    fn rewrite(&self, header: &str) -> Result<()> {
        let tmp = self.path.with_extension("tmp");
        {
            let mut w = BufWriter::new(File::create(&tmp)?);
            writeln!(w, "{header}")?;
            let mut keys: Vec<_> = self.records.keys().collect();
            keys.sort_unstable();
            for k in keys {
                writeln!(w, "{}", record_line(k, &self.records[k]))?;
            }
            w.flush()?;
            w.get_ref().sync_all()?;
        }
        fs::rename(&tmp, &self.path)?;
        Ok(())
    }

    pub(crate) fn get(&self, k: &[u32; 6]) -> Option<&Ball<M>> {
        self.records.get(k)
    }

    pub(crate) fn append(&mut self, keys: &[[u32; 6]], values: &[Ball<M>]) -> Result<()> {
        let mut text = String::new();
        for (k, v) in keys.iter().zip(values) {
            text.push_str(&record_line(k, v));
            text.push('\n');
        }
        let mut f = OpenOptions::new().append(true).open(&self.path)?;
        f.write_all(text.as_bytes())?;
        f.sync_data()?;
        for (k, v) in keys.iter().zip(values) {
            self.records.insert(*k, v.clone());
        }
        Ok(())
    }
}
