//! Whitespace-separated data behind the figures; midpoints only.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use bandcert::spectral::{
    block_labels, disc_block, hexagon_block, midpoint_spectrum, BlockMatrix, HexagonBlock, Triple,
};
use bandcert::Midpoint;

use crate::config::RunConfig;
use crate::pipeline::Blocks;
use crate::{AnalysisError, Result};

/// Logarithms below this are clipped in heatmaps.
pub const LOG_CLIP: f64 = -16.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Figure {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
    F8,
    F9,
}

impl Figure {
    pub const ALL: [Figure; 9] = [
        Figure::F1,
        Figure::F2,
        Figure::F3,
        Figure::F4,
        Figure::F5,
        Figure::F6,
        Figure::F7,
        Figure::F8,
        Figure::F9,
    ];

    pub fn name(self) -> &'static str {
        ["f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8", "f9"][self as usize]
    }
}

impl FromStr for Figure {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| AnalysisError::Usage(format!("unknown figure `{s}` (expected f1..f9)")))
    }
}

/// Which figures to write and for which data.
#[derive(Debug, Clone)]
pub struct FigureOptions {
    pub which: Vec<Figure>,
    /// Block for f3 and f7.
    pub d: i32,
    /// Column for f4, f5 and f6; defaults to [`default_column`].
    pub column: Option<Triple>,
    /// Band limits for f2 and f9; defaults to the configured one.
    pub ns: Vec<u32>,
}

/// The column `(20, 70, -90)` shown at `N = 120`, scaled to `n` and rounded
/// to even entries summing to zero.
pub fn default_column(n: u32) -> Triple {
    let even = |x: f64| 2 * (x / 2.0).round() as i32;
    let a = even(20.0 * n as f64 / 120.0);
    let b = even(70.0 * n as f64 / 120.0);
    Triple([a, b, -a - b])
}

/// `ln |x|`, clipped below at [`LOG_CLIP`].
pub fn clipped_log(x: f64) -> f64 {
    if x == 0.0 {
        LOG_CLIP
    } else {
        x.abs().ln().max(LOG_CLIP)
    }
}

/// `(D, smallest midpoint eigenvalue)` per block.
pub fn min_eigenvalues<M: Midpoint>(blocks: &[&BlockMatrix<M>]) -> Result<Vec<(i32, f64)>> {
    blocks
        .iter()
        .map(|b| Ok((b.d, midpoint_spectrum(b)?.values[0])))
        .collect()
}

/// Column `m` of the expanded block as `(n1, n2, value)`.
pub fn column<M: Midpoint>(h: &HexagonBlock<'_, M>, m: &Triple) -> Result<Vec<(i32, i32, f64)>> {
    let j = h
        .position(m)
        .ok_or_else(|| AnalysisError::MissingData(format!("column {m} is not in the block")))?;
    Ok((0..h.dim())
        .map(|i| (h.index[i].0[0], h.index[i].0[1], h.get(i, j).mid_f64()))
        .collect())
}

/// Points `(n1, n2)` on the ellipse where the plane `n1 + n2 + n3 = D` meets
/// the sphere `|n| = |m|`.
pub fn ellipse_points(m: &Triple, count: usize) -> Vec<(f64, f64)> {
    let d = m.sum() as f64;
    let r2 = m.norm_sq() as f64 - d * d / 3.0;
    let rho = r2.max(0.0).sqrt();
    let c = d / 3.0;
    let (s2, s6) = (2f64.sqrt(), 6f64.sqrt());
    (0..count)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
            let (u, v) = (rho * th.cos(), rho * th.sin());
            (c + u / s2 + v / s6, c - u / s2 + v / s6)
        })
        .collect()
}

/// Fraction of the `count` largest off-diagonal column entries whose label
/// lies within `width` of the sphere `|n| = |m|`.
pub fn peak_fraction<M: Midpoint>(h: &HexagonBlock<'_, M>, m: &Triple, count: usize, width: f64) -> Result<f64> {
    let j = h
        .position(m)
        .ok_or_else(|| AnalysisError::MissingData(format!("column {m} is not in the block")))?;
    let mut entries: Vec<(f64, usize)> = (0..h.dim())
        .filter(|&i| h.index[i] != *m)
        .map(|i| (h.get(i, j).mid_f64().abs(), i))
        .collect();
    entries.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    entries.truncate(count);
    if entries.is_empty() {
        return Err(AnalysisError::MissingData("column has no off-diagonal entries".into()));
    }
    let r = (m.norm_sq() as f64).sqrt();
    let near = entries
        .iter()
        .filter(|(_, i)| ((h.index[*i].norm_sq() as f64).sqrt() - r).abs() <= width)
        .count();
    Ok(near as f64 / entries.len() as f64)
}

fn write_rows(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = format!("# {header}\n");
    for r in rows {
        s += &r;
        s.push('\n');
    }
    s
}

fn eigvec_rows<M: Midpoint>(b: &BlockMatrix<M>) -> Result<String> {
    let sp = midpoint_spectrum(b)?;
    let h = hexagon_block(b);
    let mut s = String::from("# n1 n2 eigenvector_entry\n");
    for m in &h.index {
        let i = b.position(&m.sorted()).expect("representative");
        writeln!(s, "{} {} {:.17e}", m.0[0], m.0[1], sp.vectors[(i, 0)]).ok();
    }
    Ok(s)
}

/// `(|n|, v_1, ..., v_k)` rows for the `k` smallest eigenvectors of the
/// disc matrix; empty when the disc set is.
fn disc_profiles<M: Midpoint>(n: u32, b0: &BlockMatrix<M>, k: usize, normalise: bool) -> Result<Vec<Vec<f64>>> {
    let disc = disc_block(n, b0)?;
    if disc.dim() == 0 {
        return Ok(Vec::new());
    }
    let sp = midpoint_spectrum(&disc)?;
    let scale = if normalise { (1.5f64).sqrt() * n as f64 } else { 1.0 };
    let k = k.min(disc.dim());
    Ok((0..disc.dim())
        .map(|i| {
            let mut row = vec![(disc.index[i].norm_sq() as f64).sqrt() / scale];
            row.extend((0..k).map(|j| sp.vectors[(i, j)]));
            row
        })
        .collect())
}

fn fmt_row(row: &[f64]) -> String {
    row.iter().map(|x| format!("{x:.17e}")).collect::<Vec<_>>().join(" ")
}

/// Blocks needed at the configured band limit for `opts`.
fn needed_blocks(n: u32, opts: &FigureOptions, column: &Triple) -> Vec<i32> {
    let mut d = Vec::new();
    for f in &opts.which {
        match f {
            Figure::F1 => d.extend(block_labels(n)),
            Figure::F3 | Figure::F7 => d.push(opts.d),
            Figure::F4 | Figure::F5 | Figure::F6 => d.push(column.sum()),
            Figure::F8 => d.push(0),
            Figure::F2 | Figure::F9 => {
                if opts.ns.contains(&n) {
                    d.push(0)
                }
            }
        }
    }
    d.sort_unstable();
    d.dedup();
    d
}

/// Writes the requested figure files into `cfg.out`; returns their paths.
pub fn generate<M: Midpoint>(cfg: &RunConfig, opts: &FigureOptions) -> Result<Vec<PathBuf>> {
    let n = cfg.n;
    let column_m = opts.column.unwrap_or_else(|| default_column(n));
    let labels = block_labels(n);
    for d in [opts.d, column_m.sum()] {
        if !labels.contains(&d) {
            return Err(AnalysisError::Usage(format!("block {d} is not an even label in [0, {}]", 3 * n)));
        }
    }
    let needed = needed_blocks(n, opts, &column_m);
    let mut blocks = if needed.is_empty() {
        None
    } else {
        Some(Blocks::<M>::compute(cfg, &needed)?)
    };
    fs::create_dir_all(&cfg.out)?;
    let mut written = Vec::new();
    let mut emit = |name: String, text: String| -> Result<()> {
        let p = cfg.out.join(name);
        fs::write(&p, text)?;
        written.push(p);
        Ok(())
    };

    let mut which = opts.which.clone();
    which.sort_unstable();
    which.dedup();
    for f in which {
        match f {
            Figure::F1 => {
                let b = blocks.as_mut().expect("blocks computed");
                let mut rows = Vec::new();
                for &d in &labels {
                    let lam = midpoint_spectrum(b.block(d)?)?.values[0];
                    rows.push(format!("{d} {lam:.17e}"));
                }
                emit("f1.dat".into(), write_rows("D lambda_min", rows))?;
            }
            Figure::F2 | Figure::F9 => {
                let mut rows = Vec::new();
                for &nn in &opts.ns {
                    let sub = cfg.with_n(nn);
                    let mut local;
                    let b: &mut Blocks<M> = if nn == n {
                        blocks.as_mut().expect("blocks computed")
                    } else {
                        local = Blocks::<M>::compute(&sub, &[0])?;
                        &mut local
                    };
                    let b0 = b.block(0)?;
                    if f == Figure::F2 {
                        rows.push(format!("{nn} {:.17e}", midpoint_spectrum(b0)?.values[0]));
                    } else {
                        let profile = disc_profiles(nn, b0, 1, true)?;
                        if profile.is_empty() {
                            eprintln!("warning: the disc set is empty at N = {nn}; no f9 rows");
                        }
                        for r in profile {
                            rows.push(format!("{nn} {}", fmt_row(&r)));
                        }
                    }
                }
                if f == Figure::F2 {
                    emit("f2.dat".into(), write_rows("N lambda_min_D0", rows))?;
                } else {
                    emit("f9.dat".into(), write_rows("N radius_over_sqrt(3/2)N eigenvector_entry", rows))?;
                }
            }
            Figure::F3 => {
                let b = blocks.as_mut().expect("blocks computed");
                let sp = midpoint_spectrum(b.block(opts.d)?)?;
                let rows = sp.values.iter().enumerate().map(|(i, v)| format!("{i} {v:.17e}"));
                emit(format!("f3_D{}.dat", opts.d), write_rows("index eigenvalue", rows))?;
            }
            Figure::F4 | Figure::F5 => {
                let b = blocks.as_mut().expect("blocks computed");
                let h = hexagon_block(b.block(column_m.sum())?);
                let rows = column(&h, &column_m)?
                    .into_iter()
                    .map(|(a, c, v)| format!("{a} {c} {:.17e}", clipped_log(v)));
                emit(format!("{}.dat", f.name()), write_rows("n1 n2 ln|entry|", rows))?;
                if f == Figure::F5 {
                    let rows = ellipse_points(&column_m, 720)
                        .into_iter()
                        .map(|(a, c)| format!("{a:.17e} {c:.17e}"));
                    emit("f5_ellipse.dat".into(), write_rows("n1 n2", rows))?;
                }
            }
            Figure::F6 => {
                let b = blocks.as_mut().expect("blocks computed");
                let h = hexagon_block(b.block(column_m.sum())?);
                let j = h.position(&column_m).expect("checked by column()");
                let _ = column(&h, &column_m)?;
                let rows = (0..h.dim()).map(|i| {
                    format!("{:.17e} {:.17e}", (h.index[i].norm_sq() as f64).sqrt(), h.get(i, j).mid_f64())
                });
                emit("f6.dat".into(), write_rows("radius entry", rows))?;
            }
            Figure::F7 => {
                let b = blocks.as_mut().expect("blocks computed");
                emit(format!("f7_D{}.dat", opts.d), eigvec_rows(b.block(opts.d)?)?)?;
            }
            Figure::F8 => {
                let b = blocks.as_mut().expect("blocks computed");
                let profile = disc_profiles(n, b.block(0)?, 5, false)?;
                if profile.is_empty() {
                    return Err(AnalysisError::MissingData(format!("the disc set is empty at N = {n}")));
                }
                let rows = profile.iter().map(|r| fmt_row(r)).collect::<Vec<_>>();
                emit("f8.dat".into(), write_rows("radius v1 v2 v3 v4 v5", rows))?;
            }
        }
    }
    Ok(written)
}
