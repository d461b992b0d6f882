use nalgebra::{DMatrix, SymmetricEigen};

use super::{multiplicity, BlockMatrix, Triple, PERMUTATIONS};
use crate::ball::{Ball, Midpoint};
use crate::error::{Error, Result};

/// Block expanded to all permutations of its labels.
#[derive(Debug)]
pub struct HexagonBlock<'a, M: Midpoint> {
    block: &'a BlockMatrix<M>,
    /// Sorted, duplicate-free permutations of the block labels.
    pub index: Vec<Triple>,
    /// Position of each label's sorted representative in the block.
    rep: Vec<usize>,
}

impl<M: Midpoint> HexagonBlock<'_, M> {
    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Ball<M> {
        self.block.get(self.rep[i], self.rep[j])
    }

    pub fn position(&self, m: &Triple) -> Option<usize> {
        self.index.binary_search(m).ok()
    }
}

/// `Q_{m,n}` is unchanged by permuting `m` or `n`, so the expanded matrix
/// reads its entries from the sorted representatives.
pub fn hexagon_block<M: Midpoint>(block: &BlockMatrix<M>) -> HexagonBlock<'_, M> {
    let mut index: Vec<Triple> = block
        .index
        .iter()
        .flat_map(|m| PERMUTATIONS.iter().map(move |p| m.permuted(p)))
        .collect();
    index.sort_unstable();
    index.dedup();
    let rep = index
        .iter()
        .map(|m| block.position(&m.sorted()).expect("permutation of a label"))
        .collect();
    HexagonBlock { block, index, rep }
}

/// Weighted matrix `p_m Q_{m,n} p_n` over the labels of the `D = 0` block
/// with `m1^2 + m2^2 + m3^2 <= 3 N^2 / 2`.
pub fn disc_block<M: Midpoint>(n: u32, block0: &BlockMatrix<M>) -> Result<BlockMatrix<M>> {
    if block0.d != 0 {
        return Err(Error::InvalidParams(format!("disc matrix needs block 0, got {}", block0.d)));
    }
    let limit = 3 * (n as i64) * (n as i64);
    let keep: Vec<usize> = (0..block0.dim()).filter(|&i| 2 * block0.index[i].norm_sq() <= limit).collect();
    let mut entries = Vec::with_capacity(keep.len() * keep.len());
    for &i in &keep {
        let pi = multiplicity(&block0.index[i]) as i64;
        for &j in &keep {
            let pj = multiplicity(&block0.index[j]) as i64;
            entries.push(block0.get(i, j).mul_i64(pi * pj));
        }
    }
    Ok(BlockMatrix::from_entries(
        0,
        keep.iter().map(|&i| block0.index[i]).collect(),
        entries,
        block0.scheme_eps.mul_i64(36),
    ))
}

/// `r_m = |Q_{m,m}|^{-1} sum_{n != m} |Q_{m,n}|` for row `i`.
pub fn diag_ratio<M: Midpoint>(block: &BlockMatrix<M>, i: usize) -> Result<Ball<M>> {
    let diag = block.get(i, i);
    if diag.contains_zero() {
        return Err(Error::ZeroDiagonal(block.index[i].0));
    }
    let bits = diag.bits();
    let mut off = Ball::<M>::zero_at(bits);
    for j in 0..block.dim() {
        if j != i {
            off = off.add_at(&block.get(i, j).abs(), bits);
        }
    }
    off.div_at(&diag.abs(), bits)
}

/// Eigenvalues (ascending) and eigenvectors (matching columns) of the
/// midpoint matrix; for diagnostics only.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn midpoint_spectrum<M: Midpoint>(block: &BlockMatrix<M>) -> Result<Spectrum> {
    if block.dim() == 0 {
        return Err(Error::EigensolveFailure("empty block".into()));
    }
    let eig = SymmetricEigen::new(block.mid_matrix());
    let mut order: Vec<usize> = (0..block.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let n = block.dim();
    let vectors = DMatrix::from_fn(n, n, |i, j| {
        // fix the sign so that the largest component is positive
        let col = eig.eigenvectors.column(order[j]);
        let big = col.iter().copied().fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
        let s = if big < 0.0 { -1.0 } else { 1.0 };
        s * col[i]
    });
    Ok(Spectrum { values, vectors })
}
