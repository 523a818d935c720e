//! k×k block decomposition of the adjacency matrix.
//!
//! The matrix is zero padded to `n_padded = k·⌈n/k⌉` and cut into
//! `n' = n_padded / k` block rows. Off-diagonal blocks of the upper triangle
//! are listed column by column, `B_12, B_13, B_23, B_14, B_24, B_34, ...`, so
//! the first `j` block columns only depend on the first `j·k` vertices. The
//! diagonal blocks `B_11, ..., B_n'n'` form a second stream.
//!
//! A block becomes a symbol in `[0, 2^{k²})` by scanning it row-major with the
//! first bit as the most significant one. (Symbols are 0-based; a symbol `s`
//! here is `s + 1` in 1-based notation.)

use crate::error::{Error, Result};
use crate::graph::{pair_count, LabeledGraph};

/// Largest block side whose symbols fit in 32 bits.
pub const MAX_BLOCK_SIDE: usize = 5;

pub type Symbol = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSymbolSequences {
    pub n_original: usize,
    pub n_padded: usize,
    pub k: usize,
    /// Off-diagonal stream, length `n'(n'−1)/2`.
    pub ut: Vec<Symbol>,
    /// Diagonal stream, length `n'`.
    pub diag: Vec<Symbol>,
}

impl BlockSymbolSequences {
    /// Alphabet size `m = 2^{k²}`.
    pub fn alphabet_size(&self) -> usize {
        alphabet_size(self.k)
    }

    /// Number of block rows `n'`.
    pub fn block_count(&self) -> usize {
        self.n_padded / self.k
    }
}

pub fn alphabet_size(k: usize) -> usize {
    1usize << (k * k)
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > MAX_BLOCK_SIDE {
        return Err(Error::InvalidBlockSize(k));
    }
    Ok(())
}

/// `(n_padded, n')` for `n` vertices and block side `k`.
pub fn padded_dims(n: usize, k: usize) -> (usize, usize) {
    let blocks = n.div_ceil(k);
    (blocks * k, blocks)
}

/// Row-major, MSB-first packing of a k×k bit matrix.
pub fn block_to_symbol(block: &[bool], k: usize) -> Symbol {
    assert_eq!(block.len(), k * k, "block must hold k² entries");
    block.iter().fold(0, |acc, &b| (acc << 1) | b as Symbol)
}

pub fn symbol_to_block(symbol: Symbol, k: usize) -> Vec<bool> {
    let bits = k * k;
    (0..bits).map(|t| (symbol >> (bits - 1 - t)) & 1 == 1).collect()
}

/// Symbol of the block with top-left corner `(row0, col0)`, 0-based; cells
/// outside the `n × n` matrix read as zero.
#[inline]
pub(crate) fn read_block(g: &LabeledGraph, row0: usize, col0: usize, k: usize) -> Symbol {
    let n = g.n();
    let mut sym = 0;
    for r in row0..row0 + k {
        for c in col0..col0 + k {
            let bit = r < n && c < n && g.adjacent(r, c);
            sym = (sym << 1) | bit as Symbol;
        }
    }
    sym
}

/// Splits `g` into the off-diagonal and diagonal block streams.
pub fn decompose(g: &LabeledGraph, k: usize) -> Result<BlockSymbolSequences> {
    check_k(k)?;
    let (n_padded, blocks) = padded_dims(g.n(), k);
    let mut ut = Vec::with_capacity(pair_count(blocks));
    for bj in 1..blocks {
        for bi in 0..bj {
            ut.push(read_block(g, bi * k, bj * k, k));
        }
    }
    let diag = (0..blocks).map(|b| read_block(g, b * k, b * k, k)).collect();
    Ok(BlockSymbolSequences {
        n_original: g.n(),
        n_padded,
        k,
        ut,
        diag,
    })
}

/// Inverse of [`decompose`]. Padding cells are discarded.
pub fn recompose(seqs: &BlockSymbolSequences) -> Result<LabeledGraph> {
    let k = seqs.k;
    check_k(k)?;
    let n = seqs.n_original;
    let (n_padded, blocks) = padded_dims(n, k);
    if seqs.n_padded != n_padded {
        return Err(Error::Corrupt(format!(
            "padded size {} does not match n = {n}, k = {k}",
            seqs.n_padded
        )));
    }
    if seqs.ut.len() != pair_count(blocks) || seqs.diag.len() != blocks {
        return Err(Error::Corrupt(format!(
            "expected {} off-diagonal and {blocks} diagonal blocks, got {} and {}",
            pair_count(blocks),
            seqs.ut.len(),
            seqs.diag.len()
        )));
    }
    let m = alphabet_size(k) as u64;
    if let Some(&bad) = seqs.ut.iter().chain(&seqs.diag).find(|&&s| s as u64 >= m) {
        return Err(Error::SymbolOutOfRange {
            symbol: bad as u64,
            m,
        });
    }

    let mut g = LabeledGraph::empty(n)?;
    let mut next = seqs.ut.iter();
    for bj in 1..blocks {
        for bi in 0..bj {
            let sym = *next.next().expect("length checked");
            if sym != 0 {
                write_block(&mut g, bi * k, bj * k, k, sym);
            }
        }
    }
    for (b, &sym) in seqs.diag.iter().enumerate() {
        check_diagonal_block(sym, k)?;
        if sym != 0 {
            write_block(&mut g, b * k, b * k, k, sym);
        }
    }
    Ok(g)
}

/// A diagonal block must be symmetric with a zero diagonal.
fn check_diagonal_block(sym: Symbol, k: usize) -> Result<()> {
    let cell = |r: usize, c: usize| (sym >> (k * k - 1 - (r * k + c))) & 1;
    for r in 0..k {
        if cell(r, r) != 0 {
            return Err(Error::Corrupt(format!("diagonal block {sym} has a self-loop")));
        }
        for c in r + 1..k {
            if cell(r, c) != cell(c, r) {
                return Err(Error::Corrupt(format!("diagonal block {sym} is not symmetric")));
            }
        }
    }
    Ok(())
}

/// Writes the strictly-upper cells of a block into `g`.
fn write_block(g: &mut LabeledGraph, row0: usize, col0: usize, k: usize, sym: Symbol) {
    let n = g.n();
    let bits = k * k;
    for t in 0..bits {
        if (sym >> (bits - 1 - t)) & 1 == 0 {
            continue;
        }
        let (r, c) = (row0 + t / k, col0 + t % k);
        if r < c && c < n {
            g.set(r, c, true);
        }
    }
}
