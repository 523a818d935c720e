//! Reference compressors: upper-triangle CSR size accounting and
//! Hilbert-curve linearization followed by binary LZ78.

use crate::error::{Error, Result};
use crate::graph::LabeledGraph;

/// `⌈log₂ x⌉` for `x >= 1`.
fn ceil_log2(x: u64) -> u32 {
    debug_assert!(x >= 1);
    u64::BITS - (x - 1).leading_zeros()
}

/// Fixed-width field size; a zero width is stored as one bit.
fn field_width(values: u64) -> u64 {
    ceil_log2(values).max(1) as u64
}

/// Size of a CSR layout holding each edge once (upper triangle only):
/// `n + 1` offsets of `⌈log₂(e + 1)⌉` bits and `e` neighbour ids of
/// `⌈log₂ n⌉` bits.
pub fn csr_size_bits(g: &LabeledGraph) -> u64 {
    let n = g.n() as u64;
    let e = g.edge_count() as u64;
    (n + 1) * field_width(e + 1) + e * field_width(n)
}

/// Hilbert curve over a `side × side` grid, `side` a power of two.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HilbertOrder {
    side: usize,
}

impl HilbertOrder {
    pub fn new(side: usize) -> Self {
        assert!(side.is_power_of_two(), "side must be a power of two");
        Self { side }
    }

    /// Smallest curve covering an `n × n` matrix.
    pub fn covering(n: usize) -> Self {
        Self::new(n.max(1).next_power_of_two())
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn len(&self) -> usize {
        self.side * self.side
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `(row, col)` visited at step `d`.
    pub fn cell(&self, d: usize) -> (usize, usize) {
        debug_assert!(d < self.len());
        let (mut x, mut y) = (0usize, 0usize);
        let mut t = d;
        let mut s = 1;
        while s < self.side {
            let rx = 1 & (t / 2);
            let ry = 1 & (t ^ rx);
            if ry == 0 {
                if rx == 1 {
                    x = s - 1 - x;
                    y = s - 1 - y;
                }
                std::mem::swap(&mut x, &mut y);
            }
            x += s * rx;
            y += s * ry;
            t /= 4;
            s *= 2;
        }
        (y, x)
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).map(move |d| self.cell(d))
    }
}

/// Full adjacency matrix, zero padded to a power-of-two side, read along the
/// Hilbert curve.
pub fn hilbert_linearize(g: &LabeledGraph) -> Vec<bool> {
    let n = g.n();
    HilbertOrder::covering(n)
        .cells()
        .map(|(r, c)| r < n && c < n && g.adjacent(r, c))
        .collect()
}

/// Phrase-index width when `dict_size` phrases are known.
fn index_width(dict_size: u64) -> u64 {
    field_width(dict_size + 1)
}

fn push_bits(out: &mut Vec<bool>, value: u64, width: u64) {
    for shift in (0..width).rev() {
        out.push((value >> shift) & 1 == 1);
    }
}

/// Walks the LZ78 parse of `bits`, reporting each phrase as
/// `(dictionary index, Some(literal))`, or `(index, None)` for a trailing
/// phrase that is already in the dictionary.
fn lz78_parse(bits: &[bool], mut emit: impl FnMut(u64, u64, Option<bool>)) {
    let mut trie: Vec<[u32; 2]> = vec![[0, 0]];
    let mut node = 0usize;
    for &bit in bits {
        let child = trie[node][bit as usize];
        if child != 0 {
            node = child as usize;
            continue;
        }
        let dict_size = (trie.len() - 1) as u64;
        emit(node as u64, index_width(dict_size), Some(bit));
        trie[node][bit as usize] = trie.len() as u32;
        trie.push([0, 0]);
        node = 0;
    }
    if node != 0 {
        emit(node as u64, index_width((trie.len() - 1) as u64), None);
    }
}

/// Binary LZ78. Each phrase is a dictionary index of
/// `max(1, ⌈log₂(dict_size + 1)⌉)` bits followed by one literal bit; a final
/// phrase already in the dictionary is written as its index alone.
pub fn lz78_encode_bits(bits: &[bool]) -> Vec<bool> {
    let mut out = Vec::new();
    lz78_parse(bits, |index, width, literal| {
        push_bits(&mut out, index, width);
        if let Some(b) = literal {
            out.push(b);
        }
    });
    out
}

/// Length of [`lz78_encode_bits`] without materializing it.
pub fn lz78_size_bits(bits: &[bool]) -> u64 {
    let mut total = 0;
    lz78_parse(bits, |_, width, literal| {
        total += width + literal.is_some() as u64;
    });
    total
}

/// Inverse of [`lz78_encode_bits`]; the code length delimits the stream.
pub fn lz78_decode_bits(code: &[bool]) -> Result<Vec<bool>> {
    // (parent, literal, length) per phrase; index 0 is the empty phrase.
    let mut phrases: Vec<(u32, bool, usize)> = vec![(0, false, 0)];
    let mut out = Vec::new();
    let mut pos = 0;

    let append = |out: &mut Vec<bool>, phrases: &[(u32, bool, usize)], mut idx: usize| {
        let len = phrases[idx].2;
        let start = out.len();
        out.resize(start + len, false);
        for slot in (start..start + len).rev() {
            let (parent, bit, _) = phrases[idx];
            out[slot] = bit;
            idx = parent as usize;
        }
    };

    while pos < code.len() {
        let dict_size = (phrases.len() - 1) as u64;
        let width = index_width(dict_size) as usize;
        let remaining = code.len() - pos;
        if remaining < width {
            return Err(Error::Corrupt(format!("LZ78 stream ends inside an index at bit {pos}")));
        }
        let index = code[pos..pos + width]
            .iter()
            .fold(0u64, |acc, &b| (acc << 1) | b as u64) as usize;
        pos += width;
        if index > dict_size as usize {
            return Err(Error::Corrupt(format!("LZ78 index {index} beyond dictionary")));
        }
        if remaining == width {
            if index == 0 {
                return Err(Error::Corrupt("LZ78 trailing phrase is empty".into()));
            }
            append(&mut out, &phrases, index);
            break;
        }
        let literal = code[pos];
        pos += 1;
        append(&mut out, &phrases, index);
        out.push(literal);
        let len = phrases[index].2 + 1;
        phrases.push((index as u32, literal, len));
    }
    Ok(out)
}

/// Size of the Hilbert + LZ78 baseline for `g`.
pub fn lz78_hilbert_size_bits(g: &LabeledGraph) -> u64 {
    lz78_size_bits(&hilbert_linearize(g))
}
