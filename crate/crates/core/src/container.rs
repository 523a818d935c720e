//! The end-to-end compressor and its on-disk format.
//!
//! Layout (all integers little-endian):
//!
//! | offset | size | field                              |
//! |--------|------|------------------------------------|
//! | 0      | 4    | magic `UGC1`                       |
//! | 4      | 1    | version = 1                        |
//! | 5      | 1    | flags; bit 0: 0 = KT, 1 = Laplace  |
//! | 6      | 8    | vertex count `n`                   |
//! | 14     | 4    | block side `k`                     |
//! | 18     | 8    | off-diagonal stream length, bytes  |
//! | 26     | 8    | diagonal stream length, bytes      |
//! | 34     | ...  | off-diagonal stream, then diagonal |
//!
//! Each stream is coded with its own fresh adaptive model. For `k = 1` the
//! diagonal stream is all zeros and is not stored.

use crate::arith::{self, ArithmeticEncoder, EncodedStream};
use crate::blockcodec::{self, alphabet_size, padded_dims, BlockSymbolSequences, Symbol};
use crate::error::{Error, Result};
use crate::graph::{pair_count, LabeledGraph};
use crate::probmodel::{AdaptiveModel, Estimator};

pub const MAGIC: [u8; 4] = *b"UGC1";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 34;
const FLAG_LAPLACE: u8 = 0x01;

/// Largest supported block side; `m = 2^{k²}` is 65536 at `k = 4`.
pub const MAX_K: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContainerHeader {
    pub estimator: Estimator,
    pub n: u64,
    pub k: u32,
    pub ut_len: u64,
    pub diag_len: u64,
}

impl ContainerHeader {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[0..4].copy_from_slice(&MAGIC);
        out[4] = VERSION;
        out[5] = match self.estimator {
            Estimator::Kt => 0,
            Estimator::Laplace => FLAG_LAPLACE,
        };
        out[6..14].copy_from_slice(&self.n.to_le_bytes());
        out[14..18].copy_from_slice(&self.k.to_le_bytes());
        out[18..26].copy_from_slice(&self.ut_len.to_le_bytes());
        out[26..34].copy_from_slice(&self.diag_len.to_le_bytes());
        out
    }

    /// Parses and validates the header against the full container length.
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            if bytes.len() >= 4 && bytes[0..4] != MAGIC {
                return Err(Error::BadMagic);
            }
            return Err(Error::LengthMismatch(format!(
                "{} bytes is shorter than the {HEADER_LEN}-byte header",
                bytes.len()
            )));
        }
        if bytes[0..4] != MAGIC {
            return Err(Error::BadMagic);
        }
        if bytes[4] != VERSION {
            return Err(Error::UnsupportedVersion(bytes[4]));
        }
        let flags = bytes[5];
        if flags & !FLAG_LAPLACE != 0 {
            return Err(Error::UnsupportedFlags(flags));
        }
        let estimator = if flags & FLAG_LAPLACE != 0 {
            Estimator::Laplace
        } else {
            Estimator::Kt
        };
        let u64_at = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
        let n = u64_at(6);
        let k = u32::from_le_bytes(bytes[14..18].try_into().unwrap());
        let ut_len = u64_at(18);
        let diag_len = u64_at(26);

        if k == 0 || k as usize > MAX_K {
            return Err(Error::InvalidBlockSize(k as usize));
        }
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if n > u32::MAX as u64 {
            return Err(Error::LengthMismatch(format!("vertex count {n} is implausible")));
        }
        if k == 1 && diag_len != 0 {
            return Err(Error::LengthMismatch(
                "k = 1 container carries a diagonal stream".into(),
            ));
        }
        let expected = (HEADER_LEN as u64)
            .checked_add(ut_len)
            .and_then(|x| x.checked_add(diag_len));
        if expected != Some(bytes.len() as u64) {
            return Err(Error::LengthMismatch(format!(
                "header declares {ut_len} + {diag_len} stream bytes, container has {}",
                bytes.len() - HEADER_LEN
            )));
        }
        Ok(Self {
            estimator,
            n,
            k,
            ut_len,
            diag_len,
        })
    }

    /// Code-stream size in bits, excluding the header.
    pub fn payload_bits(&self) -> u64 {
        8 * (self.ut_len + self.diag_len)
    }
}

/// `max(1, ⌊√(½ log₂ n)⌋)`, capped at [`MAX_K`].
pub fn default_k(n: u64) -> usize {
    let n = n.max(1) as f64;
    let k = (0.5 * n.log2()).sqrt().floor() as usize;
    k.clamp(1, MAX_K)
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > MAX_K {
        return Err(Error::InvalidBlockSize(k));
    }
    Ok(())
}

fn assemble(
    n: usize,
    k: usize,
    estimator: Estimator,
    ut: EncodedStream,
    diag: Option<EncodedStream>,
) -> Vec<u8> {
    let diag = diag.map(|d| d.bytes).unwrap_or_default();
    let header = ContainerHeader {
        estimator,
        n: n as u64,
        k: k as u32,
        ut_len: ut.bytes.len() as u64,
        diag_len: diag.len() as u64,
    };
    let mut out = Vec::with_capacity(HEADER_LEN + ut.bytes.len() + diag.len());
    out.extend_from_slice(&header.to_bytes());
    out.extend_from_slice(&ut.bytes);
    out.extend_from_slice(&diag);
    out
}

fn encode_stream(symbols: &[Symbol], m: usize, estimator: Estimator) -> Result<EncodedStream> {
    arith::encode_iter(symbols.iter().map(|&s| s as usize), m, estimator)
}

/// Compresses `g` with block side `k` (1 to [`MAX_K`]).
pub fn compress(g: &LabeledGraph, k: usize, estimator: Estimator) -> Result<Vec<u8>> {
    check_k(k)?;
    let seqs = blockcodec::decompose(g, k)?;
    let m = seqs.alphabet_size();
    let (ut, diag) = rayon::join(
        || encode_stream(&seqs.ut, m, estimator),
        || (k > 1).then(|| encode_stream(&seqs.diag, m, estimator)).transpose(),
    );
    Ok(assemble(g.n(), k, estimator, ut?, diag?))
}

fn decode_stream(bytes: &[u8], m: usize, estimator: Estimator, count: usize) -> Result<Vec<Symbol>> {
    Ok(arith::decode(bytes, m, estimator, count)?
        .into_iter()
        .map(|s| s as Symbol)
        .collect())
}

/// Inverse of [`compress`].
pub fn decompress(bytes: &[u8]) -> Result<LabeledGraph> {
    let header = ContainerHeader::parse(bytes)?;
    let n = header.n as usize;
    let k = header.k as usize;
    let (n_padded, blocks) = padded_dims(n, k);
    let m = alphabet_size(k);
    let ut_end = HEADER_LEN + header.ut_len as usize;
    let ut_bytes = &bytes[HEADER_LEN..ut_end];
    let diag_bytes = &bytes[ut_end..];

    let (ut, diag) = rayon::join(
        || decode_stream(ut_bytes, m, header.estimator, pair_count(blocks)),
        || {
            if k == 1 {
                Ok(vec![0; blocks])
            } else {
                decode_stream(diag_bytes, m, header.estimator, blocks)
            }
        },
    );
    blockcodec::recompose(&BlockSymbolSequences {
        n_original: n,
        n_padded,
        k,
        ut: ut?,
        diag: diag?,
    })
}

/// Vertex-at-a-time compressor.
///
/// Each vertex arrives with its neighbours among the vertices pushed before
/// it. Every time `k` vertices have accumulated, the new block column
/// `B_1j, ..., B_{j-1,j}` and the diagonal block `B_jj` are coded right away,
/// so the output is byte-identical to [`compress`] on the final graph.
pub struct StreamingCompressor {
    k: usize,
    estimator: Estimator,
    vertices: usize,
    /// Earlier-neighbour bitmaps of the vertices in the open block column.
    column: Vec<Vec<bool>>,
    ut_model: AdaptiveModel,
    ut_enc: ArithmeticEncoder,
    diag_model: AdaptiveModel,
    diag_enc: ArithmeticEncoder,
}

impl StreamingCompressor {
    pub fn new(k: usize, estimator: Estimator) -> Result<Self> {
        check_k(k)?;
        let m = alphabet_size(k);
        Ok(Self {
            k,
            estimator,
            vertices: 0,
            column: Vec::with_capacity(k),
            ut_model: AdaptiveModel::new(m, estimator),
            ut_enc: ArithmeticEncoder::new(),
            diag_model: AdaptiveModel::new(m, estimator),
            diag_enc: ArithmeticEncoder::new(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    /// Appends vertex `vertex_count() + 1`. Neighbours are 1-based ids of
    /// earlier vertices.
    pub fn push_vertex<I>(&mut self, earlier_neighbors: I) -> Result<()>
    where
        I: IntoIterator<Item = usize>,
    {
        let id = self.vertices + 1;
        let mut row = vec![false; self.vertices];
        for v in earlier_neighbors {
            if v == 0 || v >= id {
                return Err(Error::VertexOutOfRange { i: id, j: v, n: id });
            }
            row[v - 1] = true;
        }
        self.column.push(row);
        self.vertices += 1;
        if self.column.len() == self.k {
            self.flush_column()?;
        }
        Ok(())
    }

    fn flush_column(&mut self) -> Result<()> {
        let k = self.k;
        let base = self.vertices.div_ceil(k) * k - k;
        let cell = |column: &[Vec<bool>], r: usize, c: usize| {
            column
                .get(c - base)
                .is_some_and(|row| row.get(r).copied().unwrap_or(false))
        };
        for bi in 0..base / k {
            let mut sym = 0usize;
            for r in bi * k..bi * k + k {
                for c in base..base + k {
                    sym = (sym << 1) | cell(&self.column, r, c) as usize;
                }
            }
            self.ut_enc.encode_symbol(&mut self.ut_model, sym)?;
        }
        if k > 1 {
            let mut sym = 0usize;
            for r in base..base + k {
                for c in base..base + k {
                    let bit = match r.cmp(&c) {
                        std::cmp::Ordering::Less => cell(&self.column, r, c),
                        std::cmp::Ordering::Greater => cell(&self.column, c, r),
                        std::cmp::Ordering::Equal => false,
                    };
                    sym = (sym << 1) | bit as usize;
                }
            }
            self.diag_enc.encode_symbol(&mut self.diag_model, sym)?;
        }
        self.column.clear();
        Ok(())
    }

    /// Pads the last block column with isolated vertices and emits the container.
    pub fn finish(mut self) -> Result<Vec<u8>> {
        if self.vertices == 0 {
            return Err(Error::EmptyGraph);
        }
        if !self.column.is_empty() {
            self.flush_column()?;
        }
        let diag = (self.k > 1).then(|| self.diag_enc.finish());
        Ok(assemble(
            self.vertices,
            self.k,
            self.estimator,
            self.ut_enc.finish(),
            diag,
        ))
    }
}
