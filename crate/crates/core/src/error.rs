use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex index ({i}, {j}) out of range for n = {n}")]
    VertexOutOfRange { i: usize, j: usize, n: usize },

    #[error("graph must have at least one vertex")]
    EmptyGraph,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid SBM parameters: {0}")]
    InvalidParams(String),

    #[error("{0} is undefined for this input")]
    Undefined(&'static str),

    #[error("instance too large for brute force: {0}")]
    TooLarge(String),

    #[error("invalid block size k = {0}")]
    InvalidBlockSize(usize),

    #[error("symbol {symbol} out of range for alphabet of size {m}")]
    SymbolOutOfRange { symbol: u64, m: u64 },

    #[error("corrupt block stream: {0}")]
    Corrupt(String),

    #[error("truncated code stream: need {needed} bits, have {available}")]
    Truncated { needed: u64, available: u64 },

    #[error("bad container magic")]
    BadMagic,

    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),

    #[error("unsupported container flags {0:#04x}")]
    UnsupportedFlags(u8),

    #[error("container length mismatch: {0}")]
    LengthMismatch(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("round trip failed for {0}")]
    RoundTrip(String),
}

pub type Result<T> = std::result::Result<T, Error>;
