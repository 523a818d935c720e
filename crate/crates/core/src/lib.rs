//! Universal lossless compression for stochastic-block-model graphs.
//!
//! The compressor cuts the adjacency matrix into `k × k` blocks, maps each
//! block to a symbol of a `2^{k²}`-ary alphabet, and codes the off-diagonal
//! and diagonal block streams separately with an adaptive arithmetic coder
//! driven by a KT (or Laplace) estimator.
//!
//! ```
//! use ugc_core::{compress, decompress, Estimator, LabeledGraph};
//!
//! let g = LabeledGraph::from_edges(5, [(1, 2), (2, 3), (4, 5)]).unwrap();
//! let bytes = compress(&g, 2, Estimator::Kt).unwrap();
//! assert_eq!(decompress(&bytes).unwrap(), g);
//! ```

pub mod analysis;
pub mod arith;
pub mod baselines;
pub mod bench;
pub mod blockcodec;
pub mod container;
pub mod error;
pub mod graph;
pub mod probmodel;
pub mod sbm;

pub use container::{compress, decompress, default_k, StreamingCompressor};
pub use error::{Error, Result};
pub use graph::{load_edgelist, parse_edgelist, write_edgelist, Indexing, LabeledGraph};
pub use probmodel::Estimator;
pub use sbm::{sample_sbm, SbmFamily, SbmParams, Scaling};
