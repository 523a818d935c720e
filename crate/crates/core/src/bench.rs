//! Compression benchmark across datasets, block sizes, estimators and
//! baseline methods.

use std::fmt::{self, Write as _};
use std::fs::File;
use std::io::BufReader;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use crate::baselines::{csr_size_bits, lz78_hilbert_size_bits};
use crate::container::{compress, decompress};
use crate::error::{Error, Result};
use crate::graph::{load_edgelist, pair_count, write_edgelist, Indexing, LabeledGraph};
use crate::probmodel::Estimator;
use crate::sbm::{sample_sbm, SbmParams};

#[derive(Clone, Debug)]
pub struct Dataset {
    pub name: String,
    pub graph: LabeledGraph,
    /// Size of the edge-list text the graph was read from (or would be
    /// written as, for generated graphs).
    pub input_bytes: u64,
}

impl Dataset {
    pub fn new(name: impl Into<String>, graph: LabeledGraph) -> Self {
        let input_bytes = write_edgelist(&graph).len() as u64;
        Self {
            name: name.into(),
            graph,
            input_bytes,
        }
    }

    /// Loads an edge list; the dataset is named after the file stem.
    pub fn from_file(path: &Path, indexing: Indexing) -> Result<Self> {
        let io_err = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let file = File::open(path).map_err(io_err)?;
        let input_bytes = file.metadata().map_err(io_err)?.len();
        let loaded = load_edgelist(BufReader::new(file), indexing)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        Ok(Self {
            name,
            graph: loaded.graph,
            input_bytes,
        })
    }

    pub fn synthetic(name: impl Into<String>, params: &SbmParams, seed: u64) -> Self {
        Self::new(name, sample_sbm(params, seed).0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Ugc,
    Csr,
    Lz78Hilbert,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Ugc, Method::Csr, Method::Lz78Hilbert];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ugc => "ugc",
            Method::Csr => "csr",
            Method::Lz78Hilbert => "lz78-hilbert",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ugc" => Ok(Method::Ugc),
            "csr" => Ok(Method::Csr),
            "lz78-hilbert" | "lz78" => Ok(Method::Lz78Hilbert),
            _ => Err(Error::InvalidParams(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub ks: Vec<usize>,
    pub estimators: Vec<Estimator>,
    pub methods: Vec<Method>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            ks: vec![1, 2, 3, 4],
            estimators: vec![Estimator::Kt, Estimator::Laplace],
            methods: Method::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub dataset: String,
    pub method: Method,
    /// Block size and estimator; only set for UGC rows.
    pub k: Option<usize>,
    pub estimator: Option<Estimator>,
    pub n: usize,
    pub edges: usize,
    /// UGC: whole container including header. Baselines: computed size.
    pub output_bits: u64,
    /// `output_bits / n²`.
    pub ratio_full: f64,
    /// `output_bits / C(n, 2)`.
    pub ratio_ut: f64,
    /// `output_bits / (8 · input edge-list bytes)`.
    pub ratio_file: f64,
    pub seconds: f64,
}

fn row(
    ds: &Dataset,
    method: Method,
    k: Option<usize>,
    estimator: Option<Estimator>,
    bits: u64,
    seconds: f64,
) -> BenchRow {
    let n = ds.graph.n();
    BenchRow {
        dataset: ds.name.clone(),
        method,
        k,
        estimator,
        n,
        edges: ds.graph.edge_count(),
        output_bits: bits,
        ratio_full: bits as f64 / (n as f64 * n as f64),
        ratio_ut: if n > 1 {
            bits as f64 / pair_count(n) as f64
        } else {
            f64::INFINITY
        },
        ratio_file: bits as f64 / (8.0 * ds.input_bytes.max(1) as f64),
        seconds,
    }
}

/// Runs every configured method on every dataset. Each UGC container is
/// decoded and compared with the input before its row is recorded.
pub fn run_bench(datasets: &[Dataset], config: &BenchConfig) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for ds in datasets {
        for &method in &config.methods {
            match method {
                Method::Ugc => {
                    for &k in &config.ks {
                        for &est in &config.estimators {
                            let start = Instant::now();
                            let bytes = compress(&ds.graph, k, est)?;
                            let seconds = start.elapsed().as_secs_f64();
                            if decompress(&bytes)? != ds.graph {
                                return Err(Error::RoundTrip(format!(
                                    "{} with k={k}, {est}",
                                    ds.name
                                )));
                            }
                            let len = bytes.len() as u64;
                            rows.push(row(ds, method, Some(k), Some(est), len * 8, seconds));
                        }
                    }
                }
                Method::Csr => {
                    let start = Instant::now();
                    let bits = csr_size_bits(&ds.graph);
                    rows.push(row(ds, method, None, None, bits, start.elapsed().as_secs_f64()));
                }
                Method::Lz78Hilbert => {
                    let start = Instant::now();
                    let bits = lz78_hilbert_size_bits(&ds.graph);
                    rows.push(row(ds, method, None, None, bits, start.elapsed().as_secs_f64()));
                }
            }
        }
    }
    Ok(rows)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// CSV columns:
/// `dataset,method,k,estimator,n,edges,output_bits,ratio_full,ratio_ut,ratio_file,seconds`.
pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(
        "dataset,method,k,estimator,n,edges,output_bits,ratio_full,ratio_ut,ratio_file,seconds\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{:.6},{:.6},{:.6},{:.6}",
            r.dataset,
            r.method,
            opt(r.k),
            opt(r.estimator),
            r.n,
            r.edges,
            r.output_bits,
            r.ratio_full,
            r.ratio_ut,
            r.ratio_file,
            r.seconds
        );
    }
    out
}

/// Fixed-width table for terminals.
pub fn bench_table(rows: &[BenchRow]) -> String {
    let mut out = format!(
        "{:<16} {:<13} {:>2} {:<8} {:>8} {:>9} {:>12} {:>9} {:>9} {:>9} {:>9}\n",
        "dataset", "method", "k", "est", "n", "edges", "bits", "bits/n^2", "bits/C", "bits/file", "ms"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<16} {:<13} {:>2} {:<8} {:>8} {:>9} {:>12} {:>9.4} {:>9.4} {:>9.4} {:>9.2}",
            r.dataset,
            r.method.name(),
            opt(r.k),
            opt(r.estimator),
            r.n,
            r.edges,
            r.output_bits,
            r.ratio_full,
            r.ratio_ut,
            r.ratio_file,
            r.seconds * 1e3
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_for_every_configuration() {
        let params = SbmParams::erdos_renyi(50, 0.1).unwrap();
        let ds = Dataset::synthetic("er50", &params, 3);
        let config = BenchConfig {
            ks: vec![1, 2],
            estimators: vec![Estimator::Kt, Estimator::Laplace],
            methods: Method::ALL.to_vec(),
        };
        let rows = run_bench(std::slice::from_ref(&ds), &config).unwrap();
        assert_eq!(rows.len(), 4 + 2);
        for r in &rows {
            assert_eq!(r.n, 50);
            assert_eq!(r.edges, ds.graph.edge_count());
            assert!((r.ratio_full - r.output_bits as f64 / 2500.0).abs() < 1e-12);
        }
        let csv = bench_csv(&rows);
        assert_eq!(csv.lines().count(), 7);
        assert!(bench_table(&rows).contains("lz78-hilbert"));
    }

    #[test]
    fn missing_file_names_path() {
        let err = Dataset::from_file(Path::new("/nonexistent/graph.txt"), Indexing::Auto).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/graph.txt"));
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("gzip".parse::<Method>().is_err());
    }
}
