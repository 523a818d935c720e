//! `ugc`: compress, decompress, generate and benchmark labeled graphs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ugc_core::analysis::{
    gap_csv, nonstationarity_csv, nonstationarity_report, second_order_gap, universality_csv,
    universality_curve,
};
use ugc_core::bench::{bench_csv, bench_table, run_bench, BenchConfig, Dataset, Method};
use ugc_core::container::MAX_K;
use ugc_core::{
    compress, decompress, default_k, load_edgelist, sample_sbm, write_edgelist, Error, Estimator,
    Indexing, SbmFamily, SbmParams, Scaling,
};

#[derive(Parser, Debug)]
#[command(name = "ugc", version, about = "Universal lossless compressor for labeled graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compress an edge list into a .ugc container
    Compress(CompressArgs),
    /// Decompress a .ugc container into an edge list
    Decompress(DecompressArgs),
    /// Sample a graph from a stochastic block model
    Gen(GenArgs),
    /// Compare UGC against the CSR and Hilbert+LZ78 baselines
    Bench(BenchArgs),
    /// Theory checks: non-stationarity, universality, second-order gap
    Analyze {
        #[command(subcommand)]
        command: AnalyzeCommand,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Kt,
    Laplace,
}

impl From<Mode> for Estimator {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Kt => Estimator::Kt,
            Mode::Laplace => Estimator::Laplace,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum IndexingArg {
    Auto,
    Zero,
    One,
}

impl From<IndexingArg> for Indexing {
    fn from(i: IndexingArg) -> Self {
        match i {
            IndexingArg::Auto => Indexing::Auto,
            IndexingArg::Zero => Indexing::Zero,
            IndexingArg::One => Indexing::One,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Ugc,
    Csr,
    #[value(name = "lz78-hilbert")]
    Lz78Hilbert,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Ugc => Method::Ugc,
            MethodArg::Csr => Method::Csr,
            MethodArg::Lz78Hilbert => Method::Lz78Hilbert,
        }
    }
}

fn block_size(s: &str) -> Result<usize, String> {
    let k: usize = s.parse().map_err(|_| format!("`{s}` is not a block size"))?;
    if (1..=MAX_K).contains(&k) {
        Ok(k)
    } else {
        Err(format!("block size must be in 1..={MAX_K}"))
    }
}

#[derive(Args, Debug)]
struct CompressArgs {
    /// Input edge list
    input: PathBuf,
    /// Output container
    #[arg(short, long)]
    output: PathBuf,
    /// Block size (default: clamp(floor(sqrt(0.5 log2 n)), 1, 4))
    #[arg(long, value_parser = block_size)]
    k: Option<usize>,
    /// Probability estimator
    #[arg(long, value_enum, default_value = "kt")]
    mode: Mode,
    /// Vertex numbering of the input
    #[arg(long, value_enum, default_value = "auto")]
    indexing: IndexingArg,
}

#[derive(Args, Debug)]
struct DecompressArgs {
    /// Input container
    input: PathBuf,
    /// Output edge list
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// SBM parameters as JSON: {"n": .., "L": .., "p": [..], "W": [[..]]}
    #[arg(long)]
    params: PathBuf,
    /// RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output edge list
    #[arg(short, long)]
    output: PathBuf,
    /// Also write the community labels, one per line
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Edge-list files to benchmark
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    datasets: Vec<PathBuf>,
    /// SBM parameter files; one graph is sampled from each
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    synthetic: Vec<PathBuf>,
    /// Seed for synthetic datasets
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Block sizes for UGC
    #[arg(long, value_delimiter = ',', value_parser = block_size, default_value = "1,2,3,4")]
    ks: Vec<usize>,
    /// Estimators for UGC
    #[arg(long, value_enum, value_delimiter = ',', default_value = "kt,laplace")]
    modes: Vec<Mode>,
    /// Methods to run
    #[arg(long, value_enum, value_delimiter = ',', default_value = "ugc,csr,lz78-hilbert")]
    methods: Vec<MethodArg>,
    /// Vertex numbering of the dataset files
    #[arg(long, value_enum, default_value = "auto")]
    indexing: IndexingArg,
    /// Write CSV here instead of printing a table
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum AnalyzeCommand {
    /// Window-law gaps for the horizontal, vertical and diagonal orderings
    Nonstationarity(NonstationarityArgs),
    /// Mean code length against H(A|X) as n grows
    Universality(UniversalityArgs),
    /// (E[len] - m log2 n) / n against the BC entropy of a Poisson tree (inverse_n families)
    BcGap(BcGapArgs),
}

#[derive(Args, Debug)]
struct NonstationarityArgs {
    /// SBM parameters as JSON (n <= 12)
    #[arg(long)]
    params: PathBuf,
    /// Window length
    #[arg(long, default_value_t = 3)]
    window: usize,
    /// Write CSV here instead of stdout
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MonteCarloArgs {
    /// SBM family as JSON: {"p": [..], "Q": [[..]], "scaling": "constant|log_over_n|inverse_n"}
    #[arg(long)]
    family: PathBuf,
    /// Graph sizes
    #[arg(long, value_delimiter = ',', required = true)]
    ns: Vec<usize>,
    /// Block size (default: chosen per n)
    #[arg(long, value_parser = block_size)]
    k: Option<usize>,
    /// Probability estimator
    #[arg(long, value_enum, default_value = "kt")]
    mode: Mode,
    /// Graphs sampled per size
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write CSV here instead of stdout
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct UniversalityArgs {
    #[command(flatten)]
    common: MonteCarloArgs,
}

#[derive(Args, Debug)]
struct BcGapArgs {
    #[command(flatten)]
    common: MonteCarloArgs,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidBlockSize(_) | Error::InvalidParams(_) => Failure::Usage(e.to_string()),
            e => Failure::Data(e),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|source| {
        Failure::Usage(format!("cannot read {}: {source}", path.display()))
    })
}

fn read_text(path: &Path) -> CliResult<String> {
    String::from_utf8(read(path)?)
        .map_err(|_| Failure::Data(Error::Parse { line: 0, msg: format!("{} is not UTF-8", path.display()) }))
}

fn write(path: &Path, data: &[u8]) -> CliResult<()> {
    fs::write(path, data).map_err(|source| {
        Failure::Data(Error::Io {
            path: path.to_path_buf(),
            source,
        })
    })
}

fn emit(output: Option<&Path>, text: &str) -> CliResult<()> {
    match output {
        Some(path) => write(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_family(path: &Path) -> CliResult<SbmFamily> {
    Ok(SbmFamily::from_json(&read_text(path)?)?)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Compress(a) => {
            let text = read(&a.input)?;
            let loaded = load_edgelist(text.as_slice(), a.indexing.into())?;
            let g = loaded.graph;
            let k = a.k.unwrap_or_else(|| default_k(g.n() as u64));
            let bytes = compress(&g, k, a.mode.into())?;
            write(&a.output, &bytes)?;
            if loaded.dropped_duplicates + loaded.dropped_self_loops > 0 {
                eprintln!(
                    "dropped {} duplicate edges and {} self-loops",
                    loaded.dropped_duplicates, loaded.dropped_self_loops
                );
            }
            eprintln!(
                "n={} edges={} k={k} -> {} bytes",
                g.n(),
                g.edge_count(),
                bytes.len()
            );
        }
        Command::Decompress(a) => {
            let g = decompress(&read(&a.input)?)?;
            write(&a.output, write_edgelist(&g).as_bytes())?;
        }
        Command::Gen(a) => {
            let params = SbmParams::from_json(&read_text(&a.params)?)?;
            let (g, labels) = sample_sbm(&params, a.seed);
            write(&a.output, write_edgelist(&g).as_bytes())?;
            if let Some(path) = a.labels {
                let text: String = labels.iter().map(|l| format!("{l}\n")).collect();
                write(&path, text.as_bytes())?;
            }
        }
        Command::Bench(a) => {
            if a.datasets.is_empty() && a.synthetic.is_empty() {
                return Err(Failure::Usage(
                    "bench needs at least one of --datasets or --synthetic".into(),
                ));
            }
            let mut datasets = Vec::new();
            for path in &a.datasets {
                if !path.exists() {
                    return Err(Failure::Usage(format!("no such file: {}", path.display())));
                }
                datasets.push(Dataset::from_file(path, a.indexing.into())?);
            }
            for path in &a.synthetic {
                let params = SbmParams::from_json(&read_text(path)?)?;
                let name = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                datasets.push(Dataset::synthetic(name, &params, a.seed));
            }
            let config = BenchConfig {
                ks: a.ks,
                estimators: a.modes.into_iter().map(Into::into).collect(),
                methods: a.methods.into_iter().map(Into::into).collect(),
            };
            let rows = run_bench(&datasets, &config)?;
            match a.csv {
                Some(path) => write(&path, bench_csv(&rows).as_bytes())?,
                None => print!("{}", bench_table(&rows)),
            }
        }
        Command::Analyze { command } => match command {
            AnalyzeCommand::Nonstationarity(a) => {
                let params = SbmParams::from_json(&read_text(&a.params)?)?;
                let rows = nonstationarity_report(&params, a.window)?;
                emit(a.output.as_deref(), &nonstationarity_csv(&rows))?;
            }
            AnalyzeCommand::Universality(UniversalityArgs { common: a }) => {
                let family = load_family(&a.family)?;
                let mut points = Vec::new();
                for &n in &a.ns {
                    let params = family.at(n)?;
                    let k = a.k.unwrap_or_else(|| default_k(n as u64));
                    points.extend(universality_curve(&[params], k, a.mode.into(), a.trials, a.seed)?);
                }
                emit(a.output.as_deref(), &universality_csv(&points))?;
            }
            AnalyzeCommand::BcGap(BcGapArgs { common: a }) => {
                let family = load_family(&a.family)?;
                if family.scaling != Scaling::InverseN {
                    return Err(Failure::Usage("bc-gap needs a family with inverse_n scaling".into()));
                }
                let mut points = Vec::new();
                for &n in &a.ns {
                    let params = family.at(n)?;
                    let k = a.k.unwrap_or_else(|| default_k(n as u64));
                    points.push(second_order_gap(&params, k, a.mode.into(), a.trials, a.seed)?);
                }
                emit(a.output.as_deref(), &gap_csv(&points))?;
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
