//! Stochastic block models: parameters, sampling, and entropy formulas.
//!
//! All logarithms are base 2. `h` is the binary entropy with `h(0) = h(1) = 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{pair_count, LabeledGraph};

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// `SBM(n, L, p, W)`: vertex labels i.i.d. from `p`, then each pair `i < j`
/// is an edge independently with probability `W[x_i][x_j]`.
///
/// JSON form: `{"n": 100, "L": 2, "p": [0.5, 0.5], "W": [[0.1, 0.01], [0.01, 0.1]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct SbmParams {
    n: usize,
    p: Vec<f64>,
    w: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    n: usize,
    #[serde(rename = "L")]
    l: usize,
    p: Vec<f64>,
    #[serde(rename = "W")]
    w: Vec<Vec<f64>>,
}

impl TryFrom<RawParams> for SbmParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        if raw.p.len() != raw.l {
            return Err(Error::InvalidParams(format!(
                "L = {} but p has {} entries",
                raw.l,
                raw.p.len()
            )));
        }
        SbmParams::new(raw.n, raw.p, raw.w)
    }
}

impl From<SbmParams> for RawParams {
    fn from(params: SbmParams) -> Self {
        RawParams {
            n: params.n,
            l: params.p.len(),
            p: params.p,
            w: params.w,
        }
    }
}

impl SbmParams {
    pub fn new(n: usize, p: Vec<f64>, w: Vec<Vec<f64>>) -> Result<Self> {
        let l = p.len();
        if n == 0 {
            return Err(Error::InvalidParams("n must be positive".into()));
        }
        if l == 0 {
            return Err(Error::InvalidParams("need at least one community".into()));
        }
        if p.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::InvalidParams("p entries must be nonnegative".into()));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!("p sums to {total}, not 1")));
        }
        if w.len() != l || w.iter().any(|row| row.len() != l) {
            return Err(Error::InvalidParams(format!("W must be {l}x{l}")));
        }
        for a in 0..l {
            for b in 0..l {
                let x = w[a][b];
                if !(0.0..=1.0).contains(&x) {
                    return Err(Error::InvalidParams(format!("W[{a}][{b}] = {x} not in [0, 1]")));
                }
                if x != w[b][a] {
                    return Err(Error::InvalidParams(format!("W not symmetric at ({a}, {b})")));
                }
            }
        }
        Ok(Self { n, p, w })
    }

    /// Erdős–Rényi `G(n, q)` as a one-community model.
    pub fn erdos_renyi(n: usize, q: f64) -> Result<Self> {
        Self::new(n, vec![1.0], vec![vec![q]])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn communities(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn w(&self) -> &[Vec<f64>] {
        &self.w
    }

    /// Same model at a different vertex count.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(n, self.p.clone(), self.w.clone())
    }

    /// `pᵀWp`, the marginal probability of any single edge.
    pub fn edge_density(&self) -> f64 {
        self.quadratic_form(|x| x)
    }

    fn quadratic_form(&self, f: impl Fn(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for (a, pa) in self.p.iter().enumerate() {
            for (b, pb) in self.p.iter().enumerate() {
                acc += pa * pb * f(self.w[a][b]);
            }
        }
        acc
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParams(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("params serialize")
    }
}

/// How an edge-probability matrix `W = f(n) Q` scales with `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// `f(n) = 1`.
    Constant,
    /// `f(n) = ln(n) / n`.
    LogOverN,
    /// `f(n) = 1 / n`.
    InverseN,
}

impl Scaling {
    pub fn factor(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            Scaling::Constant => 1.0,
            Scaling::LogOverN => n.ln() / n,
            Scaling::InverseN => 1.0 / n,
        }
    }
}

/// A family `SBM(n, L, p, f(n) Q)` indexed by `n`.
///
/// JSON form: `{"p": [0.5, 0.5], "Q": [[3, 1], [1, 3]], "scaling": "log_over_n"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SbmFamily {
    pub p: Vec<f64>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<f64>>,
    pub scaling: Scaling,
}

impl SbmFamily {
    /// Symmetric family: uniform `p`, `Q_ii = a`, `Q_ij = b`.
    pub fn symmetric(l: usize, a: f64, b: f64, scaling: Scaling) -> Self {
        let q = (0..l)
            .map(|i| (0..l).map(|j| if i == j { a } else { b }).collect())
            .collect();
        Self {
            p: vec![1.0 / l as f64; l],
            q,
            scaling,
        }
    }

    pub fn at(&self, n: usize) -> Result<SbmParams> {
        let f = self.scaling.factor(n);
        let w = self
            .q
            .iter()
            .map(|row| row.iter().map(|&x| x * f).collect())
            .collect();
        SbmParams::new(n, self.p.clone(), w)
    }

    /// `pᵀQp`.
    pub fn lambda(&self) -> f64 {
        let mut acc = 0.0;
        for (a, pa) in self.p.iter().enumerate() {
            for (b, pb) in self.p.iter().enumerate() {
                acc += pa * pb * self.q[a][b];
            }
        }
        acc
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParams(e.to_string()))
    }
}

/// Samples `(A_n, X^n)`. Community labels are 0-based. Deterministic in `seed`.
pub fn sample_sbm(params: &SbmParams, seed: u64) -> (LabeledGraph, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.n;
    let l = params.communities();

    let mut cdf = Vec::with_capacity(l);
    let mut acc = 0.0;
    for &x in &params.p {
        acc += x;
        cdf.push(acc);
    }
    let labels: Vec<usize> = (0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            cdf.iter().position(|&c| u < c).unwrap_or(l - 1)
        })
        .collect();

    let mut g = LabeledGraph::empty(n).expect("n >= 1");
    let mut idx = 0;
    for u in 0..n {
        let row = &params.w[labels[u]];
        for &lv in &labels[u + 1..] {
            let q = row[lv];
            if q > 0.0 && rng.gen::<f64>() < q {
                g.set_bit(idx);
            }
            idx += 1;
        }
    }
    (g, labels)
}

/// Seed for trial `trial` of a Monte-Carlo run started at `seed`.
#[inline]
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_add(trial as u64)
}

/// `H(A_n | X^n) = C(n,2) · pᵀ h(W) p`.
pub fn conditional_entropy_bits(params: &SbmParams) -> f64 {
    pair_count(params.n) as f64 * params.quadratic_form(binary_entropy)
}

/// `C(n,2) · h(pᵀWp)`, an upper bound on `H(A_n)`.
pub fn marginal_entropy_upper_bits(params: &SbmParams) -> f64 {
    pair_count(params.n) as f64 * binary_entropy(params.edge_density())
}

/// First-order sparse approximation `C(n,2) · q · log(1/q)` with `q = pᵀWp`.
pub fn sparse_entropy_approx_bits(params: &SbmParams) -> Result<f64> {
    let q = params.edge_density();
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Undefined("sparse entropy approximation"));
    }
    Ok(pair_count(params.n) as f64 * q * (1.0 / q).log2())
}

pub const BRUTE_FORCE_MAX_N: usize = 6;
pub const BRUTE_FORCE_MAX_L: usize = 3;

/// Exact law of `A_n` over all `2^{C(n,2)}` graphs. Entry `a` is the
/// probability of the graph whose upper-triangle bit `t` (row-major) is bit
/// `t` of `a`.
pub fn graph_distribution(params: &SbmParams) -> Result<Vec<f64>> {
    let n = params.n;
    let l = params.communities();
    if n > BRUTE_FORCE_MAX_N || l > BRUTE_FORCE_MAX_L {
        return Err(Error::TooLarge(format!(
            "n = {n}, L = {l} (limits n <= {BRUTE_FORCE_MAX_N}, L <= {BRUTE_FORCE_MAX_L})"
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let size = 1usize << pairs.len();
    let mut dist = vec![0.0; size];
    let mut scratch = vec![0.0; size];

    for labels in assignments(n, l) {
        let weight: f64 = labels.iter().map(|&x| params.p[x]).product();
        if weight == 0.0 {
            continue;
        }
        scratch[0] = weight;
        let mut len = 1;
        for (t, &(u, v)) in pairs.iter().enumerate() {
            let q = params.w[labels[u]][labels[v]];
            let bit = 1usize << t;
            for a in 0..len {
                let base = scratch[a];
                scratch[a | bit] = base * q;
                scratch[a] = base * (1.0 - q);
            }
            len <<= 1;
        }
        for (d, s) in dist.iter_mut().zip(&scratch) {
            *d += s;
        }
    }
    Ok(dist)
}

/// Every labelling `[L]^n`, lexicographic.
pub(crate) fn assignments(n: usize, l: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = l.pow(n as u32);
    (0..total).map(move |mut code| {
        let mut labels = vec![0; n];
        for slot in labels.iter_mut().rev() {
            *slot = code % l;
            code /= l;
        }
        labels
    })
}

/// `H(A_n)` by full enumeration. Limited to `n <= 6`, `L <= 3`.
pub fn exact_entropy_bruteforce_bits(params: &SbmParams) -> Result<f64> {
    let dist = graph_distribution(params)?;
    Ok(dist
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum())
}
