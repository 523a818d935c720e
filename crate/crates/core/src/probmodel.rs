//! KT and Laplace sequential probability assignments.
//!
//! Both estimators are kept in integer form so the coder sees exact model
//! probabilities:
//!
//! * KT: `q(i | x^j) = (2 N_i + 1) / (2 j + m)`
//! * Laplace: `q(i | x^j) = (N_i + 1) / (j + m)`

use std::f64::consts::{E, PI};

use num_bigint::BigUint;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    /// Krichevsky–Trofimov, add one half.
    #[default]
    Kt,
    /// Add one.
    Laplace,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Kt => "kt",
            Estimator::Laplace => "laplace",
        }
    }

    /// Integer weight contributed by each observation of a symbol.
    #[inline]
    fn step(self) -> u64 {
        match self {
            Estimator::Kt => 2,
            Estimator::Laplace => 1,
        }
    }
}

impl std::str::FromStr for Estimator {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "kt" => Ok(Estimator::Kt),
            "laplace" => Ok(Estimator::Laplace),
            other => Err(format!("unknown estimator `{other}` (expected kt or laplace)")),
        }
    }
}

impl std::fmt::Display for Estimator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Binary indexed tree over symbol frequencies.
#[derive(Clone, Debug)]
struct FenwickTree {
    tree: Vec<u64>,
    top_bit: usize,
}

impl FenwickTree {
    /// Every leaf starts at 1.
    fn ones(len: usize) -> Self {
        let mut tree = vec![0u64; len + 1];
        for i in 1..=len {
            tree[i] += 1;
            let parent = i + (i & i.wrapping_neg());
            if parent <= len {
                tree[parent] += tree[i];
            }
        }
        let top_bit = if len == 0 { 0 } else { 1 << (usize::BITS - 1 - len.leading_zeros()) };
        Self { tree, top_bit }
    }

    fn add(&mut self, index: usize, delta: u64) {
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum of leaves `0..end`.
    fn prefix(&self, end: usize) -> u64 {
        let mut i = end;
        let mut acc = 0;
        while i > 0 {
            acc += self.tree[i];
            i &= i - 1;
        }
        acc
    }

    /// Largest `idx` with `prefix(idx) <= target`, together with `prefix(idx)`.
    fn search(&self, mut target: u64) -> (usize, u64) {
        let mut pos = 0;
        let mut below = 0;
        let mut step = self.top_bit;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
                below += self.tree[next];
            }
            step >>= 1;
        }
        (pos, below)
    }
}

/// Interval of one symbol inside `[0, total)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymbolRange {
    pub low: u64,
    pub freq: u64,
    pub total: u64,
}

/// Per-stream adaptive model: symbol counts plus a prefix-sum index over the
/// integer frequencies.
#[derive(Clone, Debug)]
pub struct AdaptiveModel {
    m: usize,
    estimator: Estimator,
    counts: Vec<u64>,
    seen: u64,
    cumulative: FenwickTree,
}

impl AdaptiveModel {
    /// Fresh model over `m >= 2` symbols.
    pub fn new(m: usize, estimator: Estimator) -> Self {
        assert!(m >= 2, "alphabet needs at least two symbols");
        Self {
            m,
            estimator,
            counts: vec![0; m],
            seen: 0,
            cumulative: FenwickTree::ones(m),
        }
    }

    pub fn alphabet_size(&self) -> usize {
        self.m
    }

    pub fn estimator(&self) -> Estimator {
        self.estimator
    }

    /// `N_i`.
    pub fn count(&self, symbol: usize) -> u64 {
        self.counts[symbol]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `j`, the number of symbols observed so far.
    pub fn total(&self) -> u64 {
        self.seen
    }

    /// Integer weight of `symbol`: `2N_i + 1` (KT) or `N_i + 1` (Laplace).
    #[inline]
    pub fn frequency(&self, symbol: usize) -> u64 {
        self.estimator.step() * self.counts[symbol] + 1
    }

    /// `2j + m` (KT) or `j + m` (Laplace).
    #[inline]
    pub fn total_frequency(&self) -> u64 {
        self.estimator.step() * self.seen + self.m as u64
    }

    /// Cumulative frequency of symbols `< symbol`.
    #[inline]
    pub fn cumulative_below(&self, symbol: usize) -> u64 {
        self.cumulative.prefix(symbol)
    }

    #[inline]
    pub fn range_of(&self, symbol: usize) -> SymbolRange {
        SymbolRange {
            low: self.cumulative_below(symbol),
            freq: self.frequency(symbol),
            total: self.total_frequency(),
        }
    }

    /// The symbol whose interval contains `target < total_frequency()`.
    #[inline]
    pub fn symbol_at(&self, target: u64) -> (usize, SymbolRange) {
        debug_assert!(target < self.total_frequency());
        let (symbol, low) = self.cumulative.search(target);
        let symbol = symbol.min(self.m - 1);
        (
            symbol,
            SymbolRange {
                low,
                freq: self.frequency(symbol),
                total: self.total_frequency(),
            },
        )
    }

    /// Exact conditional probability of `symbol` given everything observed.
    pub fn conditional(&self, symbol: usize) -> Ratio<u64> {
        Ratio::new(self.frequency(symbol), self.total_frequency())
    }

    /// Records one occurrence of `symbol`.
    #[inline]
    pub fn update(&mut self, symbol: usize) {
        self.counts[symbol] += 1;
        self.seen += 1;
        self.cumulative.add(symbol, self.estimator.step());
    }
}

/// Largest sequence for which exact rational marginals are computed.
pub const EXACT_MARGINAL_MAX_LEN: usize = 10_000;

fn check_sequence(sequence: &[usize], m: usize) -> Result<()> {
    if sequence.len() > EXACT_MARGINAL_MAX_LEN {
        return Err(Error::TooLarge(format!(
            "exact marginal of {} symbols (limit {EXACT_MARGINAL_MAX_LEN})",
            sequence.len()
        )));
    }
    if let Some(&bad) = sequence.iter().find(|&&s| s >= m) {
        return Err(Error::SymbolOutOfRange {
            symbol: bad as u64,
            m: m as u64,
        });
    }
    Ok(())
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

/// Closed-form marginal `q(x^N)`.
///
/// * KT: `Π_i (2N_i − 1)!! / (m (m+2) ⋯ (m + 2N − 2))`
/// * Laplace: `(Π_i N_i! / N!) / C(N + m − 1, m − 1)`
pub fn marginal(sequence: &[usize], m: usize, estimator: Estimator) -> Result<BigRational> {
    check_sequence(sequence, m)?;
    let mut counts = vec![0u64; m];
    for &s in sequence {
        counts[s] += 1;
    }
    let n = sequence.len() as u64;
    let m64 = m as u64;

    let (num, den) = match estimator {
        Estimator::Kt => {
            let mut num = BigUint::one();
            for &c in counts.iter().filter(|&&c| c > 0) {
                for odd in (1..2 * c).step_by(2) {
                    num *= big(odd);
                }
            }
            let mut den = BigUint::one();
            for j in 0..n {
                den *= big(m64 + 2 * j);
            }
            (num, den)
        }
        Estimator::Laplace => {
            // Π N_i! · (m−1)! / (N + m − 1)!
            let mut num = BigUint::one();
            for &c in &counts {
                for f in 2..=c {
                    num *= big(f);
                }
            }
            let mut den = BigUint::one();
            for f in m64..n + m64 {
                den *= big(f);
            }
            (num, den)
        }
    };
    Ok(BigRational::new(num.into(), den.into()))
}

/// Marginal as the product of sequential conditionals (chain rule).
pub fn sequential_marginal(
    sequence: &[usize],
    m: usize,
    estimator: Estimator,
) -> Result<BigRational> {
    check_sequence(sequence, m)?;
    let mut model = AdaptiveModel::new(m, estimator);
    let mut acc = BigRational::one();
    for &s in sequence {
        let q = model.conditional(s);
        acc *= BigRational::new((*q.numer()).into(), (*q.denom()).into());
        model.update(s);
    }
    Ok(acc)
}

/// `−log₂ q(x^N)` accumulated in floating point; no length limit.
pub fn ideal_code_length_bits(sequence: &[usize], m: usize, estimator: Estimator) -> f64 {
    let mut model = AdaptiveModel::new(m, estimator);
    let mut bits = 0.0;
    for &s in sequence {
        bits -= (model.frequency(s) as f64 / model.total_frequency() as f64).log2();
        model.update(s);
    }
    bits
}

/// `−log₂` of an exact positive rational.
pub fn neg_log2(q: &BigRational) -> f64 {
    assert!(*q > BigRational::zero());
    let log2 = |x: &num_bigint::BigInt| {
        let bits = x.bits();
        let shift = bits.saturating_sub(60);
        let top: u64 = (x >> shift).try_into().expect("fits after shift");
        (top as f64).log2() + shift as f64
    };
    log2(q.denom()) - log2(q.numer())
}

/// Expected-length bound for Laplace coding of `N` identically distributed
/// symbols with single-letter entropy `H1`: `m log(2eN) + N H1`.
pub fn laplace_length_bound_bits(n: u64, m: u64, h1: f64) -> f64 {
    m as f64 * (2.0 * E * n as f64).log2() + n as f64 * h1
}

/// Expected-length bound for KT coding:
/// `(m/2) log(e(1 + 2N/m)) + ½ log(πN) + N H1`.
pub fn kt_length_bound_bits(n: u64, m: u64, h1: f64) -> f64 {
    let (n, m) = (n as f64, m as f64);
    m / 2.0 * (E * (1.0 + 2.0 * n / m)).log2() + 0.5 * (PI * n).log2() + n * h1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(num: u64, den: u64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    #[test]
    fn fresh_kt_binary_is_fair() {
        let model = AdaptiveModel::new(2, Estimator::Kt);
        assert_eq!(model.conditional(0), Ratio::new(1, 2));
        assert_eq!(model.conditional(1), Ratio::new(1, 2));
    }

    #[test]
    fn kt_after_one_one_two() {
        // Symbols are 0-based here: (1, 1, 2) becomes (0, 0, 1).
        let mut model = AdaptiveModel::new(2, Estimator::Kt);
        for s in [0, 0, 1] {
            model.update(s);
        }
        assert_eq!(model.conditional(0), Ratio::new(5, 8));
    }

    #[test]
    fn laplace_after_one() {
        let mut model = AdaptiveModel::new(2, Estimator::Laplace);
        model.update(0);
        assert_eq!(model.conditional(1), Ratio::new(1, 3));
    }

    #[test]
    fn update_bookkeeping() {
        let mut model = AdaptiveModel::new(8, Estimator::Kt);
        model.update(3);
        assert_eq!(model.count(3), 1);
        assert_eq!(model.total(), 1);
        model.update(3);
        assert_eq!(model.count(3), 2);
        for s in 0..8 {
            model.update(s);
        }
        assert_eq!(model.total(), 10);
        assert_eq!(model.counts().iter().sum::<u64>(), model.total());
    }

    #[test]
    fn conditionals_normalize_every_step() {
        for estimator in [Estimator::Kt, Estimator::Laplace] {
            let mut model = AdaptiveModel::new(5, estimator);
            for s in [0, 4, 4, 2, 1, 4, 0, 3, 3, 3] {
                let sum = (0..5).fold(Ratio::new(0u64, 1), |acc, i| acc + model.conditional(i));
                assert_eq!(sum, Ratio::new(1, 1));
                model.update(s);
            }
        }
    }

    #[test]
    fn cumulative_search_matches_prefix_sums() {
        let mut model = AdaptiveModel::new(37, Estimator::Kt);
        for s in [0, 5, 5, 36, 17, 17, 17, 2] {
            model.update(s);
        }
        let mut low = 0;
        for s in 0..37 {
            assert_eq!(model.cumulative_below(s), low);
            let freq = model.frequency(s);
            for target in [low, low + freq - 1] {
                let (found, range) = model.symbol_at(target);
                assert_eq!(found, s);
                assert_eq!(range.low, low);
            }
            low += freq;
        }
        assert_eq!(low, model.total_frequency());
    }

    #[test]
    fn marginal_examples() {
        assert_eq!(marginal(&[0, 1], 2, Estimator::Kt).unwrap(), ratio(1, 8));
        assert_eq!(sequential_marginal(&[0, 1], 2, Estimator::Kt).unwrap(), ratio(1, 8));
        assert_eq!(marginal(&[0, 0], 2, Estimator::Kt).unwrap(), ratio(3, 8));
        assert_eq!(sequential_marginal(&[0, 0], 2, Estimator::Kt).unwrap(), ratio(3, 8));
        assert_eq!(marginal(&[0, 1], 2, Estimator::Laplace).unwrap(), ratio(1, 6));
        assert_eq!(
            sequential_marginal(&[0, 1], 2, Estimator::Laplace).unwrap(),
            ratio(1, 6)
        );
        assert_eq!(marginal(&[], 7, Estimator::Kt).unwrap(), ratio(1, 1));
    }

    #[test]
    fn eight_ones_kt() {
        let q = marginal(&[0; 8], 2, Estimator::Kt).unwrap();
        assert_eq!(q, ratio(2_027_025, 10_321_920));
        assert!((neg_log2(&q) - 2.348).abs() < 1e-3);
        assert!((ideal_code_length_bits(&[0; 8], 2, Estimator::Kt) - neg_log2(&q)).abs() < 1e-12);
    }

    #[test]
    fn marginal_guards() {
        assert!(matches!(
            marginal(&vec![0; EXACT_MARGINAL_MAX_LEN + 1], 2, Estimator::Kt),
            Err(Error::TooLarge(_))
        ));
        assert!(matches!(
            marginal(&[0, 2], 2, Estimator::Kt),
            Err(Error::SymbolOutOfRange { .. })
        ));
    }

    #[test]
    fn kt_beats_laplace_on_constant_runs() {
        for len in 2..=20 {
            let run = vec![1; len];
            let kt = marginal(&run, 2, Estimator::Kt).unwrap();
            let lp = marginal(&run, 2, Estimator::Laplace).unwrap();
            assert!(kt > lp, "length {len}");
        }
    }

    #[test]
    fn laplace_bound_examples() {
        assert!((laplace_length_bound_bits(1, 2, 1.0) - 5.885).abs() < 1e-3);
        assert!((laplace_length_bound_bits(100, 2, 0.0) - 18.17).abs() < 1e-2);
        for n in [1u64, 7, 100, 5000] {
            let h1 = 0.3;
            let gap = laplace_length_bound_bits(2 * n, 4, h1) - laplace_length_bound_bits(n, 4, h1);
            assert!(gap >= n as f64 * h1);
        }
    }

    #[test]
    fn kt_bound_examples() {
        let expected = (2.0 * E).log2() + 0.5 * PI.log2() + 1.0;
        assert!((kt_length_bound_bits(1, 2, 1.0) - expected).abs() < 1e-9);
        assert!((kt_length_bound_bits(1, 2, 1.0) - 4.2684).abs() < 1e-4);
        let pure = kt_length_bound_bits(500, 16, 0.0);
        assert!((kt_length_bound_bits(500, 16, 1.5) - pure - 750.0).abs() < 1e-9);
    }

    #[test]
    fn kt_bound_below_laplace_bound_on_grid() {
        let ns = [10u64, 30, 100, 300, 1_000, 3_000, 10_000];
        for &n in &ns {
            for e in 1..=16 {
                let m = 1u64 << e;
                for h1 in [0.0, 0.5, 2.0, e as f64] {
                    assert!(
                        kt_length_bound_bits(n, m, h1) <= laplace_length_bound_bits(n, m, h1),
                        "N={n} m={m} H1={h1}"
                    );
                }
            }
        }
    }
}
