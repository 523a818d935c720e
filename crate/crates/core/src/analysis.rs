//! Theory-facing computations: exact window probabilities under different
//! orderings of the upper triangle, Monte-Carlo universality curves, and the
//! second-order (BC-entropy) length statistic for sparse symmetric SBMs.
//!
//! Code lengths measured here are the two code streams only. The container
//! header carries `n` and `k`, which the decoder is assumed to know.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::container::{compress, ContainerHeader};
use crate::error::{Error, Result};
use crate::graph::pair_count;
use crate::probmodel::Estimator;
use crate::sbm::{assignments, conditional_entropy_bits, sample_sbm, trial_seed, SbmParams};

/// Ways of listing the `C(n,2)` upper-triangle entries as a sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderingKind {
    /// Row by row: `A_12, ..., A_1n, A_23, ..., A_{n-1,n}`.
    Horizontal,
    /// Column by column: `A_12, A_13, A_23, A_14, ...`.
    Vertical,
    /// Cyclic diagonals `S_1, S_2, ...` with `S_d = A_{1,1+d}, A_{2,2+d}, ...`
    /// taken modulo `n`.
    Diagonal,
}

impl OrderingKind {
    pub const ALL: [OrderingKind; 3] = [
        OrderingKind::Horizontal,
        OrderingKind::Vertical,
        OrderingKind::Diagonal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OrderingKind::Horizontal => "horizontal",
            OrderingKind::Vertical => "vertical",
            OrderingKind::Diagonal => "diagonal",
        }
    }

    /// 1-based vertex pairs in listing order. Diagonal entries wrap around,
    /// so a pair may appear as `(4, 1)`.
    pub fn pairs(self, n: usize) -> Vec<(usize, usize)> {
        match self {
            OrderingKind::Horizontal => (1..=n)
                .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
                .collect(),
            OrderingKind::Vertical => (1..=n)
                .flat_map(|j| (1..j).map(move |i| (i, j)))
                .collect(),
            OrderingKind::Diagonal => {
                let mut out = Vec::with_capacity(pair_count(n));
                for d in 1..=n / 2 {
                    let len = if 2 * d == n { n / 2 } else { n };
                    out.extend((1..=len).map(|i| (i, (i - 1 + d) % n + 1)));
                }
                out
            }
        }
    }
}

/// Largest `n` accepted by the brute-force probability routines.
pub const JOINT_MAX_N: usize = 12;

fn check_small(params: &SbmParams) -> Result<()> {
    if params.n() > JOINT_MAX_N {
        return Err(Error::TooLarge(format!(
            "n = {} (limit {JOINT_MAX_N})",
            params.n()
        )));
    }
    Ok(())
}

/// `P(A_ij = b for every (i, j, b) in constraints)` by summing over all
/// labellings `x ∈ [L]^n`. Vertices are 1-based; pair order is irrelevant.
pub fn joint_probability(params: &SbmParams, constraints: &[(usize, usize, bool)]) -> Result<f64> {
    check_small(params)?;
    let n = params.n();
    for &(i, j, _) in constraints {
        if i == 0 || j == 0 || i > n || j > n || i == j {
            return Err(Error::VertexOutOfRange { i, j, n });
        }
    }
    let w = params.w();
    let p = params.p();
    let mut total = 0.0;
    for x in assignments(n, params.communities()) {
        let mut prob: f64 = x.iter().map(|&c| p[c]).product();
        for &(i, j, bit) in constraints {
            if prob == 0.0 {
                break;
            }
            let q = w[x[i - 1]][x[j - 1]];
            prob *= if bit { q } else { 1.0 - q };
        }
        total += prob;
    }
    Ok(total)
}

/// Largest pattern-wise gap between the length-`window` windows starting at
/// 1-based positions `a` and `b` of an ordering.
pub fn window_gap(
    params: &SbmParams,
    kind: OrderingKind,
    a: usize,
    b: usize,
    window: usize,
) -> Result<(f64, Vec<bool>)> {
    let pairs = kind.pairs(params.n());
    let fits = |s: usize| s >= 1 && s + window - 1 <= pairs.len();
    if window == 0 || !fits(a) || !fits(b) {
        return Err(Error::InvalidParams(format!(
            "windows at {a} and {b} of length {window} do not fit in {} entries",
            pairs.len()
        )));
    }
    let mut best = (0.0, vec![false; window]);
    for code in 0..1usize << window {
        let pattern: Vec<bool> = (0..window).map(|t| (code >> (window - 1 - t)) & 1 == 1).collect();
        let at = |s: usize| -> Vec<(usize, usize, bool)> {
            pattern
                .iter()
                .zip(&pairs[s - 1..s - 1 + window])
                .map(|(&bit, &(i, j))| (i, j, bit))
                .collect()
        };
        let gap = (joint_probability(params, &at(a))? - joint_probability(params, &at(b))?).abs();
        if gap > best.0 {
            best = (gap, pattern);
        }
    }
    Ok(best)
}

/// Gaps below this are floating-point noise.
const GAP_EPS: f64 = 1e-12;

/// Witness of non-stationarity for one ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct NonstationarityRow {
    pub ordering: OrderingKind,
    pub window: usize,
    /// 1-based start positions of the two windows, or `None` if every pair
    /// of windows has the same law.
    pub positions: Option<(usize, usize)>,
    pub pattern: Vec<bool>,
    pub prob_a: f64,
    pub prob_b: f64,
    pub gap: f64,
}

/// For each ordering, the pair of window positions whose window laws differ
/// the most (first such pair on ties).
pub fn nonstationarity_report(params: &SbmParams, window: usize) -> Result<Vec<NonstationarityRow>> {
    check_small(params)?;
    let mut rows = Vec::new();
    for kind in OrderingKind::ALL {
        let pairs = kind.pairs(params.n());
        if window == 0 || window > pairs.len() {
            return Err(Error::InvalidParams(format!(
                "window {window} does not fit in {} entries",
                pairs.len()
            )));
        }
        let starts = pairs.len() - window + 1;
        let patterns = 1usize << window;
        // law[s][code] = P(window at s reads `code`)
        let mut law = vec![vec![0.0; patterns]; starts];
        for (s, row) in law.iter_mut().enumerate() {
            for (code, slot) in row.iter_mut().enumerate() {
                let constraints: Vec<_> = (0..window)
                    .map(|t| {
                        let (i, j) = pairs[s + t];
                        (i, j, (code >> (window - 1 - t)) & 1 == 1)
                    })
                    .collect();
                *slot = joint_probability(params, &constraints)?;
            }
        }
        let mut best: Option<(f64, usize, usize, usize)> = None;
        for a in 0..starts {
            for b in a + 1..starts {
                for code in 0..patterns {
                    let gap = (law[a][code] - law[b][code]).abs();
                    if gap > GAP_EPS && best.is_none_or(|(g, ..)| gap > g + GAP_EPS) {
                        best = Some((gap, a, b, code));
                    }
                }
            }
        }
        rows.push(match best {
            Some((gap, a, b, code)) => NonstationarityRow {
                ordering: kind,
                window,
                positions: Some((a + 1, b + 1)),
                pattern: (0..window).map(|t| (code >> (window - 1 - t)) & 1 == 1).collect(),
                prob_a: law[a][code],
                prob_b: law[b][code],
                gap,
            },
            None => NonstationarityRow {
                ordering: kind,
                window,
                positions: None,
                pattern: Vec::new(),
                prob_a: 0.0,
                prob_b: 0.0,
                gap: 0.0,
            },
        });
    }
    Ok(rows)
}

/// CSV columns: `ordering,window,pos_a,pos_b,pattern,prob_a,prob_b,gap`.
pub fn nonstationarity_csv(rows: &[NonstationarityRow]) -> String {
    let mut out = String::from("ordering,window,pos_a,pos_b,pattern,prob_a,prob_b,gap\n");
    for r in rows {
        let (a, b) = r
            .positions
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .unwrap_or_default();
        let pattern: String = r.pattern.iter().map(|&b| if b { '1' } else { '0' }).collect();
        let _ = writeln!(
            out,
            "{},{},{a},{b},{pattern},{},{},{}",
            r.ordering.name(),
            r.window,
            r.prob_a,
            r.prob_b,
            r.gap
        );
    }
    out
}

/// Code-stream length in bits of `C_k` applied to `g`.
fn code_length_bits(g: &crate::graph::LabeledGraph, k: usize, estimator: Estimator) -> Result<u64> {
    let bytes = compress(g, k, estimator)?;
    Ok(ContainerHeader::parse(&bytes)?.payload_bits())
}

/// Monte-Carlo mean and standard error of the code length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LengthSample {
    pub mean_bits: f64,
    pub std_err_bits: f64,
}

pub fn sample_code_lengths(
    params: &SbmParams,
    k: usize,
    estimator: Estimator,
    trials: usize,
    seed: u64,
) -> Result<LengthSample> {
    if trials == 0 {
        return Err(Error::InvalidParams("need at least one trial".into()));
    }
    let lengths = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (g, _) = sample_sbm(params, trial_seed(seed, t));
            code_length_bits(&g, k, estimator).map(|b| b as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = lengths.iter().sum::<f64>() / trials as f64;
    let std_err = if trials > 1 {
        let var = lengths.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        (var / trials as f64).sqrt()
    } else {
        0.0
    };
    Ok(LengthSample {
        mean_bits: mean,
        std_err_bits: std_err,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniversalityPoint {
    pub n: usize,
    pub mean_length_bits: f64,
    pub std_err_bits: f64,
    pub h_cond_bits: f64,
    /// `mean_length / H(A_n | X^n)`; infinite when the entropy is zero.
    pub ratio: f64,
}

/// Expected code length against `H(A_n | X^n)` for each model. Since the
/// conditional entropy is a lower bound on `H(A_n)`, the ratio slightly
/// overstates `E[ℓ] / H(A_n)`.
pub fn universality_curve(
    params_list: &[SbmParams],
    k: usize,
    estimator: Estimator,
    trials: usize,
    seed: u64,
) -> Result<Vec<UniversalityPoint>> {
    params_list
        .iter()
        .map(|params| {
            let sample = sample_code_lengths(params, k, estimator, trials, seed)?;
            let h = conditional_entropy_bits(params);
            Ok(UniversalityPoint {
                n: params.n(),
                mean_length_bits: sample.mean_bits,
                std_err_bits: sample.std_err_bits,
                h_cond_bits: h,
                ratio: if h > 0.0 { sample.mean_bits / h } else { f64::INFINITY },
            })
        })
        .collect()
}

/// CSV columns: `n,mean_length_bits,std_err_bits,h_cond_bits,ratio`.
pub fn universality_csv(points: &[UniversalityPoint]) -> String {
    let mut out = String::from("n,mean_length_bits,std_err_bits,h_cond_bits,ratio\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{:.3},{:.3},{:.3},{:.6}",
            p.n, p.mean_length_bits, p.std_err_bits, p.h_cond_bits, p.ratio
        );
    }
    out
}

/// BC entropy of the Poisson(λ) Galton–Watson tree, `(λ/2) log₂(e/λ)`.
pub fn gwt_bc_entropy_bits(lambda: f64) -> Result<f64> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::InvalidParams(format!("mean degree {lambda} must be positive")));
    }
    Ok(lambda / 2.0 * (std::f64::consts::E / lambda).log2())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapPoint {
    pub n: usize,
    pub lambda: f64,
    pub mean_length_bits: f64,
    /// `(E[ℓ] − m log₂ n) / n` with `m = C(n,2) λ / n`.
    pub statistic: f64,
    pub std_err: f64,
    /// `(λ/2) log₂(e/λ)`.
    pub target: f64,
}

/// Second-order length statistic for a sparse model `W = Q / n`; `λ` is
/// recovered as `n · pᵀWp`.
pub fn second_order_gap(
    params: &SbmParams,
    k: usize,
    estimator: Estimator,
    trials: usize,
    seed: u64,
) -> Result<GapPoint> {
    let n = params.n();
    let lambda = n as f64 * params.edge_density();
    let expected_edges = pair_count(n) as f64 * lambda / n as f64;
    let sample = sample_code_lengths(params, k, estimator, trials, seed)?;
    let nf = n as f64;
    Ok(GapPoint {
        n,
        lambda,
        mean_length_bits: sample.mean_bits,
        statistic: (sample.mean_bits - expected_edges * nf.log2()) / nf,
        std_err: sample.std_err_bits / nf,
        target: gwt_bc_entropy_bits(lambda)?,
    })
}

/// CSV columns: `n,lambda,mean_length_bits,statistic,std_err,target`.
pub fn gap_csv(points: &[GapPoint]) -> String {
    let mut out = String::from("n,lambda,mean_length_bits,statistic,std_err,target\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{:.3},{:.6},{:.6},{:.6}",
            p.n, p.lambda, p.mean_length_bits, p.statistic, p.std_err, p.target
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two equiprobable communities, edges exactly within communities.
    fn two_cliques_model(n: usize) -> SbmParams {
        SbmParams::new(n, vec![0.5, 0.5], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn orderings_are_permutations() {
        for n in 2..=9 {
            for kind in OrderingKind::ALL {
                let mut pairs: Vec<_> = kind
                    .pairs(n)
                    .into_iter()
                    .map(|(i, j)| (i.min(j), i.max(j)))
                    .collect();
                assert_eq!(pairs.len(), pair_count(n), "{kind:?} n={n}");
                pairs.sort();
                pairs.dedup();
                assert_eq!(pairs.len(), pair_count(n), "{kind:?} n={n}");
            }
        }
    }

    #[test]
    fn n4_listings() {
        assert_eq!(
            OrderingKind::Horizontal.pairs(4),
            vec![(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
        );
        assert_eq!(
            OrderingKind::Vertical.pairs(4),
            vec![(1, 2), (1, 3), (2, 3), (1, 4), (2, 4), (3, 4)]
        );
        assert_eq!(
            OrderingKind::Diagonal.pairs(4),
            vec![(1, 2), (2, 3), (3, 4), (4, 1), (1, 3), (2, 4)]
        );
    }

    #[test]
    fn joint_examples() {
        let params = two_cliques_model(4);
        let p = joint_probability(&params, &[(1, 2, true), (1, 3, false), (1, 4, true)]).unwrap();
        assert_eq!(p, 0.125);
        let p = joint_probability(&params, &[(2, 3, true), (2, 4, false), (3, 4, true)]).unwrap();
        assert_eq!(p, 0.0);
        assert!((joint_probability(&params, &[]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn joint_guards() {
        let big = SbmParams::erdos_renyi(13, 0.5).unwrap();
        assert!(joint_probability(&big, &[]).is_err());
        let params = two_cliques_model(4);
        assert!(joint_probability(&params, &[(1, 1, true)]).is_err());
        assert!(joint_probability(&params, &[(1, 5, true)]).is_err());
    }

    #[test]
    fn completions_sum_to_one() {
        let params = SbmParams::new(
            6,
            vec![0.3, 0.7],
            vec![vec![0.8, 0.15], vec![0.15, 0.4]],
        )
        .unwrap();
        let index_set = [(1, 2), (2, 5), (3, 6), (1, 6)];
        let mut total = 0.0;
        for code in 0..16 {
            let constraints: Vec<_> = index_set
                .iter()
                .enumerate()
                .map(|(t, &(i, j))| (i, j, (code >> t) & 1 == 1))
                .collect();
            total += joint_probability(&params, &constraints).unwrap();
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn horizontal_gap_at_one_and_four() {
        let params = two_cliques_model(4);
        let (gap, _) = window_gap(&params, OrderingKind::Horizontal, 1, 4, 3).unwrap();
        assert!(gap >= 0.125);
    }

    #[test]
    fn report_finds_gaps_for_block_model() {
        let rows = nonstationarity_report(&two_cliques_model(4), 3).unwrap();
        assert_eq!(rows.len(), 3);
        for row in &rows {
            assert!(row.gap > 0.0, "{:?}", row.ordering);
            assert!(row.positions.is_some());
        }
    }

    #[test]
    fn report_is_flat_for_erdos_renyi() {
        let params = SbmParams::erdos_renyi(5, 0.3).unwrap();
        for row in nonstationarity_report(&params, 3).unwrap() {
            assert_eq!(row.positions, None);
            assert_eq!(row.gap, 0.0);
        }
    }

    #[test]
    fn bc_entropy_values() {
        assert!(gwt_bc_entropy_bits(std::f64::consts::E).unwrap().abs() < 1e-15);
        assert!((gwt_bc_entropy_bits(2.0).unwrap() - 0.442_695).abs() < 1e-6);
        assert!((gwt_bc_entropy_bits(1.0).unwrap() - 0.721_348).abs() < 1e-6);
        assert!(gwt_bc_entropy_bits(5.0).unwrap() < 0.0);
        assert!(gwt_bc_entropy_bits(0.0).is_err());
        assert!(gwt_bc_entropy_bits(-1.0).is_err());
    }

    #[test]
    fn degenerate_universality_point() {
        let full = SbmParams::erdos_renyi(40, 1.0).unwrap();
        let points = universality_curve(&[full], 2, Estimator::Kt, 2, 0).unwrap();
        assert_eq!(points[0].h_cond_bits, 0.0);
        assert!(points[0].ratio.is_infinite());
        assert!(points[0].mean_length_bits < 200.0);
    }

    #[test]
    fn universality_is_deterministic() {
        let params = SbmParams::erdos_renyi(60, 0.1).unwrap();
        let a = universality_curve(std::slice::from_ref(&params), 1, Estimator::Kt, 3, 9).unwrap();
        let b = universality_curve(&[params], 1, Estimator::Kt, 3, 9).unwrap();
        assert_eq!(a, b);
        assert!(universality_csv(&a).starts_with("n,mean_length_bits"));
    }
}
