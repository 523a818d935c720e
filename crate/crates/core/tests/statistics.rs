//! Distributional checks on the sampler and the block decomposition, plus
//! coarse cost and size comparisons.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use ugc_core::baselines::{csr_size_bits, lz78_hilbert_size_bits};
use ugc_core::sbm::{graph_distribution, trial_seed};
use ugc_core::{compress, sample_sbm, Estimator, SbmParams};

fn random_params(rng: &mut ChaCha8Rng, n: usize, l: usize) -> SbmParams {
    let mut p: Vec<f64> = (0..l).map(|_| rng.gen_range(0.1..1.0)).collect();
    let sum: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= sum);
    let mut w = vec![vec![0.0; l]; l];
    for a in 0..l {
        for b in a..l {
            let q = rng.gen_range(0.0..1.0);
            w[a][b] = q;
            w[b][a] = q;
        }
    }
    SbmParams::new(n, p, w).unwrap()
}

#[test]
fn law_is_invariant_under_vertex_relabelling() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let n = rng.gen_range(3..=5);
        let l = rng.gen_range(1..=3);
        let params = random_params(&mut rng, n, l);
        let dist = graph_distribution(&params).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);

        let pair_index = |u: usize, v: usize| {
            let (u, v) = (u.min(v), u.max(v));
            u * (2 * n - u - 1) / 2 + (v - u - 1)
        };
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        let mut permuted = vec![0.0; dist.len()];
        for (a, &prob) in dist.iter().enumerate() {
            let mut b = 0usize;
            for (t, &(u, v)) in pairs.iter().enumerate() {
                if (a >> t) & 1 == 1 {
                    b |= 1 << pair_index(perm[u], perm[v]);
                }
            }
            permuted[b] += prob;
        }
        let tv: f64 = dist.iter().zip(&permuted).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0;
        assert!(tv < 1e-9, "tv = {tv}");
    }
}

#[test]
fn sampled_density_matches_model() {
    let params = SbmParams::new(
        200,
        vec![0.3, 0.7],
        vec![vec![0.08, 0.01], vec![0.01, 0.03]],
    )
    .unwrap();
    let samples = 10_000;
    let pairs = (200 * 199 / 2) as f64;
    let densities: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|t| sample_sbm(&params, trial_seed(5, t)).0.edge_count() as f64 / pairs)
        .collect();
    let mean = densities.iter().sum::<f64>() / samples as f64;
    let var = densities.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
    let se = (var / samples as f64).sqrt();
    // pᵀWp
    let expected = 0.09 * 0.08 + 2.0 * 0.21 * 0.01 + 0.49 * 0.03;
    assert!(
        (mean - expected).abs() < 4.0 * se,
        "mean {mean}, expected {expected}, se {se}"
    );
}

/// Two-sample chi-square homogeneity p-value; sparse bins are pooled.
fn homogeneity_p_value(a: &[u64], b: &[u64]) -> f64 {
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut pending = (0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        pending.0 += x as f64;
        pending.1 += y as f64;
        if pending.0 + pending.1 >= 20.0 {
            bins.push(pending);
            pending = (0.0, 0.0);
        }
    }
    if let Some(last) = bins.last_mut() {
        last.0 += pending.0;
        last.1 += pending.1;
    }
    let total = na + nb;
    let mut stat = 0.0;
    for &(x, y) in &bins {
        let col = x + y;
        let (ex, ey) = (col * na / total, col * nb / total);
        stat += (x - ex).powi(2) / ex + (y - ey).powi(2) / ey;
    }
    let dof = (bins.len() - 1) as f64;
    1.0 - ChiSquared::new(dof).unwrap().cdf(stat)
}

#[test]
fn blocks_share_one_distribution() {
    let params = SbmParams::new(
        32,
        vec![0.4, 0.6],
        vec![vec![0.6, 0.1], vec![0.1, 0.3]],
    )
    .unwrap();
    let k = 4;
    let samples = 50_000;
    let count_ones = |g: &ugc_core::LabeledGraph, bi: usize, bj: usize| -> usize {
        let mut c = 0;
        for r in bi * k..bi * k + k {
            for s in bj * k..bj * k + k {
                c += g.adjacent(r, s) as usize;
            }
        }
        c
    };
    let hist = (0..samples)
        .into_par_iter()
        .map(|t| {
            let (g, _) = sample_sbm(&params, trial_seed(77, t));
            // Off-diagonal blocks (0,1) and (4,7); diagonal blocks 0 and 6.
            [
                count_ones(&g, 0, 1),
                count_ones(&g, 4, 7),
                count_ones(&g, 0, 0) / 2,
                count_ones(&g, 6, 6) / 2,
            ]
        })
        .fold(
            || vec![vec![0u64; k * k + 1]; 4],
            |mut h, counts| {
                for (slot, c) in h.iter_mut().zip(counts) {
                    slot[c] += 1;
                }
                h
            },
        )
        .reduce(
            || vec![vec![0u64; k * k + 1]; 4],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    for (p, q) in x.iter_mut().zip(y) {
                        *p += q;
                    }
                }
                a
            },
        );
    let off = homogeneity_p_value(&hist[0], &hist[1]);
    let diag = homogeneity_p_value(&hist[2], &hist[3]);
    assert!(off > 1e-3, "off-diagonal p = {off}");
    assert!(diag > 1e-3, "diagonal p = {diag}");
    // Sanity: the test does separate different laws.
    assert!(homogeneity_p_value(&hist[0], &hist[2]) < 1e-6);
}

fn min_compress_seconds(params: &SbmParams, runs: usize) -> f64 {
    let (g, _) = sample_sbm(params, 1);
    (0..runs)
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(compress(&g, 2, Estimator::Kt).unwrap());
            start.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn compression_time_is_quadratic() {
    let small = SbmParams::erdos_renyi(1200, 0.05).unwrap();
    let large = SbmParams::erdos_renyi(2400, 0.05).unwrap();
    min_compress_seconds(&small, 1);
    let t1 = min_compress_seconds(&small, 7);
    let t2 = min_compress_seconds(&large, 7);
    let ratio = t2 / t1;
    assert!((3.2..=5.0).contains(&ratio), "t(2n)/t(n) = {ratio}");
}

#[test]
fn ugc_beats_baselines_on_erdos_renyi() {
    let params = SbmParams::erdos_renyi(512, 0.05).unwrap();
    let (g, _) = sample_sbm(&params, 2);
    let ugc = compress(&g, 2, Estimator::Kt).unwrap().len() as u64 * 8;
    assert!(ugc < lz78_hilbert_size_bits(&g), "ugc {ugc}");
    assert!(ugc < csr_size_bits(&g), "ugc {ugc}");
}
