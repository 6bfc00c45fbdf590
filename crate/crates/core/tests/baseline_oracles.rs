mod common;

use common::{dense_adjacency, er_giant};
use hspace_core::baselines::{
    katz_scores, spm_reconstruction, spm_scores, KatzConfig, KatzScorer, SpmConfig,
};
use hspace_core::rng::seeded;
use hspace_core::{Graph, Pair};
use nalgebra::DMatrix;
use rand::Rng;

fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    a.clone().symmetric_eigen().eigenvalues.max()
}

/// `Σ_{l=1}^{terms} β^l A^l`.
fn katz_series(a: &DMatrix<f64>, beta: f64, terms: i32) -> DMatrix<f64> {
    let n = a.nrows();
    let mut power = DMatrix::<f64>::identity(n, n);
    let mut sum = DMatrix::<f64>::zeros(n, n);
    for _ in 0..terms {
        power = &power * a * beta;
        sum += &power;
    }
    sum
}

fn all_pairs(g: &Graph) -> Vec<Pair> {
    let n = g.node_count() as u32;
    (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect()
}

/// Returns the largest deviation from the 20-term series over fifty random
/// graphs, with attenuation drawn from `(lo, hi)` times `1/λ_max`.
fn katz_series_deviation(lo: f64, hi: f64, seed: u64) -> (f64, f64) {
    let mut rng = seeded(seed);
    let (mut worst, mut worst_bound) = (0.0f64, 0.0f64);
    for i in 0..50 {
        let n = rng.random_range(10..=100);
        let p = rng.random_range(0.03..0.25);
        let g = er_giant(n, p, 1000 + i);
        if g.node_count() < 3 {
            continue;
        }
        let a = dense_adjacency(&g);
        let lambda = spectral_radius(&a);
        let frac = rng.random_range(lo..hi);
        let beta = frac / lambda;
        let series = katz_series(&a, beta, 20);
        let pairs = all_pairs(&g);
        let t = katz_scores(&g, &KatzConfig::fixed(beta), &pairs).unwrap();
        for ((u, v), s) in t.iter() {
            worst = worst.max((s - series[(u as usize, v as usize)]).abs());
        }
        // |(A^l)_{ij}| <= λ^l, so the dropped tail is at most f^21 / (1 - f)
        worst_bound = worst_bound.max(frac.powi(21) / (1.0 - frac));
    }
    (worst, worst_bound)
}

#[test]
fn katz_matches_truncated_series() {
    let (worst, _) = katz_series_deviation(0.05, 0.35, 1);
    assert!(worst < 1e-8, "max |Δ| = {worst}");
}

#[test]
fn katz_at_half_the_limit_within_the_truncation_bound() {
    let (worst, bound) = katz_series_deviation(0.5, 0.5 + 1e-12, 2);
    assert!(worst <= bound + 1e-12, "max |Δ| = {worst}, tail bound {bound}");
}

#[test]
fn katz_auto_scale_uses_half_limit() {
    let g = er_giant(40, 0.15, 4);
    let lambda = spectral_radius(&dense_adjacency(&g));
    let k = KatzScorer::new(&g, &KatzConfig::default()).unwrap();
    assert!((k.attenuation() - 0.5 / lambda).abs() < 1e-12);
    assert!(KatzScorer::new(&g, &KatzConfig::fixed(1.0 / lambda)).is_err());
}

#[test]
fn spm_zero_perturbation_reconstructs_exactly() {
    for seed in 0..5 {
        let g = er_giant(40, 0.12, seed);
        let rec = spm_reconstruction(&g, &[], &SpmConfig::default()).unwrap();
        let a = dense_adjacency(&g);
        let n = g.node_count();
        let worst = (0..n * n)
            .map(|k| (rec[k] - a[(k / n, k % n)]).abs())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-10, "{worst}");
    }
}

#[test]
fn spm_one_removed_edge_matches_dense_oracle() {
    let g = er_giant(10, 0.5, 7);
    let removed = g.edges().nth(3).unwrap();
    let rec = spm_reconstruction(&g, &[removed], &SpmConfig::default()).unwrap();

    let n = g.node_count();
    let mut ar = dense_adjacency(&g);
    let (u, v) = (removed.0 as usize, removed.1 as usize);
    ar[(u, v)] = 0.0;
    ar[(v, u)] = 0.0;
    let mut da = DMatrix::<f64>::zeros(n, n);
    da[(u, v)] = 1.0;
    da[(v, u)] = 1.0;
    let eig = ar.symmetric_eigen();
    let mut oracle = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let x = eig.eigenvectors.column(k);
        let shift = (x.transpose() * &da * x)[(0, 0)] / x.dot(&x);
        oracle += (eig.eigenvalues[k] + shift) * x * x.transpose();
    }
    for i in 0..n {
        for j in 0..n {
            assert!((rec[i * n + j] - oracle[(i, j)]).abs() < 1e-10);
        }
    }
}

#[test]
fn spm_is_deterministic() {
    let g = er_giant(30, 0.2, 9);
    let pairs = all_pairs(&g);
    let cfg = SpmConfig {
        repetitions: 2,
        seed: 42,
        ..SpmConfig::default()
    };
    assert_eq!(spm_scores(&g, &cfg, &pairs).unwrap(), spm_scores(&g, &cfg, &pairs).unwrap());
}
