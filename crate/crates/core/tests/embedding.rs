mod common;

use common::{dense_adjacency, er_giant};
use hspace_core::embed::{coordinate_search, embed, select_params, EmbeddingConfig, Solver, TuneConfig};
use hspace_core::eval::random_split;
use hspace_core::Graph;
use proptest::prelude::*;

/// Eigenvalues of `K^{-α} A` straight from a general (non-symmetric) dense
/// solver, descending.
fn oracle_eigenvalues(g: &Graph, alpha: f64) -> Vec<f64> {
    let n = g.node_count();
    let mut m = dense_adjacency(g);
    for i in 0..n {
        let s = (g.degree(i as u32) as f64).powf(-alpha);
        for j in 0..n {
            m[(i, j)] *= s;
        }
    }
    let mut ev: Vec<f64> = m.schur().complex_eigenvalues().iter().map(|c| c.re).collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

#[test]
fn dense_and_iterative_match_the_oracle() {
    let mut worst = 0.0f64;
    for seed in 0..12 {
        let g = er_giant(30 + (seed as usize % 4) * 5, 0.15, seed);
        for alpha in [0.0, 0.5, 1.0, 2.0] {
            let oracle = oracle_eigenvalues(&g, alpha);
            for solver in [Solver::Dense, Solver::Lanczos] {
                let cfg = EmbeddingConfig::new(alpha, 4).with_solver(solver);
                let e = embed(&g, &cfg).unwrap();
                for (x, y) in e.eigenvalues().iter().zip(&oracle) {
                    worst = worst.max((x - y).abs());
                }
                assert!(e.max_residual() <= 1e-8);
            }
        }
    }
    assert!(worst < 1e-8, "max eigenvalue deviation {worst}");
}

#[test]
fn lanczos_coordinates_match_dense() {
    let g = er_giant(45, 0.12, 99);
    let d = embed(&g, &EmbeddingConfig::new(0.8, 3).with_solver(Solver::Dense)).unwrap();
    let l = embed(&g, &EmbeddingConfig::new(0.8, 3).with_solver(Solver::Lanczos)).unwrap();
    for u in 0..g.node_count() as u32 {
        for (a, b) in d.coords(u).iter().zip(l.coords(u)) {
            assert!((a - b).abs() < 1e-6);
        }
    }
}

#[test]
fn alpha_one_top_pair_is_trivial() {
    let g = er_giant(60, 0.08, 3);
    let e = embed(&g, &EmbeddingConfig::new(1.0, 2)).unwrap();
    assert!((e.eigenvalues()[0] - 1.0).abs() <= 1e-8);
}

#[test]
fn alpha_zero_is_the_adjacency_spectrum() {
    let g = er_giant(40, 0.15, 8);
    let e = embed(&g, &EmbeddingConfig::new(0.0, 3)).unwrap();
    let a = dense_adjacency(&g).symmetric_eigen();
    let mut ev: Vec<f64> = a.eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    for (x, y) in e.eigenvalues().iter().zip(&ev) {
        assert!((x - y).abs() < 1e-10);
    }
}

#[test]
fn distances_invariant_under_relabelling() {
    let g = er_giant(50, 0.1, 21);
    let n = g.node_count();
    // reverse labels
    let perm: Vec<u32> = (0..n as u32).rev().collect();
    let h = Graph::from_edges(n, g.edges().map(|(u, v)| (perm[u as usize], perm[v as usize]))).unwrap();
    let cfg = EmbeddingConfig::new(0.9, 3);
    let (eg, eh) = (embed(&g, &cfg).unwrap(), embed(&h, &cfg).unwrap());
    let mut worst = 0.0f64;
    for u in 0..n as u32 {
        for v in 0..n as u32 {
            let a = eg.distance(u, v).unwrap();
            let b = eh.distance(perm[u as usize], perm[v as usize]).unwrap();
            worst = worst.max((a - b).abs());
        }
    }
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn select_params_runs_on_a_split() {
    let g = er_giant(80, 0.08, 5);
    let split = random_split(&g, 0.1, 1).unwrap();
    let r = select_params(&split, &[0.5, 1.0], &[2, 3], &TuneConfig::default()).unwrap();
    assert!([0.5, 1.0].contains(&r.alpha));
    assert!([2, 3].contains(&r.dim));
    assert_eq!(r.alpha_profile.len(), 2);
    assert!(r.alpha_profile.iter().all(|&(_, a)| (0.0..=1.0).contains(&a)));
}

#[test]
fn search_propagates_failures() {
    let r = coordinate_search(&[0.5, 1.0], &[3], |a, _| {
        if a > 0.7 {
            Err(hspace_core::Error::EmptySet("x"))
        } else {
            Ok(0.5)
        }
    });
    assert!(r.is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn distances_are_a_metric(seed in 0u64..1000, alpha in 0.0f64..2.0) {
        let g = er_giant(25, 0.2, seed);
        prop_assume!(g.node_count() > 5);
        let e = embed(&g, &EmbeddingConfig::new(alpha, 3)).unwrap();
        let n = g.node_count() as u32;
        for u in 0..n {
            prop_assert_eq!(e.distance(u, u).unwrap(), 0.0);
            for v in 0..n {
                let d = e.distance(u, v).unwrap();
                prop_assert!(d >= 0.0);
                prop_assert_eq!(d, e.distance(v, u).unwrap());
                for w in 0..n {
                    prop_assert!(d <= e.distance(u, w).unwrap() + e.distance(w, v).unwrap() + 1e-12);
                }
            }
        }
        for r in 0..4 {
            let col: f64 = (0..n).map(|u| if r == 0 { 0.0 } else { e.coords(u)[r - 1].powi(2) }).sum();
            prop_assert!(r == 0 || (col - 1.0).abs() < 1e-9);
        }
    }
}
