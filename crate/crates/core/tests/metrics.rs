mod common;

use common::er_giant;
use hspace_core::eval::{
    auc, auc_from_scores, precision_at, random_split, run_experiment, AucMode, ExperimentConfig,
    MethodSpec,
};
use hspace_core::graph::sample_non_edges;
use hspace_core::rng::seeded;
use hspace_core::{Graph, Pair, ScoreTable};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn random_scores_give_half() {
    let mut rng = seeded(1);
    let pos: Vec<f64> = (0..1000).map(|_| rng.random()).collect();
    let neg: Vec<f64> = (0..10000).map(|_| rng.random()).collect();
    let a = auc_from_scores(&pos, &neg, AucMode::Sampled { n: 100_000, seed: 2 }).unwrap();
    assert!((a - 0.5).abs() <= 0.01, "{a}");
}

#[test]
fn perfect_separation_is_exactly_one() {
    let pos: Vec<f64> = (0..100).map(|i| 10.0 + i as f64).collect();
    let neg: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
    assert_eq!(auc_from_scores(&pos, &neg, AucMode::Exact).unwrap(), 1.0);
    assert_eq!(auc_from_scores(&pos, &neg, AucMode::Sampled { n: 100_000, seed: 3 }).unwrap(), 1.0);
}

#[test]
fn sampled_converges_to_exact() {
    let mut rng = seeded(4);
    for _ in 0..5 {
        let shift: f64 = rng.random_range(0.0..1.0);
        let pos: Vec<f64> = (0..1000).map(|_| rng.random::<f64>() + shift).collect();
        let neg: Vec<f64> = (0..10000).map(|_| (rng.random::<f64>() * 10.0).floor()).collect();
        let e = auc_from_scores(&pos, &neg, AucMode::Exact).unwrap();
        let s = auc_from_scores(&pos, &neg, AucMode::Sampled { n: 1_000_000, seed: 5 }).unwrap();
        assert!((e - s).abs() <= 0.01, "{e} vs {s}");
    }
}

#[test]
fn constant_scores_precision_matches_enumeration() {
    let g = er_giant(20, 0.3, 6);
    let split = random_split(&g, 0.2, 7).unwrap();
    let candidates: Vec<Pair> = split.train.non_edges().collect();
    let t = ScoreTable::new("const", candidates.iter().map(|&p| (p, 1.0)));
    let l = split.probe_train().len();
    // ties resolve to lexicographic order, so the list is the first l pairs
    let hits = candidates[..l].iter().filter(|p| split.probe_train().contains(p)).count();
    assert_eq!(precision_at(&t, split.probe_train(), l).unwrap(), hits as f64 / l as f64);
}

#[test]
fn random_method_over_ten_repetitions() {
    let g = er_giant(150, 0.05, 8);
    let cfg = ExperimentConfig {
        repetitions: 10,
        seed: 9,
        precision: false,
        ..ExperimentConfig::default()
    };
    let r = run_experiment(&g, &[MethodSpec::Random { seed: 1 }], &cfg).unwrap();
    assert!((r[0].auc - 0.5).abs() <= 0.02, "{}", r[0].auc);
}

#[test]
fn experiment_is_deterministic() {
    let g = er_giant(120, 0.06, 10);
    let methods = [MethodSpec::Cn, MethodSpec::Ra, MethodSpec::Hs(hspace_core::embed::EmbeddingConfig::new(1.0, 3))];
    let cfg = ExperimentConfig {
        repetitions: 3,
        seed: 11,
        ..ExperimentConfig::default()
    };
    let a = run_experiment(&g, &methods, &cfg).unwrap();
    let b = run_experiment(&g, &methods, &cfg).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}

#[test]
fn sampled_non_edges_are_non_edges() {
    let g = er_giant(100, 0.05, 12);
    let mut rng = seeded(13);
    let s = sample_non_edges(&g, 10_000, &mut rng).unwrap();
    assert!(s.iter().all(|&(u, v)| u != v && !g.has_edge(u, v)));
    let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
    assert!(sample_non_edges(&k4, 1, &mut rng).is_err());
}

fn table(scores: &[f64]) -> ScoreTable {
    ScoreTable::new("t", scores.iter().enumerate().map(|(i, &s)| ((i as u32, 10_000), s)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn precision_bounds_and_monotone_invariance(
        scores in prop::collection::vec(-100.0f64..100.0, 5..200),
        probe_mask in prop::collection::vec(any::<bool>(), 200),
        l_frac in 0.01f64..1.0,
    ) {
        let n = scores.len();
        let probe: Vec<Pair> = (0..n).filter(|&i| probe_mask[i]).map(|i| (i as u32, 10_000)).collect();
        let l = ((n as f64 * l_frac) as usize).max(1);
        let t = table(&scores);
        let p = precision_at(&t, &probe, l).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        let mono = t.map("m", |s| (s / 50.0).exp() * 3.0 - 7.0);
        prop_assert_eq!(p, precision_at(&mono, &probe, l).unwrap());

        if !probe.is_empty() && probe.len() < n {
            let neg: Vec<Pair> = (0..n).filter(|&i| !probe_mask[i]).map(|i| (i as u32, 10_000)).collect();
            let a = auc(&t, &probe, &neg, AucMode::Exact).unwrap();
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert_eq!(a, auc(&mono, &probe, &neg, AucMode::Exact).unwrap());
        }
    }
}
