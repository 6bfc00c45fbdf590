use hspace_core::model::{generate, sample_degrees, ModelParams, MuMode};
use hspace_core::rng::seeded;

#[test]
fn pareto_mean_and_tail_slope() {
    let p = ModelParams::default();
    let mut rng = seeded(1);
    let mut k = sample_degrees(&p, 1_000_000, &mut rng);
    assert!(k.iter().all(|&x| x >= 1.0));
    let mean = k.iter().sum::<f64>() / k.len() as f64;
    // heavy tail (infinite variance): the sample mean converges slowly
    assert!((mean - 3.0).abs() / 3.0 < 0.02, "mean {mean}");

    // least-squares slope of log CCDF against log k over [1, 100]
    k.sort_by(|a, b| a.total_cmp(b));
    let n = k.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy, mut m) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..40 {
        let x = 10f64.powf(i as f64 * 2.0 / 40.0);
        let above = k.len() - k.partition_point(|&v| v < x);
        let (lx, ly) = (x.ln(), (above as f64 / n).ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        m += 1.0;
    }
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    assert!((slope + 1.5).abs() <= 0.05, "slope {slope}");
}

#[test]
fn calibrated_mean_degree_over_twenty_runs() {
    let mut total = 0.0;
    for seed in 0..20 {
        let inst = generate(&ModelParams {
            seed,
            ..ModelParams::default()
        })
        .unwrap();
        total += inst.pre_pruning_mean_degree;
    }
    let mean = total / 20.0;
    assert!((mean - 4.0).abs() / 4.0 <= 0.15, "mean degree {mean}");
}

#[test]
fn literal_scale_is_much_denser() {
    let inst = generate(&ModelParams {
        n: 300,
        mu: MuMode::Literal,
        ..ModelParams::default()
    })
    .unwrap();
    assert!(inst.pre_pruning_mean_degree > 20.0);
}

#[test]
fn relabelling_keeps_the_edge_law() {
    // the same seed yields the same graph; different seeds differ
    let a = generate(&ModelParams { n: 300, seed: 4, ..ModelParams::default() }).unwrap();
    let b = generate(&ModelParams { n: 300, seed: 4, ..ModelParams::default() }).unwrap();
    let c = generate(&ModelParams { n: 300, seed: 5, ..ModelParams::default() }).unwrap();
    assert_eq!(a.graph, b.graph);
    assert_ne!(a.graph, c.graph);
}
