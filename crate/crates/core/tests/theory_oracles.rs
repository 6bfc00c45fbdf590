//! Quadrature predictions checked against Monte-Carlo sampling of the same
//! generative process.

use hspace_core::model::{connection_probability, generate, pareto_quantile, ModelParams};
use hspace_core::rng::seeded;
use hspace_core::theory::{
    p2, theoretical_auc, theoretical_auc_with_error, EndpointWeighting, P2Mode, TheoryModel, TheoryParams,
};
use rand::Rng;

/// Distances of pairs with/without a link, sampled by rejection from
/// uniform positions in the unit square and endpoint degrees drawn with the
/// given weighting.
fn sample_conditional<R: Rng>(
    rng: &mut R,
    params: &TheoryParams,
    mu: f64,
    edge: bool,
    count: usize,
) -> Vec<f64> {
    // size-biased Pareto(γ) is Pareto(γ-1)
    let tail = match params.weighting {
        EndpointWeighting::SizeBiased => params.gamma - 1.0,
        EndpointWeighting::Plain => params.gamma,
    };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (x1, y1, x2, y2): (f64, f64, f64, f64) = (rng.random(), rng.random(), rng.random(), rng.random());
        let d = ((x1 - x2).powi(2) + (y1 - y2).powi(2)).sqrt();
        let k1 = pareto_quantile(rng.random(), params.k0, tail);
        let k2 = pareto_quantile(rng.random(), params.k0, tail);
        let p = connection_probability(d, k1 * k2, mu, params.beta);
        if (rng.random::<f64>() < p) == edge {
            out.push(d);
        }
    }
    out
}

/// AUC of scoring by `-distance` over paired comparisons.
fn mc_auc(edges: &[f64], non_edges: &[f64]) -> f64 {
    let mut wins = 0.0;
    for (a, b) in edges.iter().zip(non_edges) {
        if a < b {
            wins += 1.0;
        } else if a == b {
            wins += 0.5;
        }
    }
    wins / edges.len() as f64
}

fn mc_theory_auc(params: &TheoryParams, comparisons: usize, seed: u64) -> f64 {
    let mu = params.model_params().resolve_mu().unwrap();
    let mut rng = seeded(seed);
    let e = sample_conditional(&mut rng, params, mu, true, comparisons);
    let ne = sample_conditional(&mut rng, params, mu, false, comparisons);
    mc_auc(&e, &ne)
}

#[test]
fn default_auc_near_057_and_resolution_stable() {
    let p = TheoryParams::default();
    let (auc, err) = theoretical_auc_with_error(&p).unwrap();
    assert!((auc - 0.57).abs() <= 0.02, "theory AUC {auc}");
    assert!(err < 1e-3, "resolution sensitivity {err}");
}

#[test]
fn quadrature_matches_monte_carlo() {
    let p = TheoryParams::default();
    let q = theoretical_auc(&p).unwrap();
    let mc = mc_theory_auc(&p, 1_000_000, 17);
    assert!((q - mc).abs() <= 0.01, "quadrature {q} vs MC {mc}");
}

#[test]
fn plain_weighting_matches_monte_carlo() {
    let p = TheoryParams {
        weighting: EndpointWeighting::Plain,
        ..TheoryParams::default()
    };
    let q = theoretical_auc(&p).unwrap();
    let mc = mc_theory_auc(&p, 300_000, 5);
    assert!((q - mc).abs() <= 0.01, "quadrature {q} vs MC {mc}");
}

#[test]
fn auc_monotone_in_beta() {
    let betas = [1.5, 2.0, 2.5, 3.0, 3.5, 4.0];
    let mut last = 0.0;
    for (i, &beta) in betas.iter().enumerate() {
        let p = TheoryParams {
            beta,
            panels: 256,
            ..TheoryParams::default()
        };
        let q = theoretical_auc(&p).unwrap();
        assert!(q > last, "beta {beta}: {q} after {last}");
        let mc = mc_theory_auc(&p, 200_000, 100 + i as u64);
        assert!((q - mc).abs() <= 0.01, "beta {beta}: quadrature {q} vs MC {mc}");
        last = q;
    }
}

#[test]
fn as_written_mode_is_reported_too() {
    let p = TheoryParams {
        p2_mode: P2Mode::AsWritten,
        panels: 256,
        ..TheoryParams::default()
    };
    let a = theoretical_auc(&p).unwrap();
    assert!((0.5..0.7).contains(&a), "{a}");
}

#[test]
fn p2_matches_point_pair_histogram() {
    let mut rng = seeded(3);
    let bins = 70;
    let width = std::f64::consts::SQRT_2 / bins as f64;
    let mut hist = vec![0u64; bins];
    let samples = 10_000_000;
    for _ in 0..samples {
        let (x1, y1, x2, y2): (f64, f64, f64, f64) = (rng.random(), rng.random(), rng.random(), rng.random());
        let d = ((x1 - x2).powi(2) + (y1 - y2).powi(2)).sqrt();
        hist[((d / width) as usize).min(bins - 1)] += 1;
    }
    let mut worst = 0.0f64;
    for (i, &c) in hist.iter().enumerate() {
        let emp = c as f64 / (samples as f64 * width);
        // bin average of the density
        let gl = hspace_core::quad::GaussLegendre::new(8);
        let exact = gl.integrate(i as f64 * width, (i + 1) as f64 * width, |r| {
            p2(r.min(std::f64::consts::SQRT_2), P2Mode::Corrected).unwrap()
        }) / width;
        worst = worst.max((emp - exact).abs());
    }
    assert!(worst <= 0.01, "sup-norm {worst}");
}

/// Kolmogorov distance between an empirical sample and a model CDF
/// evaluated on a fine grid.
fn ks(sample: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(|a, b| a.total_cmp(b));
    let n = sample.len() as f64;
    let mut worst = 0.0f64;
    for (i, &x) in sample.iter().enumerate() {
        let f = cdf(x);
        worst = worst.max((f - i as f64 / n).abs()).max((f - (i + 1) as f64 / n).abs());
    }
    worst
}

fn model_cdf(m: &TheoryModel, edge: bool) -> impl Fn(f64) -> f64 {
    // cumulative table on a fine grid, linear in between
    let gl = hspace_core::quad::GaussLegendre::new(8);
    let steps = 4000;
    let h = std::f64::consts::SQRT_2 / steps as f64;
    let mut cum = vec![0.0; steps + 1];
    for i in 0..steps {
        let a = i as f64 * h;
        // finer near zero where the edge density is steep
        let sub = gl.composite(a, a + h, if i < 40 { 16 } else { 1 }, |r| m.p3(r, edge).unwrap());
        cum[i + 1] = cum[i] + sub;
    }
    move |x: f64| {
        let t = (x / h).clamp(0.0, steps as f64 - 1e-9);
        let i = t as usize;
        cum[i] + (t - i as f64) * (cum[i + 1] - cum[i])
    }
}

#[test]
fn conditional_densities_match_generated_networks() {
    let theory = TheoryModel::new(&TheoryParams {
        weighting: EndpointWeighting::Plain,
        ..TheoryParams::default()
    })
    .unwrap();
    let (mut e, mut ne) = (Vec::new(), Vec::new());
    for seed in 0..20 {
        let inst = generate(&ModelParams {
            seed,
            ..ModelParams::default()
        })
        .unwrap();
        let g = &inst.graph;
        let n = g.node_count() as u32;
        for u in 0..n {
            for v in (u + 1)..n {
                let d = inst.coords.distance(u, v);
                if g.has_edge(u, v) {
                    e.push(d);
                } else if (u + v) % 10 == 0 {
                    ne.push(d);
                }
            }
        }
    }
    let k1 = ks(&mut e, model_cdf(&theory, true));
    let k0 = ks(&mut ne, model_cdf(&theory, false));
    assert!(k1 <= 0.03, "edge KS {k1}");
    assert!(k0 <= 0.03, "non-edge KS {k0}");
}
