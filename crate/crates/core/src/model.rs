//! Geometric scale-free network generator.
//!
//! Nodes get uniform positions in the unit hypercube and Pareto-distributed
//! expected degrees `κ`; every pair is linked independently with
//! probability
//!
//! ```text
//! ρ(d, κ, κ') = (1 + d / (μ κ κ'))^{-β}
//! ```
//!
//! Isolated nodes are removed afterwards.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::geo::{CoordinateSet, Metric};
use crate::graph::{Graph, NodeId};
use crate::math::{exp, ln, powf, sqrt};
use crate::rng::{derive_seed, seeded, splitmix64, unit_f64};
use crate::theory::mean_connection_probability;
use crate::{Error, Result};

/// How the kernel scale `μ` is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MuMode {
    /// Solve `(N-1) · E[ρ] = ⟨k⟩` so that the expected mean degree of the
    /// generated graph is the requested one.
    Calibrated,
    /// `μ = (β-1) / (2⟨k⟩)`, the closed-form scale for a one-dimensional
    /// unbounded space of unit density.
    Literal,
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub n: usize,
    pub gamma: f64,
    pub k0: f64,
    pub beta: f64,
    pub mean_degree: f64,
    pub dim: usize,
    pub mu: MuMode,
    pub seed: u64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            n: 700,
            gamma: 2.5,
            k0: 1.0,
            beta: 2.0,
            mean_degree: 4.0,
            dim: 2,
            mu: MuMode::Calibrated,
            seed: 0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if self.n < 2 {
            return bad("the model needs at least two nodes");
        }
        if !(self.gamma > 2.0) {
            return bad("gamma must exceed 2");
        }
        if !(self.beta > 1.0) || !self.beta.is_finite() {
            return bad("beta must exceed 1");
        }
        if !(self.k0 > 0.0) || !self.k0.is_finite() {
            return bad("k0 must be positive");
        }
        if !(self.mean_degree > 0.0) || !self.mean_degree.is_finite() {
            return bad("mean degree must be positive");
        }
        if !(1..=3).contains(&self.dim) {
            return bad("dimension must be 1, 2 or 3");
        }
        Ok(())
    }

    /// The kernel scale `μ` for these parameters.
    pub fn resolve_mu(&self) -> Result<f64> {
        self.validate()?;
        let mu = match self.mu {
            MuMode::Fixed(mu) => mu,
            MuMode::Literal => (self.beta - 1.0) / (2.0 * self.mean_degree),
            MuMode::Calibrated => calibrate_mu(self)?,
        };
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidConfig(format!("kernel scale must be positive, got {mu}")));
        }
        Ok(mu)
    }

    /// Expected mean degree `(N-1) · E[ρ]` for kernel scale `mu`.
    pub fn expected_mean_degree(&self, mu: f64) -> Result<f64> {
        let p = mean_connection_probability(mu, self.gamma, self.k0, self.beta, self.dim)?;
        Ok((self.n - 1) as f64 * p)
    }
}

/// Solves `(N-1) · E[ρ](μ) = ⟨k⟩` by bisection on `ln μ`.
fn calibrate_mu(p: &ModelParams) -> Result<f64> {
    let target = p.mean_degree;
    if target >= (p.n - 1) as f64 {
        return Err(Error::InvalidConfig(format!(
            "mean degree {target} is unreachable with {} nodes",
            p.n
        )));
    }
    let (mut lo, mut hi) = (ln(1e-12), ln(1e6));
    let f = |lmu: f64| p.expected_mean_degree(exp(lmu)).map(|k| k - target);
    if f(lo)? > 0.0 || f(hi)? < 0.0 {
        return Err(Error::InvalidConfig(format!("cannot calibrate mean degree {target}")));
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(exp(0.5 * (lo + hi)))
}

/// `ρ(d, κκ') = (1 + d/(μ κκ'))^{-β}`; `product` is `κκ'`.
#[inline]
pub fn connection_probability(distance: f64, product: f64, mu: f64, beta: f64) -> f64 {
    if distance <= 0.0 {
        return 1.0;
    }
    powf(1.0 + distance / (mu * product), -beta)
}

/// Inverse Pareto CDF: `κ = k0 (1-u)^{-1/(γ-1)}`.
#[inline]
pub fn pareto_quantile(u: f64, k0: f64, gamma: f64) -> f64 {
    k0 * powf(1.0 - u, -1.0 / (gamma - 1.0))
}

/// `count` i.i.d. expected degrees.
pub fn sample_degrees<R: Rng + ?Sized>(params: &ModelParams, count: usize, rng: &mut R) -> Vec<f64> {
    (0..count)
        .map(|_| pareto_quantile(rng.random::<f64>(), params.k0, params.gamma))
        .collect()
}

/// A generated network with its ground truth.
#[derive(Clone, Debug)]
pub struct ModelInstance {
    /// The network after removing isolated nodes.
    pub graph: Graph,
    /// Positions of the retained nodes.
    pub coords: CoordinateSet,
    /// Expected degrees of the retained nodes.
    pub expected_degrees: Vec<f64>,
    /// Index of every retained node among the `N` generated ones.
    pub original_ids: Vec<NodeId>,
    /// `2|E| / N` before isolated nodes were removed.
    pub pre_pruning_mean_degree: f64,
    pub mu: f64,
}

/// Draws one network. Edge decisions use a per-pair counter-based stream,
/// so the result depends only on the parameters and seed.
pub fn generate(params: &ModelParams) -> Result<ModelInstance> {
    let mu = params.resolve_mu()?;
    let n = params.n;
    let dim = params.dim;
    let mut rng = seeded(derive_seed(params.seed, 0));
    let positions: Vec<f64> = (0..n * dim).map(|_| rng.random::<f64>()).collect();
    let kappa = sample_degrees(params, n, &mut rng);
    let edge_seed = derive_seed(params.seed, 1);

    let mut edges = Vec::new();
    for i in 0..n {
        let pi = &positions[i * dim..(i + 1) * dim];
        for j in (i + 1)..n {
            let pj = &positions[j * dim..(j + 1) * dim];
            let d = sqrt(pi.iter().zip(pj).map(|(a, b)| (a - b) * (a - b)).sum());
            let prob = connection_probability(d, kappa[i] * kappa[j], mu, params.beta);
            let u = unit_f64(splitmix64(edge_seed ^ splitmix64(((i as u64) << 32) | j as u64)));
            if u < prob {
                edges.push((i as NodeId, j as NodeId));
            }
        }
    }
    let full = Graph::from_edges(n, edges)?;
    let pre_pruning_mean_degree = 2.0 * full.edge_count() as f64 / n as f64;
    let (graph, kept) = full.without_isolated();
    if graph.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let coords = CoordinateSet::new(dim, positions, Metric::Euclidean)?.restrict(&kept);
    let expected_degrees = kept.iter().map(|&k| kappa[k as usize]).collect();
    Ok(ModelInstance {
        graph,
        coords,
        expected_degrees,
        original_ids: kept,
        pre_pruning_mean_degree,
        mu,
    })
}
