//! Hidden-space coordinates from the eigenvectors of `N_α = K^{-α} A`.
//!
//! `N_α` is similar to the symmetric `M = K^{-α/2} A K^{-α/2}`: if
//! `M u = λ u` then `N_α (K^{-α/2} u) = λ K^{-α/2} u`. Eigenpairs are
//! computed on `M` (dense below [`DENSE_LIMIT`] nodes, Lanczos above), mapped
//! back and renormalised to unit length. The top eigenpair is always
//! discarded; node `i` gets coordinates `(v_2[i], …, v_{d+1}[i])`.
//!
//! Output is canonical so that coordinate files are reproducible:
//!
//! * eigenvalues are ordered algebraically, largest first;
//! * within a degenerate eigenvalue (equal to within `1e-9`), the basis of
//!   the eigenspace is rebuilt by projecting the unit vectors `e_0, e_1, …`
//!   onto it and orthonormalising; vectors are ordered by the index of the
//!   unit vector that produced them;
//! * every eigenvector has its largest-magnitude entry positive (the first
//!   such entry on ties).

use alloc::vec;
use alloc::vec::Vec;

use crate::eval::{auc_from_scores, sample_eval_non_edges, AucMode, Split};
use crate::graph::{Graph, NodeId, Pair};
use crate::linalg::{largest_eigenpairs, LanczosConfig, ScaledAdjacency, SymmetricEigen};
use crate::math::{dot, norm, powf, sqrt};
use crate::rng::seeded;
use crate::scores::{PairScorer, ScoreTable};
use crate::{Error, Result};

/// Largest component size handled by the dense eigensolver under
/// [`Solver::Auto`].
pub const DENSE_LIMIT: usize = 500;

const TIE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    Auto,
    Dense,
    Lanczos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingConfig {
    /// Degree-normalisation exponent.
    pub alpha: f64,
    /// Number of hidden coordinates.
    pub dim: usize,
    /// Residual tolerance `‖N_α v - λ v‖` for every retained eigenpair.
    pub eig_tol: f64,
    /// Matrix-vector budget for the iterative solver; `None` means `10·n`.
    pub max_iter: Option<usize>,
    pub solver: Solver,
}

impl EmbeddingConfig {
    pub fn new(alpha: f64, dim: usize) -> Self {
        EmbeddingConfig {
            alpha,
            dim,
            eig_tol: 1e-8,
            max_iter: None,
            solver: Solver::Auto,
        }
    }

    pub fn with_solver(mut self, solver: Solver) -> Self {
        self.solver = solver;
        self
    }

    fn validate(&self, n: usize) -> Result<()> {
        if !self.alpha.is_finite() {
            return Err(Error::InvalidConfig("alpha must be finite".into()));
        }
        if self.dim == 0 {
            return Err(Error::InvalidConfig("dimension must be at least 1".into()));
        }
        if !(self.eig_tol > 0.0) {
            return Err(Error::InvalidConfig("eig_tol must be positive".into()));
        }
        if self.dim >= n {
            return Err(Error::DimensionTooLarge { d: self.dim, n });
        }
        Ok(())
    }
}

/// Per-node hidden coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    n: usize,
    dim: usize,
    coords: Vec<f64>,
    eigenvalues: Vec<f64>,
    components: Option<Vec<u32>>,
    max_residual: f64,
    config: EmbeddingConfig,
}

impl Embedding {
    /// Wraps precomputed coordinates (row-major `n × dim`).
    pub fn from_coords(dim: usize, coords: Vec<f64>, config: EmbeddingConfig) -> Self {
        assert!(dim > 0 && coords.len().is_multiple_of(dim));
        Embedding {
            n: coords.len() / dim,
            dim,
            coords,
            eigenvalues: Vec::new(),
            components: None,
            max_residual: 0.0,
            config,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self, i: NodeId) -> &[f64] {
        let i = i as usize;
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// The `d + 1` leading eigenvalues, descending, including the discarded
    /// top one. For a disconnected graph these belong to the largest
    /// component.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn config(&self) -> &EmbeddingConfig {
        &self.config
    }

    /// Largest `‖N_α v - λ v‖` over the retained eigenpairs.
    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    pub fn is_connected(&self) -> bool {
        self.components.is_none()
    }

    fn same_component(&self, i: NodeId, j: NodeId) -> bool {
        match &self.components {
            None => true,
            Some(c) => c[i as usize] == c[j as usize],
        }
    }

    fn check(&self, i: NodeId) -> Result<()> {
        if (i as usize) < self.n {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node: i, n: self.n })
        }
    }

    /// Euclidean distance; `+∞` between different components.
    pub fn distance(&self, i: NodeId, j: NodeId) -> Result<f64> {
        self.check(i)?;
        self.check(j)?;
        Ok(self.distance_unchecked(i, j))
    }

    #[inline]
    fn distance_unchecked(&self, i: NodeId, j: NodeId) -> f64 {
        if i == j {
            return 0.0;
        }
        if !self.same_component(i, j) {
            return f64::INFINITY;
        }
        let (a, b) = (self.coords(i), self.coords(j));
        sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
    }

    /// The first `dim` coordinates only.
    pub fn truncated(&self, dim: usize) -> Result<Embedding> {
        if dim == 0 || dim > self.dim {
            return Err(Error::InvalidConfig(alloc::format!(
                "cannot truncate a {}-dimensional embedding to {dim}",
                self.dim
            )));
        }
        let mut coords = Vec::with_capacity(self.n * dim);
        for i in 0..self.n {
            coords.extend_from_slice(&self.coords[i * self.dim..i * self.dim + dim]);
        }
        let mut config = self.config.clone();
        config.dim = dim;
        Ok(Embedding {
            n: self.n,
            dim,
            coords,
            eigenvalues: self.eigenvalues[..(dim + 1).min(self.eigenvalues.len())].to_vec(),
            components: self.components.clone(),
            max_residual: self.max_residual,
            config,
        })
    }
}

impl PairScorer for Embedding {
    fn score(&self, u: NodeId, v: NodeId) -> f64 {
        -self.distance_unchecked(u, v)
    }
}

/// Embeds every connected component of `g` separately; pairs in different
/// components are infinitely far apart. Components with `m <= dim` nodes
/// get `m - 1` coordinates padded with zeros.
pub fn embed(g: &Graph, cfg: &EmbeddingConfig) -> Result<Embedding> {
    let n = g.node_count();
    cfg.validate(n)?;
    if let Some(u) = (0..n as NodeId).find(|&u| g.degree(u) == 0) {
        return Err(Error::IsolatedNode(u));
    }
    let labels = g.components();
    let count = labels.iter().max().map_or(0, |&c| c as usize + 1);
    if count <= 1 {
        let part = embed_connected(g, cfg, cfg.dim)?;
        return Ok(Embedding {
            n,
            dim: cfg.dim,
            coords: part.coords,
            eigenvalues: part.eigenvalues,
            components: None,
            max_residual: part.max_residual,
            config: cfg.clone(),
        });
    }

    let mut members: Vec<Vec<NodeId>> = vec![Vec::new(); count];
    for (u, &c) in labels.iter().enumerate() {
        members[c as usize].push(u as NodeId);
    }
    let mut coords = vec![0.0; n * cfg.dim];
    let mut eigenvalues = Vec::new();
    let mut largest = 0;
    let mut max_residual = 0.0f64;
    for nodes in &members {
        let sub = g.induced_subgraph(nodes);
        let d = cfg.dim.min(nodes.len() - 1);
        let part = embed_connected(&sub, cfg, d)?;
        for (local, &u) in nodes.iter().enumerate() {
            let row = &mut coords[u as usize * cfg.dim..];
            row[..d].copy_from_slice(&part.coords[local * d..(local + 1) * d]);
        }
        max_residual = max_residual.max(part.max_residual);
        if nodes.len() > largest {
            largest = nodes.len();
            eigenvalues = part.eigenvalues;
        }
    }
    Ok(Embedding {
        n,
        dim: cfg.dim,
        coords,
        eigenvalues,
        components: Some(labels),
        max_residual,
        config: cfg.clone(),
    })
}

struct Part {
    coords: Vec<f64>,
    eigenvalues: Vec<f64>,
    max_residual: f64,
}

fn embed_connected(g: &Graph, cfg: &EmbeddingConfig, d: usize) -> Result<Part> {
    let n = g.node_count();
    let k = d + 1;
    let degrees = g.degrees();
    let scale: Vec<f64> = degrees
        .iter()
        .map(|&deg| powf(deg as f64, -cfg.alpha / 2.0))
        .collect();
    let op = ScaledAdjacency::new(g, scale);

    let dense = match cfg.solver {
        Solver::Dense => true,
        Solver::Lanczos => false,
        Solver::Auto => n <= DENSE_LIMIT,
    };
    // candidate eigenpairs of M, descending; a couple beyond k so that a
    // degenerate eigenvalue straddling the cut is seen whole
    let (values, mut vectors, iterations) = if dense {
        let eig = SymmetricEigen::new(n, op.to_dense());
        let vectors = (0..n).map(|c| eig.vector(c)).collect::<Vec<_>>();
        (eig.values, vectors, 0)
    } else {
        let s = op.scale();
        let (lo, hi) = s
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        let lcfg = LanczosConfig {
            tol: cfg.eig_tol * lo / hi,
            max_matvec: cfg.max_iter.unwrap_or(10 * n),
            ..LanczosConfig::default()
        };
        let pairs = largest_eigenpairs(&op, (k + 2).min(n), &lcfg)?;
        (pairs.values, pairs.vectors, pairs.matvecs)
    };

    let mut start = 0;
    while start < k {
        let mut end = start + 1;
        while end < values.len()
            && (values[end] - values[start]).abs() <= TIE_TOL * values[start].abs().max(1.0)
        {
            end += 1;
        }
        if end - start > 1 {
            canonical_basis(&mut vectors[start..end]);
        }
        start = end;
    }

    let mut eigenvalues = Vec::with_capacity(k);
    let mut mapped: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut max_residual = 0.0f64;
    let mut av = vec![0.0; n];
    for r in 0..k {
        let mut v: Vec<f64> = vectors[r].iter().zip(op.scale()).map(|(u, s)| u * s).collect();
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        canonical_sign(&mut v);
        let lambda = values[r];
        normal_matvec(g, &degrees, cfg.alpha, &v, &mut av);
        let res = sqrt(
            av.iter()
                .zip(&v)
                .map(|(a, x)| (a - lambda * x) * (a - lambda * x))
                .sum(),
        );
        max_residual = max_residual.max(res);
        eigenvalues.push(lambda);
        mapped.push(v);
    }
    if max_residual > cfg.eig_tol {
        return Err(Error::NotConverged {
            iterations,
            residual: max_residual,
        });
    }

    let mut coords = vec![0.0; n * d];
    for i in 0..n {
        for r in 0..d {
            coords[i * d + r] = mapped[r + 1][i];
        }
    }
    Ok(Part {
        coords,
        eigenvalues,
        max_residual,
    })
}

/// `y = K^{-α} A x`.
fn normal_matvec(g: &Graph, degrees: &[usize], alpha: f64, x: &[f64], y: &mut [f64]) {
    for (u, yu) in y.iter_mut().enumerate() {
        let acc: f64 = g.neighbors(u as NodeId).iter().map(|&v| x[v as usize]).sum();
        *yu = powf(degrees[u] as f64, -alpha) * acc;
    }
}

/// Replaces an orthonormal basis of an eigenspace by the one obtained from
/// projecting `e_0, e_1, …` onto the space, in that order.
fn canonical_basis(vectors: &mut [Vec<f64>]) {
    let g = vectors.len();
    let n = vectors[0].len();
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(g);
    for j in 0..n {
        if out.len() == g {
            break;
        }
        let mut w = vec![0.0; n];
        for u in vectors.iter() {
            let c = u[j];
            for (wi, ui) in w.iter_mut().zip(u) {
                *wi += c * ui;
            }
        }
        for _ in 0..2 {
            for q in &out {
                let c = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let nw = norm(&w);
        if nw > 1e-6 {
            w.iter_mut().for_each(|x| *x /= nw);
            out.push(w);
        }
    }
    if out.len() == g {
        for (dst, src) in vectors.iter_mut().zip(out) {
            *dst = src;
        }
    }
}

/// Flips `v` so its largest-magnitude entry (first on ties) is positive.
fn canonical_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(i) = v.iter().position(|x| x.abs() >= max * (1.0 - 1e-9)) {
        if v[i] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Hidden-space distance `‖c_i - c_j‖`.
pub fn hs_distance(e: &Embedding, i: NodeId, j: NodeId) -> Result<f64> {
    e.distance(i, j)
}

/// Scores `s_ij = -d_ij` for every pair.
pub fn hs_scores(e: &Embedding, pairs: &[Pair]) -> Result<ScoreTable> {
    for &(u, v) in pairs {
        e.check(u)?;
        e.check(v)?;
    }
    Ok(ScoreTable::from_scorer("HS", e, pairs))
}

/// Two-stage grid search: scan `alphas` at the dimension closest to 3,
/// then scan `dims` at the best alpha. Ties resolve to the smaller value.
/// Returns `(alpha, dim)` and the two profiles.
pub fn coordinate_search<F>(alphas: &[f64], dims: &[usize], mut evaluate: F) -> Result<TuneResult>
where
    F: FnMut(f64, usize) -> Result<f64>,
{
    if alphas.is_empty() || dims.is_empty() {
        return Err(Error::EmptySet("parameter grid"));
    }
    let mut alphas = alphas.to_vec();
    alphas.sort_by(|a, b| a.total_cmp(b));
    alphas.dedup();
    let mut dims = dims.to_vec();
    dims.sort_unstable();
    dims.dedup();
    let d0 = *dims
        .iter()
        .min_by_key(|&&d| (d as i64 - 3).unsigned_abs())
        .expect("non-empty");

    let mut alpha_profile = Vec::with_capacity(alphas.len());
    let mut best_alpha = (alphas[0], f64::NEG_INFINITY);
    for &a in &alphas {
        let v = evaluate(a, d0)?;
        alpha_profile.push((a, v));
        if v > best_alpha.1 {
            best_alpha = (a, v);
        }
    }
    let mut dim_profile = Vec::with_capacity(dims.len());
    let mut best_dim = (dims[0], f64::NEG_INFINITY);
    for &d in &dims {
        let v = if d == d0 {
            best_alpha.1
        } else {
            evaluate(best_alpha.0, d)?
        };
        dim_profile.push((d, v));
        if v > best_dim.1 {
            best_dim = (d, v);
        }
    }
    Ok(TuneResult {
        alpha: best_alpha.0,
        dim: best_dim.0,
        auc: best_dim.1,
        scan_dim: d0,
        alpha_profile,
        dim_profile,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TuneResult {
    pub alpha: f64,
    pub dim: usize,
    pub auc: f64,
    /// Dimension at which the `α` profile was taken.
    pub scan_dim: usize,
    /// AUC per alpha at the first-stage dimension.
    pub alpha_profile: Vec<(f64, f64)>,
    /// AUC per dimension at the selected alpha.
    pub dim_profile: Vec<(usize, f64)>,
}

#[derive(Clone, Debug)]
pub struct TuneConfig {
    pub eig_tol: f64,
    pub seed: u64,
    /// Non-edges compared against the probe set, as a multiple of its size.
    pub non_edge_factor: usize,
}

impl Default for TuneConfig {
    fn default() -> Self {
        TuneConfig {
            eig_tol: 1e-8,
            seed: 0,
            non_edge_factor: 10,
        }
    }
}

/// Picks `(α, d)` maximising HS AUC on the validation split `split` by
/// [`coordinate_search`]. AUC is exact over the probe edges against a fixed
/// sample of non-edges.
pub fn select_params(
    split: &Split,
    alphas: &[f64],
    dims: &[usize],
    cfg: &TuneConfig,
) -> Result<TuneResult> {
    let probe = split.probe_train();
    if probe.is_empty() {
        return Err(Error::EmptySet("probe"));
    }
    let mut rng = seeded(cfg.seed);
    let negatives = sample_eval_non_edges(split, cfg.non_edge_factor * probe.len(), &mut rng)?;
    coordinate_search(alphas, dims, |alpha, dim| {
        let mut ecfg = EmbeddingConfig::new(alpha, dim);
        ecfg.eig_tol = cfg.eig_tol;
        let e = embed(&split.train, &ecfg)?;
        let pos: Vec<f64> = probe.iter().map(|&(u, v)| e.score(u, v)).collect();
        let neg: Vec<f64> = negatives.iter().map(|&(u, v)| e.score(u, v)).collect();
        auc_from_scores(&pos, &neg, AucMode::Exact)
    })
}
