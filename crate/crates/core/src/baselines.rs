//! Classical similarity indices and the hybrid combination with
//! hidden-space distance.
//!
//! Every index is available two ways: as a [`PairScorer`] that computes
//! scores on demand, and as a `*_scores` function producing a
//! [`ScoreTable`] for an explicit pair list.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::embed::Embedding;
use crate::graph::{Graph, NodeId, Pair};
use crate::linalg::{
    conjugate_gradient, largest_eigenpairs, spectral_radius, LanczosConfig, ScaledAdjacency,
    ShiftedAdjacency, SymmetricEigen,
};
use crate::math::{ln, round};
use crate::rng::{derive_seed, seeded};
use crate::scores::{PairScorer, ScoreTable};
use crate::{Error, Result};

fn check_pairs(g: &Graph, pairs: &[Pair]) -> Result<()> {
    for &(u, v) in pairs {
        g.check_node(u)?;
        g.check_node(v)?;
    }
    Ok(())
}

/// Neighbourhood-overlap indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalIndex {
    /// `|Γ(i) ∩ Γ(j)|`
    CommonNeighbors,
    /// `|Γ(i) ∩ Γ(j)| / |Γ(i) ∪ Γ(j)|`, 0 when the union is empty.
    Jaccard,
    /// `Σ_{z ∈ Γ(i) ∩ Γ(j)} 1 / k_z`
    ResourceAllocation,
    /// `Σ_{z ∈ Γ(i) ∩ Γ(j)} 1 / ln k_z`; common neighbours of degree 1
    /// contribute nothing.
    AdamicAdar,
}

impl LocalIndex {
    pub fn name(self) -> &'static str {
        match self {
            LocalIndex::CommonNeighbors => "CN",
            LocalIndex::Jaccard => "Jaccard",
            LocalIndex::ResourceAllocation => "RA",
            LocalIndex::AdamicAdar => "AA",
        }
    }
}

/// A [`LocalIndex`] bound to a graph.
#[derive(Clone, Copy, Debug)]
pub struct LocalScorer<'g> {
    graph: &'g Graph,
    index: LocalIndex,
}

impl<'g> LocalScorer<'g> {
    pub fn new(graph: &'g Graph, index: LocalIndex) -> Self {
        LocalScorer { graph, index }
    }
}

impl PairScorer for LocalScorer<'_> {
    fn score(&self, u: NodeId, v: NodeId) -> f64 {
        let g = self.graph;
        let (a, b) = (g.neighbors(u), g.neighbors(v));
        let (mut i, mut j) = (0, 0);
        let mut common = 0usize;
        let mut weighted = 0.0;
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                core::cmp::Ordering::Less => i += 1,
                core::cmp::Ordering::Greater => j += 1,
                core::cmp::Ordering::Equal => {
                    let k = g.degree(a[i]) as f64;
                    common += 1;
                    match self.index {
                        LocalIndex::ResourceAllocation => weighted += 1.0 / k,
                        LocalIndex::AdamicAdar if k > 1.0 => weighted += 1.0 / ln(k),
                        _ => {}
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        match self.index {
            LocalIndex::CommonNeighbors => common as f64,
            LocalIndex::Jaccard => {
                let union = a.len() + b.len() - common;
                if union == 0 {
                    0.0
                } else {
                    common as f64 / union as f64
                }
            }
            LocalIndex::ResourceAllocation | LocalIndex::AdamicAdar => weighted,
        }
    }
}

fn local_scores(g: &Graph, pairs: &[Pair], index: LocalIndex) -> Result<ScoreTable> {
    check_pairs(g, pairs)?;
    Ok(ScoreTable::from_scorer(index.name(), &LocalScorer::new(g, index), pairs))
}

pub fn cn_scores(g: &Graph, pairs: &[Pair]) -> Result<ScoreTable> {
    local_scores(g, pairs, LocalIndex::CommonNeighbors)
}

pub fn jaccard_scores(g: &Graph, pairs: &[Pair]) -> Result<ScoreTable> {
    local_scores(g, pairs, LocalIndex::Jaccard)
}

pub fn ra_scores(g: &Graph, pairs: &[Pair]) -> Result<ScoreTable> {
    local_scores(g, pairs, LocalIndex::ResourceAllocation)
}

pub fn aa_scores(g: &Graph, pairs: &[Pair]) -> Result<ScoreTable> {
    local_scores(g, pairs, LocalIndex::AdamicAdar)
}

/// Katz attenuation. With `auto_scale` the effective attenuation is
/// `katz_alpha / λ_max(A)` (so `katz_alpha` is a fraction of the
/// convergence limit); otherwise `katz_alpha` is used as is.
#[derive(Clone, Debug, PartialEq)]
pub struct KatzConfig {
    pub katz_alpha: f64,
    pub auto_scale: bool,
    /// Relative residual of each linear solve.
    pub tol: f64,
}

impl Default for KatzConfig {
    fn default() -> Self {
        KatzConfig {
            katz_alpha: 0.5,
            auto_scale: true,
            tol: 1e-13,
        }
    }
}

impl KatzConfig {
    pub fn fixed(attenuation: f64) -> Self {
        KatzConfig {
            katz_alpha: attenuation,
            auto_scale: false,
            ..Self::default()
        }
    }
}

/// `S = (I - βA)^{-1} - I`, one conjugate-gradient solve per row.
pub struct KatzScorer<'g> {
    graph: &'g Graph,
    attenuation: f64,
    tol: f64,
}

impl<'g> KatzScorer<'g> {
    pub fn new(graph: &'g Graph, cfg: &KatzConfig) -> Result<Self> {
        if !(cfg.katz_alpha >= 0.0) || !cfg.katz_alpha.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "katz attenuation must be non-negative, got {}",
                cfg.katz_alpha
            )));
        }
        let lambda = spectral_radius(graph, 2000)?;
        let limit = if lambda > 0.0 { 1.0 / lambda } else { f64::INFINITY };
        let attenuation = if cfg.auto_scale {
            if !(cfg.katz_alpha < 1.0) {
                return Err(Error::SeriesDiverges {
                    attenuation: cfg.katz_alpha * limit,
                    limit,
                });
            }
            if lambda > 0.0 {
                cfg.katz_alpha / lambda
            } else {
                0.0
            }
        } else {
            cfg.katz_alpha
        };
        if attenuation >= limit {
            return Err(Error::SeriesDiverges { attenuation, limit });
        }
        Ok(KatzScorer {
            graph,
            attenuation,
            tol: cfg.tol,
        })
    }

    /// The attenuation actually used.
    pub fn attenuation(&self) -> f64 {
        self.attenuation
    }

    /// Column `u` of `(I - βA)^{-1}`.
    pub fn resolvent_column(&self, u: NodeId) -> Result<Vec<f64>> {
        let n = self.graph.node_count();
        let mut e = vec![0.0; n];
        e[u as usize] = 1.0;
        if self.attenuation == 0.0 {
            return Ok(e);
        }
        let op = ShiftedAdjacency {
            graph: self.graph,
            c: self.attenuation,
        };
        conjugate_gradient(&op, &e, self.tol, 10 * n + 100)
    }

    fn row(&self, u: NodeId) -> Vec<f64> {
        match self.resolvent_column(u) {
            Ok(x) => x,
            // a stalled solve surfaces as NaN scores, which the ranking
            // code places last and `katz_scores` reports as an error
            Err(_) => vec![f64::NAN; self.graph.node_count()],
        }
    }
}

impl PairScorer for KatzScorer<'_> {
    fn score(&self, u: NodeId, v: NodeId) -> f64 {
        if u == v {
            return 0.0;
        }
        self.row(u)[v as usize]
    }

    fn score_row(&self, u: NodeId, vs: &[NodeId], out: &mut Vec<f64>) {
        let x = self.row(u);
        out.clear();
        out.extend(vs.iter().map(|&v| if v == u { 0.0 } else { x[v as usize] }));
    }
}

pub fn katz_scores(g: &Graph, cfg: &KatzConfig, pairs: &[Pair]) -> Result<ScoreTable> {
    check_pairs(g, pairs)?;
    let k = KatzScorer::new(g, cfg)?;
    let t = ScoreTable::from_scorer("Katz", &k, pairs);
    if t.iter().any(|(_, s)| s.is_nan()) {
        return Err(Error::SolveFailed { residual: f64::NAN });
    }
    Ok(t)
}

/// Structural perturbation settings.
#[derive(Clone, Debug, PartialEq)]
pub struct SpmConfig {
    /// Fraction of edges removed per repetition.
    pub perturb_fraction: f64,
    pub repetitions: usize,
    pub seed: u64,
    /// Above this many nodes only the `top_k` leading eigenpairs of the
    /// residual matrix are used.
    pub dense_limit: usize,
    pub top_k: usize,
}

impl Default for SpmConfig {
    fn default() -> Self {
        SpmConfig {
            perturb_fraction: 0.1,
            repetitions: 10,
            seed: 0,
            dense_limit: 3000,
            top_k: 128,
        }
    }
}

/// First-order perturbation reconstruction `Ã = Σ_k (λ_k + Δλ_k) x_k x_kᵀ`
/// of `g`, where `(λ_k, x_k)` are eigenpairs of `g` minus `removed` and
/// `Δλ_k = x_kᵀ ΔA x_k` for the adjacency `ΔA` of `removed`. Returns a
/// row-major `n × n` matrix.
pub fn spm_reconstruction(g: &Graph, removed: &[Pair], cfg: &SpmConfig) -> Result<Vec<f64>> {
    let n = g.node_count();
    check_pairs(g, removed)?;
    let mut gone: Vec<Pair> = removed.iter().map(|&(u, v)| crate::graph::pair(u, v)).collect();
    gone.sort_unstable();
    gone.dedup();
    if let Some(&(u, v)) = gone.iter().find(|&&(u, v)| !g.has_edge(u, v)) {
        return Err(Error::InvalidConfig(format!("pair ({u}, {v}) is not an edge")));
    }
    let residual = Graph::from_edges(n, g.edges().filter(|p| gone.binary_search(p).is_err()))?;
    let op = ScaledAdjacency::unscaled(&residual);

    let (values, vectors): (Vec<f64>, Vec<Vec<f64>>) = if n <= cfg.dense_limit {
        let eig = SymmetricEigen::new(n, op.to_dense());
        let vecs = (0..n).map(|k| eig.vector(k)).collect();
        (eig.values, vecs)
    } else {
        let lcfg = LanczosConfig {
            tol: 1e-8,
            max_matvec: 20 * n,
            ..LanczosConfig::default()
        };
        let pairs = largest_eigenpairs(&op, cfg.top_k.min(n), &lcfg)?;
        (pairs.values, pairs.vectors)
    };

    let mut out = vec![0.0; n * n];
    for (lambda, x) in values.iter().zip(&vectors) {
        let xx: f64 = x.iter().map(|t| t * t).sum();
        let shift: f64 = gone
            .iter()
            .map(|&(u, v)| 2.0 * x[u as usize] * x[v as usize])
            .sum::<f64>()
            / xx;
        let w = (lambda + shift) / xx;
        if w == 0.0 {
            continue;
        }
        for i in 0..n {
            let wi = w * x[i];
            if wi == 0.0 {
                continue;
            }
            let row = &mut out[i * n..(i + 1) * n];
            for (o, xj) in row.iter_mut().zip(x) {
                *o += wi * xj;
            }
        }
    }
    Ok(out)
}

/// Averaged structural-perturbation scores.
pub struct SpmScorer {
    n: usize,
    matrix: Vec<f64>,
}

impl SpmScorer {
    pub fn new(g: &Graph, cfg: &SpmConfig) -> Result<Self> {
        let m = g.edge_count();
        if !(cfg.perturb_fraction > 0.0 && cfg.perturb_fraction < 1.0) {
            return Err(Error::InvalidConfig("perturb_fraction must lie in (0, 1)".into()));
        }
        if cfg.repetitions == 0 {
            return Err(Error::InvalidConfig("SPM needs at least one repetition".into()));
        }
        if cfg.perturb_fraction * (m as f64) < 1.0 {
            return Err(Error::InvalidConfig(format!(
                "graph with {m} edges is too small for perturb_fraction {}",
                cfg.perturb_fraction
            )));
        }
        let take = (round(cfg.perturb_fraction * m as f64) as usize).max(1);
        let n = g.node_count();
        let edges: Vec<Pair> = g.edges().collect();
        let mut matrix = vec![0.0; n * n];
        for r in 0..cfg.repetitions {
            let mut rng = seeded(derive_seed(cfg.seed, r as u64));
            let removed = choose(&edges, take, &mut rng);
            let rec = spm_reconstruction(g, &removed, cfg)?;
            for (a, b) in matrix.iter_mut().zip(rec) {
                *a += b;
            }
        }
        let inv = 1.0 / cfg.repetitions as f64;
        matrix.iter_mut().for_each(|x| *x *= inv);
        Ok(SpmScorer { n, matrix })
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }
}

impl PairScorer for SpmScorer {
    fn score(&self, u: NodeId, v: NodeId) -> f64 {
        self.matrix[u as usize * self.n + v as usize]
    }
}

/// `count` distinct elements chosen uniformly (partial Fisher–Yates), in
/// selection order.
pub(crate) fn choose<T: Copy, R: Rng + ?Sized>(items: &[T], count: usize, rng: &mut R) -> Vec<T> {
    let mut idx: Vec<usize> = (0..items.len()).collect();
    let count = count.min(items.len());
    for i in 0..count {
        let j = rng.random_range(i..idx.len());
        idx.swap(i, j);
    }
    idx[..count].iter().map(|&i| items[i]).collect()
}

pub fn spm_scores(g: &Graph, cfg: &SpmConfig, pairs: &[Pair]) -> Result<ScoreTable> {
    check_pairs(g, pairs)?;
    let s = SpmScorer::new(g, cfg)?;
    Ok(ScoreTable::from_scorer("SPM", &s, pairs))
}

/// How a classical score `s` is combined with hidden distance `d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HybridMode {
    /// `s · (-d)`.
    Product,
    /// `s / (d + ε)`: increasing in `s`, decreasing in `d`.
    Quotient { eps: f64 },
}

/// Default `ε` of [`HybridMode::Quotient`].
pub const HYBRID_EPS: f64 = 1e-12;

impl HybridMode {
    pub const QUOTIENT: HybridMode = HybridMode::Quotient { eps: HYBRID_EPS };
}

impl Default for HybridMode {
    fn default() -> Self {
        Self::QUOTIENT
    }
}

/// Combines a classical score with a hidden distance. A zero classical
/// score yields zero in both modes, whatever the distance.
#[inline]
pub fn hybrid_combine(s: f64, d: f64, mode: HybridMode) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    match mode {
        HybridMode::Product => -s * d,
        HybridMode::Quotient { eps } => s / (d + eps),
    }
}

/// Hybrid table from a classical table and an HS table (`-d` scores) over
/// the same pairs.
pub fn hybrid_scores(a: &ScoreTable, hs: &ScoreTable, mode: HybridMode) -> Result<ScoreTable> {
    if !a.same_pairs(hs) {
        return Err(Error::PairSetMismatch);
    }
    let method = format!("hybrid:{}", a.method());
    Ok(ScoreTable::new(
        method,
        a.iter()
            .zip(hs.iter())
            .map(|((p, s), (_, h))| (p, hybrid_combine(s, -h, mode))),
    ))
}

/// On-demand hybrid of any scorer with an embedding.
pub struct HybridScorer<'a> {
    base: Box<dyn PairScorer + 'a>,
    embedding: Embedding,
    mode: HybridMode,
    name: String,
}

impl<'a> HybridScorer<'a> {
    pub fn new(base: Box<dyn PairScorer + 'a>, base_name: &str, embedding: Embedding, mode: HybridMode) -> Self {
        HybridScorer {
            base,
            embedding,
            mode,
            name: format!("hybrid:{base_name}"),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl PairScorer for HybridScorer<'_> {
    fn score(&self, u: NodeId, v: NodeId) -> f64 {
        let s = self.base.score(u, v);
        hybrid_combine(s, -self.embedding.score(u, v), self.mode)
    }

    fn score_row(&self, u: NodeId, vs: &[NodeId], out: &mut Vec<f64>) {
        self.base.score_row(u, vs, out);
        for (o, &v) in out.iter_mut().zip(vs) {
            *o = hybrid_combine(*o, -self.embedding.score(u, v), self.mode);
        }
    }
}
