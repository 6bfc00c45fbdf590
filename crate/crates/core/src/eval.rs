//! Train/probe splits, AUC, precision and repeated experiments.

use alloc::boxed::Box;
use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use rand::Rng;

use crate::baselines::{
    choose, HybridMode, HybridScorer, KatzConfig, KatzScorer, LocalIndex, LocalScorer, SpmConfig,
    SpmScorer,
};
use crate::embed::{embed, EmbeddingConfig};
use crate::graph::{pair, Graph, NodeId, Pair};
use crate::math::{round, sqrt};
use crate::rng::{derive_seed, seeded, splitmix64, unit_f64};
use crate::scores::{cmp_scores, score_pairs, PairScorer, ScoreTable};
use crate::{Error, Result};

/// A training graph and the held-out probe edges.
///
/// Nodes left isolated by the removal of the probe edges are dropped from
/// the training graph, so its ids are a compaction of the original ones.
#[derive(Clone, Debug, PartialEq)]
pub struct Split {
    pub train: Graph,
    /// Held-out edges in original ids, sorted.
    pub probe: Vec<Pair>,
    /// `retained[t]` is the original id of training node `t`.
    pub retained: Vec<NodeId>,
    probe_train: Vec<Pair>,
}

impl Split {
    /// Probe edges whose endpoints both survive in the training graph, in
    /// training ids, sorted. These are the edges that get scored.
    pub fn probe_train(&self) -> &[Pair] {
        &self.probe_train
    }

    /// Probe edges excluded because an endpoint is absent from training.
    pub fn dropped_probe(&self) -> usize {
        self.probe.len() - self.probe_train.len()
    }

    pub fn is_probe(&self, u: NodeId, v: NodeId) -> bool {
        self.probe_train.binary_search(&pair(u, v)).is_ok()
    }

    /// Training-graph non-edges that are not probe edges.
    pub fn negative_count(&self) -> usize {
        self.train.non_edge_count() - self.probe_train.len()
    }
}

/// Uniform edge partition with `max(1, round(f·|E|))` probe edges.
pub fn random_split(g: &Graph, probe_fraction: f64, seed: u64) -> Result<Split> {
    if !(probe_fraction > 0.0 && probe_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "probe fraction must lie in (0, 1), got {probe_fraction}"
        )));
    }
    let edges: Vec<Pair> = g.edges().collect();
    let m = edges.len();
    let take = (round(probe_fraction * m as f64) as usize).max(1);
    if take >= m {
        return Err(Error::InvalidConfig(format!(
            "probe fraction {probe_fraction} leaves no training edges out of {m}"
        )));
    }
    let mut rng = seeded(seed);
    let mut probe = choose(&edges, take, &mut rng);
    probe.sort_unstable();
    let full = Graph::from_edges(
        g.node_count(),
        edges.iter().copied().filter(|p| probe.binary_search(p).is_err()),
    )?;
    let (train, retained) = full.without_isolated();
    let mut to_train = vec![NodeId::MAX; g.node_count()];
    for (t, &o) in retained.iter().enumerate() {
        to_train[o as usize] = t as NodeId;
    }
    let mut probe_train: Vec<Pair> = probe
        .iter()
        .filter_map(|&(u, v)| {
            let (a, b) = (to_train[u as usize], to_train[v as usize]);
            (a != NodeId::MAX && b != NodeId::MAX).then(|| pair(a, b))
        })
        .collect();
    probe_train.sort_unstable();
    Ok(Split {
        train,
        probe,
        retained,
        probe_train,
    })
}

/// `count` uniform training-graph non-edges that are not probe edges (with
/// replacement), by rejection sampling.
pub fn sample_eval_non_edges<R: Rng + ?Sized>(split: &Split, count: usize, rng: &mut R) -> Result<Vec<Pair>> {
    if split.negative_count() == 0 {
        return Err(Error::NoNonEdges);
    }
    let n = split.train.node_count() as NodeId;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v && !split.train.has_edge(u, v) && !split.is_probe(u, v) {
            out.push(pair(u, v));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AucMode {
    /// `n` independent uniformly drawn (probe, non-edge) comparisons.
    Sampled { n: usize, seed: u64 },
    /// All `|probe| × |non-edges|` comparisons (Mann–Whitney, ties count ½).
    Exact,
}

/// `(n₁ + ½ n₂) / n`.
pub fn auc_counts(higher: u64, ties: u64, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptySet("comparisons"));
    }
    if higher + ties > n {
        return Err(Error::InvalidConfig("more outcomes than comparisons".to_string()));
    }
    Ok((higher as f64 + 0.5 * ties as f64) / n as f64)
}

#[inline]
fn clean(s: f64) -> f64 {
    if s.is_nan() {
        f64::NEG_INFINITY
    } else {
        s
    }
}

/// AUC of positive scores `pos` against negative scores `neg`. NaN scores
/// rank below everything.
pub fn auc_from_scores(pos: &[f64], neg: &[f64], mode: AucMode) -> Result<f64> {
    if pos.is_empty() {
        return Err(Error::EmptySet("probe"));
    }
    if neg.is_empty() {
        return Err(Error::EmptySet("non-edges"));
    }
    match mode {
        AucMode::Exact => {
            let mut sorted: Vec<f64> = neg.iter().map(|&s| clean(s)).collect();
            sorted.sort_by(|a, b| cmp_scores(*a, *b));
            let (mut higher, mut ties) = (0u128, 0u128);
            for &p in pos {
                let p = clean(p);
                let below = sorted.partition_point(|&x| cmp_scores(x, p) == Ordering::Less);
                let not_above = sorted.partition_point(|&x| cmp_scores(x, p) != Ordering::Greater);
                higher += below as u128;
                ties += (not_above - below) as u128;
            }
            let n = pos.len() as u128 * neg.len() as u128;
            Ok((higher as f64 + 0.5 * ties as f64) / n as f64)
        }
        AucMode::Sampled { n, seed } => {
            if n == 0 {
                return Err(Error::EmptySet("comparisons"));
            }
            let mut rng = seeded(seed);
            let (mut higher, mut ties) = (0u64, 0u64);
            for _ in 0..n {
                let p = clean(pos[rng.random_range(0..pos.len())]);
                let q = clean(neg[rng.random_range(0..neg.len())]);
                match cmp_scores(p, q) {
                    Ordering::Greater => higher += 1,
                    Ordering::Equal => ties += 1,
                    Ordering::Less => {}
                }
            }
            auc_counts(higher, ties, n as u64)
        }
    }
}

/// AUC of a score table over explicit probe and non-edge pairs.
pub fn auc(scores: &ScoreTable, probe: &[Pair], non_edges: &[Pair], mode: AucMode) -> Result<f64> {
    let pos = probe
        .iter()
        .map(|&(u, v)| scores.require(u, v))
        .collect::<Result<Vec<_>>>()?;
    let neg = non_edges
        .iter()
        .map(|&(u, v)| scores.require(u, v))
        .collect::<Result<Vec<_>>>()?;
    auc_from_scores(&pos, &neg, mode)
}

/// Candidate ranked by score (higher first), then pair (smaller first).
#[derive(Clone, Copy, Debug)]
struct Ranked {
    score: f64,
    pair: Pair,
}

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    /// `Greater` means ranked earlier.
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_scores(self.score, other.score).then_with(|| other.pair.cmp(&self.pair))
    }
}

/// Keeps the `l` best candidates seen.
struct TopL {
    l: usize,
    heap: BinaryHeap<Reverse<Ranked>>,
}

impl TopL {
    fn new(l: usize) -> Self {
        TopL {
            l,
            heap: BinaryHeap::with_capacity(l + 1),
        }
    }

    #[inline]
    fn push(&mut self, score: f64, pair: Pair) {
        let r = Ranked {
            score: clean(score),
            pair,
        };
        if self.heap.len() < self.l {
            self.heap.push(Reverse(r));
        } else if let Some(worst) = self.heap.peek() {
            if r > worst.0 {
                self.heap.pop();
                self.heap.push(Reverse(r));
            }
        }
    }

    fn into_pairs(self) -> Vec<Pair> {
        let mut v: Vec<Ranked> = self.heap.into_iter().map(|r| r.0).collect();
        v.sort_by(|a, b| b.cmp(a));
        v.into_iter().map(|r| r.pair).collect()
    }
}

/// The `l` highest-scoring entries of `scores`, best first.
pub fn top_pairs(scores: &ScoreTable, l: usize) -> Vec<Pair> {
    let mut top = TopL::new(l);
    for (p, s) in scores.iter() {
        top.push(s, p);
    }
    top.into_pairs()
}

/// Fraction of the top `l` entries of `scores` that are in `probe`.
pub fn precision_at(scores: &ScoreTable, probe: &[Pair], l: usize) -> Result<f64> {
    if l == 0 {
        return Err(Error::InvalidConfig("list length must be at least 1".to_string()));
    }
    if l > scores.len() {
        return Err(Error::ListTooLong {
            l,
            candidates: scores.len(),
        });
    }
    let mut probe: Vec<Pair> = probe.iter().map(|&(u, v)| pair(u, v)).collect();
    probe.sort_unstable();
    let hits = top_pairs(scores, l)
        .iter()
        .filter(|p| probe.binary_search(p).is_ok())
        .count();
    Ok(hits as f64 / l as f64)
}

/// Precision at `l` over every non-edge of `split.train`, scored on the fly.
pub fn precision_streaming<S: PairScorer + ?Sized>(scorer: &S, split: &Split, l: usize) -> Result<f64> {
    let g = &split.train;
    let candidates = g.non_edge_count();
    if l == 0 {
        return Err(Error::InvalidConfig("list length must be at least 1".to_string()));
    }
    if l > candidates {
        return Err(Error::ListTooLong { l, candidates });
    }
    let mut top = TopL::new(l);
    let mut vs = Vec::new();
    let mut row = Vec::new();
    for u in 0..g.node_count() as NodeId {
        vs.clear();
        let nb = g.neighbors(u);
        let mut k = nb.partition_point(|&x| x <= u);
        for v in (u + 1)..g.node_count() as NodeId {
            if k < nb.len() && nb[k] == v {
                k += 1;
                continue;
            }
            vs.push(v);
        }
        if vs.is_empty() {
            continue;
        }
        scorer.score_row(u, &vs, &mut row);
        for (&v, &s) in vs.iter().zip(&row) {
            top.push(s, (u, v));
        }
    }
    let hits = top
        .into_pairs()
        .iter()
        .filter(|&&(u, v)| split.is_probe(u, v))
        .count();
    Ok(hits as f64 / l as f64)
}

/// A link-prediction method and its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum MethodSpec {
    Cn,
    Aa,
    Ra,
    Jaccard,
    Katz(KatzConfig),
    Spm(SpmConfig),
    Hs(EmbeddingConfig),
    Hybrid {
        base: Box<MethodSpec>,
        hs: EmbeddingConfig,
        mode: HybridMode,
    },
    /// Independent uniform scores, for calibration.
    Random { seed: u64 },
}

impl MethodSpec {
    pub fn name(&self) -> String {
        match self {
            MethodSpec::Cn => "CN".into(),
            MethodSpec::Aa => "AA".into(),
            MethodSpec::Ra => "RA".into(),
            MethodSpec::Jaccard => "Jaccard".into(),
            MethodSpec::Katz(_) => "Katz".into(),
            MethodSpec::Spm(_) => "SPM".into(),
            MethodSpec::Hs(_) => "HS".into(),
            MethodSpec::Hybrid { base, .. } => format!("hybrid:{}", base.name()),
            MethodSpec::Random { .. } => "Random".into(),
        }
    }

    /// Builds a scorer on `train`. `seed` feeds methods with internal
    /// randomness (SPM perturbations, random scores).
    pub fn build<'g>(&self, train: &'g Graph, seed: u64) -> Result<Box<dyn PairScorer + 'g>> {
        Ok(match self {
            MethodSpec::Cn => Box::new(LocalScorer::new(train, LocalIndex::CommonNeighbors)),
            MethodSpec::Aa => Box::new(LocalScorer::new(train, LocalIndex::AdamicAdar)),
            MethodSpec::Ra => Box::new(LocalScorer::new(train, LocalIndex::ResourceAllocation)),
            MethodSpec::Jaccard => Box::new(LocalScorer::new(train, LocalIndex::Jaccard)),
            MethodSpec::Katz(cfg) => Box::new(KatzScorer::new(train, cfg)?),
            MethodSpec::Spm(cfg) => {
                let cfg = SpmConfig {
                    seed: derive_seed(cfg.seed, seed),
                    ..cfg.clone()
                };
                Box::new(SpmScorer::new(train, &cfg)?)
            }
            MethodSpec::Hs(cfg) => Box::new(embed(train, cfg)?),
            MethodSpec::Hybrid { base, hs, mode } => {
                let inner = base.build(train, seed)?;
                let e = embed(train, hs)?;
                Box::new(HybridScorer::new(inner, &base.name(), e, *mode))
            }
            MethodSpec::Random { seed: s } => Box::new(RandomScorer {
                seed: derive_seed(*s, seed),
            }),
        })
    }
}

/// Hash-based uniform scores, symmetric in the pair.
#[derive(Clone, Copy, Debug)]
pub struct RandomScorer {
    pub seed: u64,
}

impl PairScorer for RandomScorer {
    fn score(&self, u: NodeId, v: NodeId) -> f64 {
        let (a, b) = pair(u, v);
        unit_f64(splitmix64(self.seed ^ splitmix64(((a as u64) << 32) | b as u64)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub probe_fraction: f64,
    pub repetitions: usize,
    pub seed: u64,
    /// Sampled AUC comparisons; `None` means `min(10⁶, 1000·|probe|)`.
    pub auc_comparisons: Option<usize>,
    /// Compute precision at `L = |probe|` (a full pass over all non-edges).
    pub precision: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            probe_fraction: 0.1,
            repetitions: 1,
            seed: 0,
            auc_comparisons: None,
            precision: true,
        }
    }
}

/// Metrics of one method on one split.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RepOutcome {
    pub auc: f64,
    pub precision: f64,
    pub n_comparisons: usize,
}

/// Split `g` for repetition `rep` and evaluate every method on it. The
/// outer error means the split itself failed; per-method failures are
/// returned in place.
pub fn run_repetition(
    g: &Graph,
    methods: &[MethodSpec],
    cfg: &ExperimentConfig,
    rep: usize,
) -> Result<Vec<Result<RepOutcome>>> {
    let rep_seed = derive_seed(cfg.seed, rep as u64);
    let split = random_split(g, cfg.probe_fraction, rep_seed)?;
    let probe = split.probe_train();
    if probe.is_empty() {
        return Err(Error::EmptySet("probe"));
    }
    let n_cmp = cfg
        .auc_comparisons
        .unwrap_or_else(|| (probe.len() * 1000).min(1_000_000));
    if n_cmp == 0 {
        return Err(Error::EmptySet("comparisons"));
    }
    // comparisons shared by every method: probe index and a non-edge
    let mut rng = seeded(derive_seed(rep_seed, 1));
    let negatives = sample_eval_non_edges(&split, n_cmp, &mut rng)?;
    let probe_index: Vec<usize> = (0..n_cmp).map(|_| rng.random_range(0..probe.len())).collect();

    let mut out = Vec::with_capacity(methods.len());
    for (mi, method) in methods.iter().enumerate() {
        out.push(evaluate_method(method, &split, &negatives, &probe_index, cfg, derive_seed(rep_seed, 2 + mi as u64)));
    }
    Ok(out)
}

fn evaluate_method(
    method: &MethodSpec,
    split: &Split,
    negatives: &[Pair],
    probe_index: &[usize],
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<RepOutcome> {
    let scorer = method.build(&split.train, seed)?;
    let probe = split.probe_train();
    let pos: Vec<f64> = score_pairs(&*scorer, probe).into_iter().map(clean).collect();
    let neg: Vec<f64> = score_pairs(&*scorer, negatives).into_iter().map(clean).collect();
    let (mut higher, mut ties) = (0u64, 0u64);
    for (&i, &q) in probe_index.iter().zip(&neg) {
        match cmp_scores(pos[i], q) {
            Ordering::Greater => higher += 1,
            Ordering::Equal => ties += 1,
            Ordering::Less => {}
        }
    }
    let auc = auc_counts(higher, ties, negatives.len() as u64)?;
    let precision = if cfg.precision {
        precision_streaming(&*scorer, split, probe.len())?
    } else {
        f64::NAN
    };
    Ok(RepOutcome {
        auc,
        precision,
        n_comparisons: negatives.len(),
    })
}

/// Mean and standard error of one method over repetitions.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub method: String,
    pub auc: f64,
    pub auc_stderr: f64,
    pub precision: f64,
    pub precision_stderr: f64,
    /// AUC comparisons per repetition.
    pub n_comparisons: usize,
    pub repetitions: usize,
    /// First failure, if the method failed on any repetition.
    pub error: Option<String>,
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, sqrt(var / n))
}

/// Folds per-repetition outcomes (`reps[r][m]`) into one report per method.
pub fn aggregate(methods: &[MethodSpec], reps: &[Result<Vec<Result<RepOutcome>>>]) -> Vec<EvalReport> {
    methods
        .iter()
        .enumerate()
        .map(|(mi, m)| {
            let mut aucs = Vec::new();
            let mut precs = Vec::new();
            let mut n_comparisons = 0;
            let mut error = None;
            for rep in reps {
                let outcome = match rep {
                    Ok(per_method) => per_method[mi].as_ref().map_err(|e| e.to_string()),
                    Err(e) => Err(e.to_string()),
                };
                match outcome {
                    Ok(o) => {
                        aucs.push(o.auc);
                        precs.push(o.precision);
                        n_comparisons = o.n_comparisons;
                    }
                    Err(e) => {
                        error.get_or_insert(e);
                    }
                }
            }
            let (auc, auc_stderr, precision, precision_stderr) = if error.is_some() || aucs.is_empty() {
                (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
            } else {
                let (a, ase) = mean_stderr(&aucs);
                let (p, pse) = mean_stderr(&precs);
                (a, ase, p, pse)
            };
            EvalReport {
                method: m.name(),
                auc,
                auc_stderr,
                precision,
                precision_stderr,
                n_comparisons,
                repetitions: aucs.len(),
                error,
            }
        })
        .collect()
}

/// Repeats split-and-evaluate `cfg.repetitions` times, sequentially.
pub fn run_experiment(g: &Graph, methods: &[MethodSpec], cfg: &ExperimentConfig) -> Result<Vec<EvalReport>> {
    if cfg.repetitions == 0 {
        return Err(Error::InvalidConfig("at least one repetition is required".to_string()));
    }
    if methods.is_empty() {
        return Err(Error::EmptySet("methods"));
    }
    let reps: Vec<_> = (0..cfg.repetitions)
        .map(|r| run_repetition(g, methods, cfg, r))
        .collect();
    Ok(aggregate(methods, &reps))
}
