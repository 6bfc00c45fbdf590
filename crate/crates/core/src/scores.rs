//! Method-tagged similarity scores over unordered node pairs.

use alloc::string::String;
use alloc::vec::Vec;

use crate::graph::{pair, NodeId, Pair};
use crate::{Error, Result};

/// Anything that assigns a similarity to a node pair. Higher means more
/// likely to be linked. Implementations must be symmetric in `(u, v)`.
pub trait PairScorer {
    fn score(&self, u: NodeId, v: NodeId) -> f64;

    /// Scores `(u, v)` for every `v` in `vs`, replacing the contents of
    /// `out`. Scorers that work column by column (Katz) override this.
    fn score_row(&self, u: NodeId, vs: &[NodeId], out: &mut Vec<f64>) {
        out.clear();
        out.extend(vs.iter().map(|&v| self.score(u, v)));
    }
}

impl<S: PairScorer + ?Sized> PairScorer for &S {
    fn score(&self, u: NodeId, v: NodeId) -> f64 {
        (**self).score(u, v)
    }

    fn score_row(&self, u: NodeId, vs: &[NodeId], out: &mut Vec<f64>) {
        (**self).score_row(u, vs, out)
    }
}

impl<S: PairScorer + ?Sized> PairScorer for alloc::boxed::Box<S> {
    fn score(&self, u: NodeId, v: NodeId) -> f64 {
        (**self).score(u, v)
    }

    fn score_row(&self, u: NodeId, vs: &[NodeId], out: &mut Vec<f64>) {
        (**self).score_row(u, vs, out)
    }
}

/// Scores a list of pairs, grouping by first endpoint so that row-wise
/// scorers do each row once. Output order matches `pairs`.
pub fn score_pairs<S: PairScorer + ?Sized>(scorer: &S, pairs: &[Pair]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_unstable_by_key(|&i| pair(pairs[i].0, pairs[i].1));
    let mut out = alloc::vec![0.0; pairs.len()];
    let mut vs = Vec::new();
    let mut row = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let u = pair(pairs[order[start]].0, pairs[order[start]].1).0;
        let mut end = start;
        vs.clear();
        while end < order.len() {
            let p = pair(pairs[order[end]].0, pairs[order[end]].1);
            if p.0 != u {
                break;
            }
            vs.push(p.1);
            end += 1;
        }
        scorer.score_row(u, &vs, &mut row);
        for (k, &i) in order[start..end].iter().enumerate() {
            out[i] = row[k];
        }
        start = end;
    }
    out
}

/// Scores keyed by canonical `(min, max)` pair, stored sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreTable {
    method: String,
    entries: Vec<(Pair, f64)>,
}

impl ScoreTable {
    /// Builds a table; pairs are canonicalised and duplicates keep the
    /// first score seen.
    pub fn new<I>(method: impl Into<String>, entries: I) -> Self
    where
        I: IntoIterator<Item = (Pair, f64)>,
    {
        let mut entries: Vec<(Pair, f64)> = entries
            .into_iter()
            .map(|((u, v), s)| (pair(u, v), s))
            .collect();
        entries.sort_by_key(|a| a.0);
        entries.dedup_by(|b, a| a.0 == b.0);
        ScoreTable {
            method: method.into(),
            entries,
        }
    }

    /// Scores `pairs` with `scorer`.
    pub fn from_scorer<S: PairScorer + ?Sized>(method: impl Into<String>, scorer: &S, pairs: &[Pair]) -> Self {
        let scores = score_pairs(scorer, pairs);
        Self::new(method, pairs.iter().copied().zip(scores))
    }

    pub fn method(&self) -> &str {
        &self.method
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, u: NodeId, v: NodeId) -> Option<f64> {
        let p = pair(u, v);
        self.entries
            .binary_search_by(|e| e.0.cmp(&p))
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn require(&self, u: NodeId, v: NodeId) -> Result<f64> {
        self.get(u, v).ok_or(Error::MissingScore(u, v))
    }

    /// Entries in ascending pair order.
    pub fn iter(&self) -> impl Iterator<Item = (Pair, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = Pair> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn same_pairs(&self, other: &ScoreTable) -> bool {
        self.len() == other.len() && self.pairs().eq(other.pairs())
    }

    /// Applies `f` to every score.
    pub fn map(&self, method: impl Into<String>, mut f: impl FnMut(f64) -> f64) -> ScoreTable {
        ScoreTable {
            method: method.into(),
            entries: self.entries.iter().map(|&(p, s)| (p, f(s))).collect(),
        }
    }
}

impl PairScorer for ScoreTable {
    /// Missing pairs score `-∞`.
    fn score(&self, u: NodeId, v: NodeId) -> f64 {
        self.get(u, v).unwrap_or(f64::NEG_INFINITY)
    }
}

/// Total order on scores where `-0.0 == 0.0`.
#[inline]
pub(crate) fn cmp_scores(a: f64, b: f64) -> core::cmp::Ordering {
    a.partial_cmp(&b).unwrap_or_else(|| a.total_cmp(&b))
}
