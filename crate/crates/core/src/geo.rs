//! Agreement between hidden-space and real-space distances.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::embed::{embed, Embedding, EmbeddingConfig};
use crate::graph::{Graph, NodeId, Pair};
use crate::math::{asin, cos, sin, sqrt};
use crate::rng::seeded;
use crate::scores::cmp_scores;
use crate::{Error, Result};

/// Mean Earth radius in kilometres.
pub const EARTH_RADIUS_KM: f64 = 6371.0088;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Euclidean,
    /// Great-circle distance in km; positions are `(latitude, longitude)`
    /// in degrees.
    Haversine,
}

/// One position per node.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateSet {
    dim: usize,
    values: Vec<f64>,
    metric: Metric,
}

impl CoordinateSet {
    /// `values` is row-major `n × dim`.
    pub fn new(dim: usize, values: Vec<f64>, metric: Metric) -> Result<Self> {
        if dim == 0 || !values.len().is_multiple_of(dim) {
            return Err(Error::InvalidConfig(format!(
                "{} values do not form rows of dimension {dim}",
                values.len()
            )));
        }
        if metric == Metric::Haversine && dim != 2 {
            return Err(Error::InvalidConfig("haversine needs (lat, lon) pairs".to_string()));
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::MissingCoordinate(format!("node {}", i / dim)));
        }
        Ok(CoordinateSet { dim, values, metric })
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn position(&self, i: NodeId) -> &[f64] {
        let i = i as usize;
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn distance(&self, i: NodeId, j: NodeId) -> f64 {
        let (a, b) = (self.position(i), self.position(j));
        match self.metric {
            Metric::Euclidean => sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()),
            Metric::Haversine => {
                let rad = core::f64::consts::PI / 180.0;
                let (p1, p2) = (a[0] * rad, b[0] * rad);
                let dp = p2 - p1;
                let dl = (b[1] - a[1]) * rad;
                let h = sin(dp / 2.0) * sin(dp / 2.0) + cos(p1) * cos(p2) * sin(dl / 2.0) * sin(dl / 2.0);
                2.0 * EARTH_RADIUS_KM * asin(sqrt(h.clamp(0.0, 1.0)))
            }
        }
    }

    /// Positions of `kept` nodes, in that order.
    pub fn restrict(&self, kept: &[NodeId]) -> CoordinateSet {
        let mut values = Vec::with_capacity(kept.len() * self.dim);
        for &k in kept {
            values.extend_from_slice(self.position(k));
        }
        CoordinateSet {
            dim: self.dim,
            values,
            metric: self.metric,
        }
    }
}

/// Ranks starting at 1, tied values sharing their average rank.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| cmp_scores(xs[a], xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i + 1;
        while j < idx.len() && cmp_scores(xs[idx[j]], xs[idx[i]]).is_eq() {
            j += 1;
        }
        let r = (i + j + 1) as f64 / 2.0;
        for &k in &idx[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::InvalidConfig(
            "rank correlation is undefined for a constant sequence".to_string(),
        ));
    }
    Ok((sab / sqrt(saa * sbb)).clamp(-1.0, 1.0))
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidConfig("sequences differ in length".to_string()));
    }
    if xs.len() < 2 {
        return Err(Error::EmptySet("pairs"));
    }
    pearson(&average_ranks(xs), &average_ranks(ys))
}

/// Every pair when there are at most `budget` of them, otherwise `budget`
/// uniform pairs (with replacement).
pub fn correlation_pairs(n: usize, budget: usize, seed: u64) -> Vec<Pair> {
    let total = n * n.saturating_sub(1) / 2;
    if total <= budget {
        let mut out = Vec::with_capacity(total);
        for u in 0..n as NodeId {
            for v in (u + 1)..n as NodeId {
                out.push((u, v));
            }
        }
        return out;
    }
    let mut rng = seeded(seed);
    let mut out = Vec::with_capacity(budget);
    while out.len() < budget {
        let u = rng.random_range(0..n as NodeId);
        let v = rng.random_range(0..n as NodeId);
        if u != v {
            out.push(crate::graph::pair(u, v));
        }
    }
    out
}

pub const DEFAULT_PAIR_BUDGET: usize = 2_000_000;

fn check_cover(e_nodes: usize, c: &CoordinateSet) -> Result<()> {
    if c.len() < e_nodes {
        return Err(Error::MissingCoordinate(format!("node {}", c.len())));
    }
    Ok(())
}

/// Spearman correlation between hidden and real distances over all pairs,
/// or a sample of `pair_budget` pairs on large graphs. `c` is indexed by
/// the embedding's node ids.
pub fn spearman_hidden_vs_real(e: &Embedding, c: &CoordinateSet, pair_budget: usize, seed: u64) -> Result<f64> {
    check_cover(e.node_count(), c)?;
    let pairs = correlation_pairs(e.node_count(), pair_budget, seed);
    let real: Vec<f64> = pairs.iter().map(|&(u, v)| c.distance(u, v)).collect();
    let hidden = pairs
        .iter()
        .map(|&(u, v)| e.distance(u, v))
        .collect::<Result<Vec<_>>>()?;
    spearman(&hidden, &real)
}

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub pair_budget: usize,
    pub seed: u64,
    pub eig_tol: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            pair_budget: DEFAULT_PAIR_BUDGET,
            seed: 0,
            eig_tol: 1e-8,
        }
    }
}

/// Spearman correlation for every `(α, d)` cell.
#[derive(Clone, Debug, PartialEq)]
pub struct GridScan {
    pub alphas: Vec<f64>,
    pub dims: Vec<usize>,
    /// Row-major `alphas × dims`; NaN where the cell failed.
    pub values: Vec<f64>,
    /// `(alpha index, dim index, message)` for failed cells.
    pub errors: Vec<(usize, usize, String)>,
}

impl GridScan {
    pub fn get(&self, ai: usize, di: usize) -> f64 {
        self.values[ai * self.dims.len() + di]
    }

    /// Best cell `(α, d, value)`; ties go to the smaller α, then smaller d.
    pub fn argmax(&self) -> Option<(f64, usize, f64)> {
        let mut best: Option<(f64, usize, f64)> = None;
        for (ai, &a) in self.alphas.iter().enumerate() {
            for (di, &d) in self.dims.iter().enumerate() {
                let v = self.get(ai, di);
                if v.is_nan() {
                    continue;
                }
                if best.is_none_or(|b| v > b.2) {
                    best = Some((a, d, v));
                }
            }
        }
        best
    }
}

/// Scans the grid, embedding once per α at the largest requested dimension
/// and reading smaller dimensions off its leading coordinates. A failing
/// cell is recorded and the scan continues.
pub fn scan_grid(g: &Graph, c: &CoordinateSet, alphas: &[f64], dims: &[usize], cfg: &ScanConfig) -> Result<GridScan> {
    if alphas.is_empty() || dims.is_empty() {
        return Err(Error::EmptySet("parameter grid"));
    }
    check_cover(g.node_count(), c)?;
    let n = g.node_count();
    let pairs = correlation_pairs(n, cfg.pair_budget, cfg.seed);
    let real_ranks = average_ranks(&pairs.iter().map(|&(u, v)| c.distance(u, v)).collect::<Vec<_>>());
    let top = dims.iter().copied().filter(|&d| d < n).max();

    let mut values = vec![f64::NAN; alphas.len() * dims.len()];
    let mut errors = Vec::new();
    for (ai, &alpha) in alphas.iter().enumerate() {
        let full = match top {
            Some(top) if top > 0 => {
                let mut ecfg = EmbeddingConfig::new(alpha, top);
                ecfg.eig_tol = cfg.eig_tol;
                embed(g, &ecfg)
            }
            _ => Err(Error::DimensionTooLarge { d: dims[0], n }),
        };
        for (di, &d) in dims.iter().enumerate() {
            let cell = full.as_ref().map_err(Clone::clone).and_then(|e| {
                if d >= n {
                    return Err(Error::DimensionTooLarge { d, n });
                }
                let e = e.truncated(d)?;
                let hidden: Vec<f64> = pairs
                    .iter()
                    .map(|&(u, v)| e.distance(u, v))
                    .collect::<Result<_>>()?;
                pearson(&average_ranks(&hidden), &real_ranks)
            });
            match cell {
                Ok(v) => values[ai * dims.len() + di] = v,
                Err(err) => errors.push((ai, di, err.to_string())),
            }
        }
    }
    Ok(GridScan {
        alphas: alphas.to_vec(),
        dims: dims.to_vec(),
        values,
        errors,
    })
}
