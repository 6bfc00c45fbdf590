//! Simple undirected graphs in compressed adjacency form.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::{Error, Result};

pub type NodeId = u32;

/// Unordered node pair, always stored as `(min, max)`.
pub type Pair = (NodeId, NodeId);

#[inline]
pub fn pair(u: NodeId, v: NodeId) -> Pair {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Immutable simple undirected graph with contiguous ids `0..n`.
///
/// Neighbour lists are sorted, so membership tests and neighbourhood
/// intersections are logarithmic / linear merges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl Graph {
    /// Builds a graph on `n` nodes. Self-loops are dropped, direction is
    /// collapsed and duplicate edges are merged.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut list: Vec<Pair> = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w as usize >= n {
                    return Err(Error::NodeOutOfRange { node: w, n });
                }
            }
            if u != v {
                list.push(pair(u, v));
            }
        }
        list.sort_unstable();
        list.dedup();

        let mut degree = vec![0usize; n];
        for &(u, v) in &list {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0; 2 * list.len()];
        for &(u, v) in &list {
            targets[fill[u as usize]] = v;
            fill[u as usize] += 1;
            targets[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        for u in 0..n {
            targets[offsets[u]..offsets[u + 1]].sort_unstable();
        }
        Ok(Graph { offsets, targets })
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        let u = u as usize;
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    #[inline]
    pub fn degree(&self, u: NodeId) -> usize {
        let u = u as usize;
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn check_node(&self, u: NodeId) -> Result<()> {
        if (u as usize) < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node: u,
                n: self.node_count(),
            })
        }
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Pair> + '_ {
        (0..self.node_count() as NodeId).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| v > u)
                .map(move |&v| (u, v))
        })
    }

    pub fn is_complete(&self) -> bool {
        let n = self.node_count();
        self.edge_count() == n * n.saturating_sub(1) / 2
    }

    /// Number of unordered non-adjacent pairs.
    pub fn non_edge_count(&self) -> usize {
        let n = self.node_count();
        n * n.saturating_sub(1) / 2 - self.edge_count()
    }

    /// All non-adjacent pairs in lexicographic order.
    pub fn non_edges(&self) -> impl Iterator<Item = Pair> + '_ {
        let n = self.node_count() as NodeId;
        (0..n).flat_map(move |u| {
            let nb = self.neighbors(u);
            let start = nb.partition_point(|&v| v <= u);
            let mut rest = nb[start..].iter().copied().peekable();
            (u + 1..n).filter(move |&v| {
                while let Some(&w) = rest.peek() {
                    if w < v {
                        rest.next();
                    } else {
                        break;
                    }
                }
                rest.peek() != Some(&v)
            })
            .map(move |v| (u, v))
        })
    }

    /// Connected-component label per node; labels are numbered in order of
    /// their smallest member.
    pub fn components(&self) -> Vec<u32> {
        let n = self.node_count();
        let mut label = vec![u32::MAX; n];
        let mut next = 0u32;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if label[s] != u32::MAX {
                continue;
            }
            label[s] = next;
            queue.push_back(s as NodeId);
            while let Some(u) = queue.pop_front() {
                for &v in self.neighbors(u) {
                    if label[v as usize] == u32::MAX {
                        label[v as usize] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// Subgraph induced on `keep` (ascending ids). Node `keep[i]` becomes `i`.
    pub fn induced_subgraph(&self, keep: &[NodeId]) -> Graph {
        debug_assert!(keep.windows(2).all(|w| w[0] < w[1]));
        let mut remap = vec![u32::MAX; self.node_count()];
        for (i, &u) in keep.iter().enumerate() {
            remap[u as usize] = i as NodeId;
        }
        let edges = self.edges().filter_map(|(u, v)| {
            let (a, b) = (remap[u as usize], remap[v as usize]);
            (a != u32::MAX && b != u32::MAX).then_some((a, b))
        });
        Graph::from_edges(keep.len(), edges).expect("remapped ids are in range")
    }

    /// Largest connected component, recompacted. Returns the subgraph and
    /// the original id of every retained node. Equal-size components are
    /// resolved toward the one containing the smallest id.
    pub fn giant_component(&self) -> (Graph, Vec<NodeId>) {
        let label = self.components();
        let count = label.iter().max().map_or(0, |&m| m as usize + 1);
        let mut sizes = vec![0usize; count];
        for &c in &label {
            sizes[c as usize] += 1;
        }
        // labels follow smallest-member order, so the first maximum wins ties
        let mut best = 0;
        for (c, &s) in sizes.iter().enumerate() {
            if s > sizes[best] {
                best = c;
            }
        }
        let keep: Vec<NodeId> = (0..self.node_count() as NodeId)
            .filter(|&u| label[u as usize] == best as u32)
            .collect();
        if keep.len() == self.node_count() {
            return (self.clone(), keep);
        }
        (self.induced_subgraph(&keep), keep)
    }

    /// Drops zero-degree nodes; returns the compacted graph and kept ids.
    pub fn without_isolated(&self) -> (Graph, Vec<NodeId>) {
        let keep: Vec<NodeId> = (0..self.node_count() as NodeId)
            .filter(|&u| self.degree(u) > 0)
            .collect();
        if keep.len() == self.node_count() {
            return (self.clone(), keep);
        }
        (self.induced_subgraph(&keep), keep)
    }
}

/// Uniform random non-adjacent pairs by rejection sampling.
pub fn sample_non_edges<R: Rng + ?Sized>(
    g: &Graph,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Pair>> {
    let n = g.node_count();
    if n < 2 || g.is_complete() {
        return Err(Error::NoNonEdges);
    }
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u = rng.random_range(0..n as NodeId);
        let v = rng.random_range(0..n as NodeId);
        if u != v && !g.has_edge(u, v) {
            out.push(pair(u, v));
        }
    }
    Ok(out)
}

/// Bijection between dataset labels and compact ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NodeIdMap {
    labels: Vec<String>,
    index: BTreeMap<String, NodeId>,
}

impl NodeIdMap {
    /// Compacts labels to `0..n`. If every label is an integer the ids follow
    /// numeric order, otherwise lexicographic order.
    pub fn from_labels<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        labels.sort_unstable();
        labels.dedup();
        let numeric: Option<Vec<i128>> = labels.iter().map(|s| s.parse::<i128>().ok()).collect();
        if let Some(values) = numeric {
            let mut idx: Vec<usize> = (0..labels.len()).collect();
            idx.sort_by_key(|&i| values[i]);
            labels = idx.into_iter().map(|i| core::mem::take(&mut labels[i])).collect();
        }
        Self::from_ordered(labels)
    }

    /// Uses the given order as the id order. Labels must be distinct.
    pub fn from_ordered(labels: Vec<String>) -> Self {
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as NodeId))
            .collect();
        NodeIdMap { labels, index }
    }

    /// Identity map labelling node `i` as `"i"`.
    pub fn identity(n: usize) -> Self {
        Self::from_ordered((0..n).map(|i| alloc::format!("{i}")).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id as usize]
    }

    pub fn id(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Keeps the nodes in `kept` (old ids, ascending) and renumbers them.
    pub fn restrict(&self, kept: &[NodeId]) -> NodeIdMap {
        Self::from_ordered(kept.iter().map(|&u| self.labels[u as usize].clone()).collect())
    }
}

/// A graph together with its label map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: NodeIdMap,
}

impl LabeledGraph {
    pub fn giant_component(&self) -> LabeledGraph {
        let (graph, kept) = self.graph.giant_component();
        LabeledGraph {
            graph,
            labels: self.labels.restrict(&kept),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (0..n as u32 - 1).map(|i| (i, i + 1))).unwrap()
    }

    #[test]
    fn cleaning_drops_loops_and_duplicates() {
        let g = Graph::from_edges(2, [(0, 1), (1, 0), (0, 0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(g.degrees(), vec![1, 1]);
    }

    #[test]
    fn out_of_range_edge_rejected() {
        assert!(matches!(
            Graph::from_edges(2, [(0, 2)]),
            Err(Error::NodeOutOfRange { node: 2, n: 2 })
        ));
    }

    #[test]
    fn giant_component_picks_largest() {
        // 5-cycle on 0..5 and triangle on 5..8
        let mut e: Vec<Pair> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        e.extend([(5, 6), (6, 7), (7, 5)]);
        let g = Graph::from_edges(8, e).unwrap();
        let (h, kept) = g.giant_component();
        assert_eq!(h.node_count(), 5);
        assert_eq!(h.edge_count(), 5);
        assert_eq!(kept, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn giant_component_tie_prefers_smallest_id() {
        let g = Graph::from_edges(4, [(2, 3), (0, 1)]).unwrap();
        let (_, kept) = g.giant_component();
        assert_eq!(kept, vec![0, 1]);
    }

    #[test]
    fn giant_component_of_connected_graph_is_identity() {
        let g = path(6);
        let (h, kept) = g.giant_component();
        assert_eq!(h, g);
        assert_eq!(kept.len(), 6);
    }

    #[test]
    fn non_edges_enumeration() {
        let g = path(4);
        let ne: Vec<_> = g.non_edges().collect();
        assert_eq!(ne, vec![(0, 2), (0, 3), (1, 3)]);
        assert_eq!(g.non_edge_count(), 3);
    }

    #[test]
    fn sample_non_edges_path3() {
        let g = path(3);
        let mut rng = seeded(1);
        let s = sample_non_edges(&g, 5, &mut rng).unwrap();
        assert!(s.iter().all(|&p| p == (0, 2)));
    }

    #[test]
    fn sample_non_edges_complete_graph_errors() {
        let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let mut rng = seeded(1);
        assert_eq!(sample_non_edges(&k4, 1, &mut rng), Err(Error::NoNonEdges));
    }

    #[test]
    fn sample_non_edges_deterministic() {
        let mut rng = seeded(9);
        let mut edges = Vec::new();
        for u in 0..100u32 {
            for v in u + 1..100 {
                if rng.random::<f64>() < 0.05 {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::from_edges(100, edges).unwrap();
        let a = sample_non_edges(&g, 10_000, &mut seeded(3)).unwrap();
        let b = sample_non_edges(&g, 10_000, &mut seeded(3)).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|&(u, v)| u < v && !g.has_edge(u, v)));
    }

    #[test]
    fn numeric_labels_sort_numerically() {
        let m = NodeIdMap::from_labels(["10", "2", "1"]);
        assert_eq!(m.labels(), &["1", "2", "10"]);
        let s = NodeIdMap::from_labels(["b", "a", "10"]);
        assert_eq!(s.labels(), &["10", "a", "b"]);
        assert_eq!(s.id("a"), Some(1));
    }
}
