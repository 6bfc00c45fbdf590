#![allow(dead_code)]

use hspace_core::rng::seeded;
use hspace_core::{Graph, Pair};
use rand::Rng;

/// Erdős–Rényi graph restricted to its giant component.
pub fn er_giant(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = seeded(seed);
    let mut edges: Vec<Pair> = Vec::new();
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap().giant_component().0
}

pub fn dense_adjacency(g: &Graph) -> nalgebra::DMatrix<f64> {
    let n = g.node_count();
    let mut a = nalgebra::DMatrix::zeros(n, n);
    for (u, v) in g.edges() {
        a[(u as usize, v as usize)] = 1.0;
        a[(v as usize, u as usize)] = 1.0;
    }
    a
}
