//! Linear algebra kernels: dense symmetric eigendecomposition, Lanczos for
//! the leading eigenpairs of sparse symmetric operators, and conjugate
//! gradients for SPD systems.

mod cg;
mod dense;
mod lanczos;

use alloc::vec::Vec;

pub use cg::conjugate_gradient;
pub use dense::SymmetricEigen;
pub use lanczos::{largest_eigenpairs, Eigenpairs, LanczosConfig};

use crate::graph::Graph;

/// A symmetric linear operator `y = A x`.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Symmetric scaling of an adjacency matrix, `diag(s) · A · diag(s)`.
/// With `s_i = k_i^{-α/2}` this is the symmetric surrogate of `K^{-α} A`.
pub struct ScaledAdjacency<'g> {
    graph: &'g Graph,
    scale: Vec<f64>,
}

impl<'g> ScaledAdjacency<'g> {
    pub fn new(graph: &'g Graph, scale: Vec<f64>) -> Self {
        assert_eq!(scale.len(), graph.node_count());
        ScaledAdjacency { graph, scale }
    }

    pub fn unscaled(graph: &'g Graph) -> Self {
        Self::new(graph, alloc::vec![1.0; graph.node_count()])
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim();
        let mut a = alloc::vec![0.0; n * n];
        for u in 0..n {
            for &v in self.graph.neighbors(u as u32) {
                a[u * n + v as usize] = self.scale[u] * self.scale[v as usize];
            }
        }
        a
    }
}

impl SymmetricOperator for ScaledAdjacency<'_> {
    fn dim(&self) -> usize {
        self.graph.node_count()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (u, yu) in y.iter_mut().enumerate() {
            let acc: f64 = self
                .graph
                .neighbors(u as u32)
                .iter()
                .map(|&v| self.scale[v as usize] * x[v as usize])
                .sum();
            *yu = self.scale[u] * acc;
        }
    }
}

/// `I - c·A` for an adjacency matrix `A`.
pub struct ShiftedAdjacency<'g> {
    pub graph: &'g Graph,
    pub c: f64,
}

impl SymmetricOperator for ShiftedAdjacency<'_> {
    fn dim(&self) -> usize {
        self.graph.node_count()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (u, yu) in y.iter_mut().enumerate() {
            let acc: f64 = self.graph.neighbors(u as u32).iter().map(|&v| x[v as usize]).sum();
            *yu = x[u] - self.c * acc;
        }
    }
}

/// Largest adjacency eigenvalue, dense below `dense_limit` nodes and
/// Lanczos otherwise.
pub fn spectral_radius(graph: &Graph, dense_limit: usize) -> crate::Result<f64> {
    let n = graph.node_count();
    if graph.edge_count() == 0 {
        return Ok(0.0);
    }
    let op = ScaledAdjacency::unscaled(graph);
    if n <= dense_limit {
        let eig = SymmetricEigen::new(n, op.to_dense());
        return Ok(eig.values[0]);
    }
    let cfg = LanczosConfig {
        tol: 1e-10,
        max_matvec: 20 * n,
        ..LanczosConfig::default()
    };
    Ok(largest_eigenpairs(&op, 1, &cfg)?.values[0])
}
