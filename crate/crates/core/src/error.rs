use alloc::string::String;

use crate::graph::NodeId;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("no non-edges: graph is complete")]
    NoNonEdges,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension {d} too large for {n} nodes (need d <= n - 1)")]
    DimensionTooLarge { d: usize, n: usize },
    #[error("node {0} has degree zero")]
    IsolatedNode(NodeId),
    #[error("eigensolver did not converge after {iterations} iterations (best residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("Katz series diverges: attenuation {attenuation} >= 1/lambda_max = {limit}")]
    SeriesDiverges { attenuation: f64, limit: f64 },
    #[error("linear solve did not converge (residual {residual:e})")]
    SolveFailed { residual: f64 },
    #[error("score tables cover different pair sets")]
    PairSetMismatch,
    #[error("pair ({0}, {1}) missing from score table")]
    MissingScore(NodeId, NodeId),
    #[error("empty {0} set")]
    EmptySet(&'static str),
    #[error("prediction list length {l} exceeds {candidates} candidates")]
    ListTooLong { l: usize, candidates: usize },
    #[error("missing coordinate for node {0}")]
    MissingCoordinate(String),
    #[error("{what} = {value} outside its domain")]
    OutOfDomain { what: &'static str, value: f64 },
    #[error("quadrature failed: {0}")]
    Quadrature(String),
}
