use thiserror::Error;

use crate::graph::Vertex;

/// Everything that can go wrong while building instances or solving them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("more than one link between vertices {0} and {1}")]
    DuplicateLink(Vertex, Vertex),
    #[error("total weight bound overflows a 64-bit integer")]
    WeightOverflow,
    #[error("multigraph uses pair ({0}, {1}) which is not a link of the graph")]
    UnknownLink(Vertex, Vertex),
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("graph has parallel or conflicting links; simplify it first")]
    NotSimple,
    #[error("demand vector has {got} entries for {n} vertices")]
    DemandLength { got: usize, n: usize },
    #[error("demands sum to {0}, expected 0")]
    DemandSum(i64),
    #[error("directed multigraph is not Eulerian")]
    NotEulerian,
    #[error("degree minus demand is odd at vertex {0}")]
    Parity(Vertex),
    #[error("perfect matching requested on an odd number of vertices ({0})")]
    OddOrder(usize),
    #[error("join target set has odd size ({0})")]
    OddJoinSet(usize),
    #[error("instance exceeds the exhaustive search guard: {0}")]
    TooLarge(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no feasible solution exists")]
    Infeasible,
    #[error("expected {expected}, got {got}")]
    WrongKind { expected: &'static str, got: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;
