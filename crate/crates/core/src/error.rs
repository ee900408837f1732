use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),

    #[error("loop at vertex {0}")]
    LoopAtVertex(usize),

    #[error("vertex {vertex} out of range (quiver has {n} vertices)")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("quiver with potential is not reduced")]
    NotReduced,

    #[error("degenerate potential: 2-cycle between vertices {0} and {1} survives reduction")]
    DegeneratePotential(usize, usize),

    #[error("reduction did not stabilize within degree cap {0}")]
    CapExceeded(usize),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("not a gentle presentation: {0}")]
    NotGentle(String),

    #[error("infinite-dimensional algebra: {0}")]
    InfiniteDimensional(String),

    #[error("dimension not resolved at cap {0}")]
    DimensionNotResolved(usize),

    #[error("Coxeter polynomial undefined: singular Cartan matrix")]
    CoxeterUndefined,

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("mutation of node {node} at vertex {vertex} failed: {source}")]
    Enumeration {
        node: usize,
        vertex: usize,
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),
}
