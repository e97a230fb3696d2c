//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by estimation, testing, graph, and harness operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("column `{0}` not found")]
    ColumnNotFound(String),

    #[error("duplicate name `{0}`")]
    DuplicateName(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value at row {row}, column `{column}`")]
    NonFinite { row: usize, column: String },

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("graph contains a directed cycle")]
    CyclicGraph,

    #[error("self-loop on vertex `{0}`")]
    SelfLoop(String),

    #[error("edge {0}--{1} is both directed and undirected")]
    InconsistentEdge(String, String),

    #[error("vertex sets differ: {0}")]
    VertexSetMismatch(String),

    #[error("covariance matrix is singular or near-singular")]
    SingularCovariance,

    #[error("graph file parse error: {0}")]
    GraphParse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("CI test failed for ({x}, {y} | {z}): {source}")]
    CiTest {
        x: String,
        y: String,
        z: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
