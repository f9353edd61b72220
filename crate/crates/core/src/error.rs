use thiserror::Error;

/// Errors raised by the analysis kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid mesh: {reason}")]
    InvalidMesh {
        reason: String,
        /// Offending edges as vertex-index pairs, when known.
        edges: Vec<[usize; 2]>,
    },

    #[error("invalid mesh in entity {index}: {source}")]
    InvalidEntity {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("degenerate input: points span affine dimension {dimension}")]
    Degenerate { dimension: usize },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("reference system mismatch: layer {layer:?} has {found:?}, expected {expected:?}")]
    ReferenceSystem {
        layer: String,
        expected: String,
        found: String,
    },

    #[error("classification rule undefined for attribute combination {0}")]
    Classification(String),

    #[error("decomposition needs {achieved} pieces, budget is {budget}")]
    BudgetExceeded { achieved: usize, budget: usize },

    #[error("topology error: {reason}")]
    Topology {
        reason: String,
        /// Arc ids (or node pairs) that triggered the failure.
        arcs: Vec<[usize; 2]>,
    },

    #[error("ambiguous welding: {0}")]
    Ambiguous(String),

    #[error("unknown {kind} id {id}")]
    Lookup { kind: &'static str, id: usize },

    #[error("stale tree: built over {built} entities with digest {built_digest:x}, scene has {current}")]
    StaleTree {
        built: usize,
        built_digest: u64,
        current: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn mesh(reason: impl Into<String>) -> Self {
        Error::InvalidMesh {
            reason: reason.into(),
            edges: Vec::new(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
