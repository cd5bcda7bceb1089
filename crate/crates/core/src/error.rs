use crate::graph::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("graph contains no temporal edges")]
    EmptyGraph,

    #[error("vertex {0} is not in the given vertex set")]
    QueryNotInSet(VertexId),

    #[error("query vertex {0} has no incident temporal edges")]
    NoQueryActivity(VertexId),

    #[error("power iteration stopped after {iterations} iterations with L1 change {change:e}")]
    NotConverged { iterations: usize, change: f64 },

    #[error("no connected component contains all query vertices")]
    QueriesDisconnected,

    #[error("query vertices are not contained in any connected {k}-core")]
    NoCore { k: usize },

    #[error("exhaustive search supports at most {max} vertices, graph has {n}")]
    TooLarge { n: usize, max: usize },

    #[error("unknown vertex label {0:?}")]
    UnknownLabel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable name, used by the CLI in error payloads.
    pub fn name(&self) -> &'static str {
        match self {
            Error::MalformedLine { .. } => "MalformedLine",
            Error::EmptyGraph => "EmptyGraph",
            Error::QueryNotInSet(_) => "QueryNotInSet",
            Error::NoQueryActivity(_) => "NoQueryActivity",
            Error::NotConverged { .. } => "NotConverged",
            Error::QueriesDisconnected => "QueriesDisconnected",
            Error::NoCore { .. } => "NoCore",
            Error::TooLarge { .. } => "TooLarge",
            Error::UnknownLabel(_) => "UnknownLabel",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::Io(_) => "Io",
        }
    }
}
