use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("node {node} queried radius {requested}, declared locality is {allowed}")]
    LocalityViolation {
        node: usize,
        requested: usize,
        allowed: usize,
    },

    #[error("node {node} wrote to node {target} at distance > {allowed}")]
    WriteViolation {
        node: usize,
        target: usize,
        allowed: usize,
    },

    #[error("node {node} read radius {requested} in a step gathering only {allowed}")]
    ReadViolation {
        node: usize,
        requested: usize,
        allowed: usize,
    },

    #[error("compilation unsound at node {node}: {msg}")]
    CompilationSoundness { node: usize, msg: String },

    #[error("separation violated: node {node} (cluster {cluster}) read node {other} of concurrent cluster {other_cluster}")]
    SeparationViolation {
        node: usize,
        cluster: usize,
        other: usize,
        other_cluster: usize,
    },

    #[error("capacity exceeded: {size} nodes > cap {cap}{}", radius.map(|r| format!(" at radius {r}")).unwrap_or_default())]
    Capacity {
        size: usize,
        cap: usize,
        radius: Option<usize>,
    },

    #[error("infeasible threshold: {0}")]
    InfeasibleThreshold(String),

    #[error("infeasible bound: {0}")]
    InfeasibleBound(String),

    #[error("oracle failure: {0}")]
    OracleFailure(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
