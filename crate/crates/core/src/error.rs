use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty graph")]
    EmptyGraph,

    #[error("edge ({user}, {item}) out of bounds for {n_users} users x {n_items} items")]
    EdgeOutOfBounds {
        user: usize,
        item: usize,
        n_users: usize,
        n_items: usize,
    },

    #[error("mask length {got} does not match edge count {expected}")]
    MaskLength { expected: usize, got: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("training diverged: {0}")]
    Diverged(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Coarse category used by the CLI for exit codes and machine-readable output.
    pub fn category(&self) -> &'static str {
        match self {
            Error::EmptyGraph
            | Error::EdgeOutOfBounds { .. }
            | Error::Parse { .. }
            | Error::Invalid(_) => "data",
            Error::MaskLength { .. } | Error::Dimension(_) => "shape",
            Error::NonFinite(_) | Error::Diverged(_) => "training",
            Error::Config(_) => "config",
            Error::Io { .. } | Error::Csv(_) | Error::Json(_) => "io",
        }
    }
}
