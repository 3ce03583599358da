use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no valid initial configuration after {attempts} resampling sweeps")]
    InitializationFailed { attempts: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("agents {i} and {j} occupy the same position")]
    CoincidentAgents { i: usize, j: usize },

    #[error("collision potential is singular at zero separation")]
    SingularPotential,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("unknown graph shift normalization `{0}`")]
    UnknownNormalization(String),

    #[error("expert cost is zero; relative cost undefined")]
    DegenerateExpertCost,

    #[error("window holds {got} steps but K = {needed}")]
    WindowTooShort { needed: usize, got: usize },

    #[error("missing checkpoint: {0}")]
    MissingCheckpoint(String),

    #[error("malformed {what}: {msg}")]
    Parse { what: &'static str, msg: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(what: &'static str, msg: impl Into<String>) -> Self {
        Error::Parse {
            what,
            msg: msg.into(),
        }
    }
}
