use std::path::PathBuf;

/// Broad failure classes, each mapped to a distinct process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Io,
    Parse,
    Validation,
    Degenerate,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Io => 1,
            ErrorKind::Parse => 3,
            ErrorKind::Validation => 4,
            ErrorKind::Degenerate => 5,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: self-loop on camera {camera}")]
    SelfLoop { line: usize, camera: String },

    #[error("invalid camera id {0:?}")]
    InvalidCameraId(String),

    #[error("unknown camera {0}")]
    UnknownCamera(String),

    #[error("part {part} has zero norm")]
    ZeroPart { part: usize },

    #[error("part {part} has norm {norm}, expected 1")]
    NotNormalized { part: usize, norm: f64 },

    #[error("embedding shape mismatch: {left_parts}x{left_dim} vs {right_parts}x{right_dim}")]
    ShapeMismatch {
        left_parts: usize,
        left_dim: usize,
        right_parts: usize,
        right_dim: usize,
    },

    #[error("record {index}: {message}")]
    Schema { index: usize, message: String },

    #[error("record {index}: duplicate obs_id {obs_id:?}")]
    DuplicateObservation { index: usize, obs_id: String },

    #[error("record {index}: embedding has {found} values, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("transition row for camera {0} is undefined (no outgoing counts and no smoothing)")]
    UndefinedRow(String),

    #[error("query {0} has an empty gallery after same-camera exclusion")]
    EmptyGallery(String),

    #[error("observation {0} has no person_id")]
    Unlabeled(String),

    #[error("no query has a correct cross-camera match in its gallery")]
    NoRetainedQueries,

    #[error("rank {k} exceeds gallery depth {depth}")]
    RankOutOfRange { k: usize, depth: usize },

    #[error("value {value} at ({row}, {col}) is outside [0, 1]")]
    ValueOutOfRange { row: usize, col: usize, value: f64 },

    #[error("config key {key:?}: {message}")]
    InvalidConfig { key: String, message: String },

    #[error("degenerate data: {0}")]
    Degenerate(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } => ErrorKind::Io,
            Error::Parse { .. }
            | Error::SelfLoop { .. }
            | Error::Schema { .. }
            | Error::DuplicateObservation { .. }
            | Error::DimensionMismatch { .. }
            | Error::InvalidConfig { .. } => ErrorKind::Parse,
            Error::InvalidCameraId(_)
            | Error::UnknownCamera(_)
            | Error::ZeroPart { .. }
            | Error::NotNormalized { .. }
            | Error::ShapeMismatch { .. }
            | Error::UndefinedRow(_)
            | Error::Unlabeled(_)
            | Error::RankOutOfRange { .. }
            | Error::ValueOutOfRange { .. } => ErrorKind::Validation,
            Error::EmptyGallery(_) | Error::NoRetainedQueries | Error::Degenerate(_) => {
                ErrorKind::Degenerate
            }
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
