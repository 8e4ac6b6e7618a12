use std::path::PathBuf;

use crate::model::PointField;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-finite value in point {point_index}, field {field}")]
    NonFiniteValue { point_index: usize, field: PointField },

    #[error("empty input")]
    EmptyInput,

    #[error("frames are not consecutive: expected frame id {expected}, found {found}")]
    NonConsecutiveFrames { expected: u64, found: u64 },

    #[error("frames belong to different sequences ({first} and {other})")]
    SequenceMismatch { first: u64, other: u64 },

    #[error("{0} feature extraction is disabled in the configuration")]
    FeatureDisabled(&'static str),

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("prediction head produces {actual} values, the head expects {expected}")]
    HeadShapeMismatch { expected: usize, actual: usize },

    #[error("sequential prediction requires recurrent parameters")]
    MissingRecurrentParams,

    #[error("weights manifest mismatch: {0}")]
    ManifestMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("degenerate keypoint configuration: {0}")]
    DegenerateConfiguration(&'static str),

    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported format version {found} (expected {expected})")]
    FormatVersion { expected: u32, found: u32 },

    #[error("no ground truth for sequence {sequence_id}, frame {frame_id}")]
    IdMismatch { sequence_id: u64, frame_id: u64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Process exit code for this error class, used by the CLI.
    ///
    /// 0 is success and 2 is reserved for usage errors reported by the
    /// argument parser.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 3,
            Error::Io { .. } => 4,
            Error::InvalidConfig(_) => 5,
            Error::ManifestMismatch(_) | Error::FormatVersion { .. } => 6,
            Error::IdMismatch { .. } => 7,
            Error::NonFiniteValue { .. }
            | Error::NonConsecutiveFrames { .. }
            | Error::SequenceMismatch { .. } => 8,
            Error::ShapeMismatch(_)
            | Error::DimensionMismatch { .. }
            | Error::HeadShapeMismatch { .. }
            | Error::LabelOutOfRange { .. }
            | Error::DegenerateConfiguration(_) => 9,
            Error::EmptyInput
            | Error::EmptyGraph
            | Error::FeatureDisabled(_)
            | Error::MissingRecurrentParams => 10,
        }
    }
}
