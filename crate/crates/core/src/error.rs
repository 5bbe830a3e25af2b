use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("operator is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("empty subsystem selection")]
    EmptySelection,

    #[error("projection onto outcome {0} has zero probability")]
    ZeroProbability(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("singular transformation: |{name}| = {value} must be < 1")]
    Singular { name: &'static str, value: f64 },

    #[error("state has no pointer-basis correlation structure (cross term {0:e})")]
    NoPointerCorrelation(f64),

    #[error("unknown frame `{0}`")]
    UnknownFrame(String),

    #[error("duplicate frame `{0}`")]
    DuplicateFrame(String),

    #[error("clocks of frames `{0}` and `{1}` cannot be compared directly")]
    CrossFrameComparison(String, String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("history is static: time derivative vanishes")]
    StaticHistory,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
