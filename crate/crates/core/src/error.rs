use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} is not a power of two of at least 2")]
    InvalidDimension(usize),

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("cannot normalize the zero vector")]
    ZeroVector,

    #[error("Bloch vector is not a unit vector (|v|^2 = {0})")]
    NotUnitVector(f64),

    #[error("operator is not unitary")]
    NotUnitary,

    #[error("pre- and post-selected states are orthogonal (|<psi_f|psi_i>| = {0:e})")]
    OrthogonalPrePost(f64),

    #[error("post-selection probability vanishes")]
    ZeroPostselection,

    #[error("meter violates the eraser condition r.q = 0 (r.q = {0:e})")]
    EraserViolated(f64),

    #[error("negative probability {0:e} exceeds the roundoff allowance")]
    NegativeProbability(f64),

    #[error("oracle register needs at least {min} input bits, got {got}")]
    TooFewInputBits { min: usize, got: usize },

    #[error("enumeration limited to at most {max} input bits, got {got}")]
    EnumerationGuard { max: usize, got: usize },

    #[error("invalid truth table: {0}")]
    InvalidTruthTable(String),

    #[error("function is neither constant nor balanced")]
    NeitherClass,

    #[error("operation requires the {expected} state pair, got {found}")]
    WrongVariant {
        expected: &'static str,
        found: &'static str,
    },

    #[error("no accepted search points")]
    EmptyAcceptedSet,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
