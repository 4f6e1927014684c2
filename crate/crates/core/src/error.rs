use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {found} is below the minimum {min}")]
    DimensionTooSmall { found: usize, min: usize },
    #[error("invalid primitive: {0}")]
    InvalidPrimitive(String),
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("radius must be non-negative")]
    NegativeRadius,
    #[error("growth factor {growth} does not exceed the required bound {bound}")]
    InvalidGrowth { growth: String, bound: String },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("construction certificate failed: {0}")]
    CertificateFailed(String),
    #[error("invalid radius schedule: {0}")]
    InvalidSchedule(String),
    #[error("translating an origin-centred annulus by a non-zero vector is not representable")]
    TranslationUnsupported,
    #[error("schedule too short: {0}")]
    ScheduleTooShort(String),
    #[error("pin {0} does not lie in any admissible box")]
    PinOutsideFamily(String),
    #[error("families overlap: {0}")]
    Overlap(String),
    #[error("comparison could not be decided: {0}")]
    Undecided(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported schema version {0}")]
    SchemaVersion(u32),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
