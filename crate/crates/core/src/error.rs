use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("complex coefficients: root set is not closed under conjugation")]
    ComplexCoefficients,
    #[error("non-invertible beyond unit root: ({c1}, {c2}) lies outside the closed region")]
    OutsideRegion { c1: f64, c2: f64 },
    #[error("sample too small: need n >= {min}, got {n}")]
    TooSmall { n: usize, min: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("degenerate initial-value design")]
    DegenerateDesign,
    #[error("missing simulation truth: {0}")]
    MissingTruth(String),
    #[error("test undefined: unconstrained estimate lies in the complex-root region")]
    TestUndefined,
    #[error("insufficient replicates: need at least {min}, got {reps}")]
    InsufficientReps { reps: usize, min: usize },
    #[error("level {0} not present in critical value table")]
    LevelNotInTable(f64),
    #[error("io: {0}")]
    Io(String),
    #[error("parse: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
