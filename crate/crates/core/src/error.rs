use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimensions n={n}, m={m}: need 2 <= n <= 16 and 1 <= m <= 16")]
    InvalidDims { n: usize, m: usize },

    #[error("component count {got} does not match expected {expected}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("matrix A^{slot} is not symmetric at ({i}, {j})")]
    NotSymmetric { slot: usize, i: usize, j: usize },

    #[error("mean curvature norm {norm:e} is at or below the degeneracy threshold {tol:e}")]
    DegenerateMeanCurvature { norm: f64, tol: f64 },

    #[error("invalid gradient sample: {0}")]
    InvalidSample(String),

    #[error("dimension n={0} is not supported (need n >= 5)")]
    UnsupportedDimension(usize),

    #[error("kappa = 3/(n+2) - c = {0} is not positive")]
    NonpositiveKappa(f64),

    #[error("invalid constants: {0}")]
    InvalidConstants(String),

    #[error("pinching quantity f = {0} is not positive")]
    NotPinched(f64),

    #[error("requested time {t} is at or past the blow-up time {blowup}")]
    PastBlowup { t: f64, blowup: f64 },

    #[error("denominator field z is not positive at grid index {0}")]
    NonpositiveZ(usize),

    #[error("base row {row} has f = {f}, which is not positive")]
    NotPinchedAtBase { row: usize, f: f64 },

    #[error("row index {row} out of range for a series of length {len}")]
    RowOutOfRange { row: usize, len: usize },

    #[error("i/o: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
