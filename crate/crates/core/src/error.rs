use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected {expected} samples, got {actual}")]
    SampleCount { expected: usize, actual: usize },

    #[error("sample {index} is not finite")]
    NonFinite { index: usize },

    #[error("CMF entry at band {band}, column {column} is negative ({value})")]
    NegativeCmf { band: usize, column: usize, value: f64 },

    #[error("illuminant sample {index} is negative ({value})")]
    NegativeIlluminant { index: usize, value: f64 },

    #[error("illuminant has non-positive luminance (ybar . W = {0})")]
    ZeroLuminance(f64),

    #[error("X + Y + Z is zero; chromaticity is undefined")]
    DegenerateSum,

    #[error("reference white must have strictly positive components, got ({0}, {1}, {2})")]
    InvalidWhite(f64, f64, f64),

    #[error("difference matrix needs at least 2 bands, got {0}")]
    InvalidSize(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("Newton iteration did not converge after {iterations} iterations (max |F| = {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("Newton system is singular after {iterations} iterations")]
    SingularSystem { iterations: usize },

    #[error("degree of adaptation must lie in [0, 1], got {0}")]
    InvalidAdaptation(f64),

    #[error("white point must have Y > 0, got Y = {0}")]
    InvalidWhitePoint(f64),

    #[error("source color must have Y > 0, got Y = {0}")]
    NonPositiveLuminance(f64),

    #[error("destination luminance {0:e} is too small to rescale")]
    DegenerateLuminance(f64),

    #[error("cone response of the source white is non-positive in channel {channel} ({value})")]
    DegenerateCone { channel: usize, value: f64 },

    #[error("matrix `{0}` is not invertible")]
    SingularMatrix(String),

    #[error("target luminance {0} is not reachable by a reflectance in [0, 1]")]
    InfeasibleY(f64),

    #[error("unknown method `{0}` (expected spectral, spectral-sym, hpe, cat02 or cat16)")]
    UnknownMethod(String),

    #[error("wavelength grid mismatch at row {row}: expected {expected} nm, found {found} nm")]
    Grid { row: usize, expected: u32, found: f64 },

    #[error("schema error in {path}: {message}")]
    Schema { path: PathBuf, message: String },

    #[error("scale error in {path}: {message}")]
    Scale { path: PathBuf, message: String },

    #[error("dataset {0} has no pairs")]
    EmptyDataset(PathBuf),

    #[error("I/O error on {path}: {source}")]
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
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn schema(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Schema { path: path.into(), message: message.into() }
    }
}
