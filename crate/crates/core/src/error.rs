use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{what} did not converge (residual {residual:e})")]
    NotConverged { what: String, residual: f64 },

    #[error("Fock cutoff n_max = {n_max} too small: top-level weight {weight:e}")]
    FockCutoff { n_max: usize, weight: f64 },

    #[error("grid too short: boundary amplitude {ratio:e} of peak exceeds {limit:e}")]
    GridTooShort { ratio: f64, limit: f64 },

    #[error("{what} = {value} outside tabulated range [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("basis dimension {dim} exceeds limit {limit}")]
    DimensionOverflow { dim: u128, limit: u128 },

    #[error("site window mismatch: {0}")]
    SiteWindow(String),

    #[error("correlation table is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("no dip found in angular scan")]
    NoDip,

    #[error("operation requires standing-wave modes")]
    NotStanding,

    #[error("config error{}: {message}", at_line(*.line))]
    Config { line: Option<usize>, message: String },

    #[error("missing upstream artifact {0}")]
    MissingArtifact(PathBuf),

    #[error("malformed artifact {path}: {message}")]
    MalformedArtifact { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn at_line(line: Option<usize>) -> String {
    line.map(|l| format!(" at line {l}")).unwrap_or_default()
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by user input rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::Config { .. }
                | Error::DimensionOverflow { .. }
                | Error::MissingArtifact(_)
                | Error::MalformedArtifact { .. }
        )
    }
}
