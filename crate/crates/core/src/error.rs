use thiserror::Error;

/// Errors raised anywhere in the channel model.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("radius {radius} m is at or inside the Schwarzschild radius {schwarzschild_radius} m")]
    InsideHorizon { radius: f64, schwarzschild_radius: f64 },

    #[error("circular orbit at {radius} m is at or inside the photon sphere (1.5 r_s = {limit} m)")]
    InsidePhotonSphere { radius: f64, limit: f64 },

    #[error("unsupported observer configuration: {0}")]
    UnsupportedMotion(String),

    #[error("{operation} did not converge after {iterations} iterations")]
    NonConvergence { operation: &'static str, iterations: usize },

    #[error("quadrature did not reach tolerance {tolerance:e} (estimate {estimate:e})")]
    Quadrature { tolerance: f64, estimate: f64 },

    #[error("packet is not normalized: norm² = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("operation requires a Gaussian packet")]
    NotGaussian,

    #[error("mode occupancy would exceed {max} photons")]
    OccupancyOverflow { max: u8 },

    #[error("matrix is not a valid density matrix: {0}")]
    InvalidDensity(String),

    #[error("configuration error at `{path}`: {reason}")]
    Config { path: String, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn config(path: &str, reason: impl Into<String>) -> Self {
        Error::Config {
            path: path.to_string(),
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::Quadrature { .. } | Error::OccupancyOverflow { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
