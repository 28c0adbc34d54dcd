use alloc::string::String;

use crate::dispersion::OpticalAxis;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(
        "wavelength {lambda_nm} nm is outside the valid range [{min_nm}, {max_nm}] nm of the {axis} axis"
    )]
    OutOfRange {
        axis: OpticalAxis,
        lambda_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("spectra are sampled on incompatible grids")]
    IncompatibleGrids,

    #[error("no half-maximum crossing inside the sampled window; widen the grid")]
    WindowTooNarrow,

    #[error("grid resolution too coarse: {0}")]
    Resolution(String),

    #[error("no phase-matching solution found: {0}")]
    NotFound(String),

    #[error("undefined rate: {0}")]
    UndefinedRate(String),

    #[error("inconsistent count record: {0}")]
    InconsistentRecord(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
