use thiserror::Error;

/// Errors raised by the numerical toolkit.
///
/// Diagnostic payloads are stored as `f64` regardless of the scalar type the
/// computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("segment index {index} out of range 2..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("unknown tread friction model `{0}` (expected `band-only` or `calibrated`)")]
    UnknownModel(String),

    #[error("degenerate panel {element}: length {length:e}")]
    DegeneratePanel { element: usize, length: f64 },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("boundary condition has {got} entries, mesh expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("kernel evaluated on its own source ring at (z={z:e}, s={s:e})")]
    SingularConfiguration { z: f64, s: f64 },

    #[error(
        "linear solve failed ({unknowns} unknowns, {elements} elements, \
         panel length range {min_panel:e}..{max_panel:e})"
    )]
    SingularSystem {
        unknowns: usize,
        elements: usize,
        min_panel: f64,
        max_panel: f64,
    },

    #[error("free body {0} has no wetted area or is not a closed curve")]
    SingularConstraint(usize),

    #[error("refinement did not reach tolerance {target:e}; dissipated power sequence {sequence:?}")]
    NonConvergence { target: f64, sequence: Vec<f64> },

    #[error("surface gap {gap:e} m below the resolvable minimum {min:e} m")]
    GapTooSmall { gap: f64, min: f64 },

    #[error("curve: {0}")]
    InvalidCurve(String),

    #[error("nonpositive cost k={value:e} at configuration {at:e}")]
    NonPositiveCost { at: f64, value: f64 },

    #[error("locomotion coefficient h_loc={value:e} not positive at delta={delta}")]
    NonPositiveMobility { delta: f64, value: f64 },

    #[error("delta={delta} outside curve support [{min}, {max}]")]
    OutsideSupport { delta: f64, min: f64, max: f64 },

    #[error("ODE integration failed: {0}")]
    Integration(String),

    #[error("I/O: {0}")]
    Io(String),

    #[error("CSV: {0}")]
    Csv(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
