//! Error type shared by every module of the toolkit.

use thiserror::Error;

/// Unified error for grid construction, field algebra, file I/O, and solver
/// guards. Message text is stable and is relied upon by the CLI's reports.
#[derive(Debug, Error)]
pub enum Error {
    /// Grid parameters outside the supported envelope.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Two fields that must share a grid (or a rank) do not.
    #[error("field mismatch: {0}")]
    Mismatch(String),

    /// A parameter fell outside the admissible range of an estimate or
    /// transform; the message names the violated bound.
    #[error("inadmissible parameter: {0}")]
    Inadmissible(String),

    /// Physical coefficients that break parabolicity of the momentum
    /// equation (shear viscosity or total viscosity nonpositive).
    #[error("non-elliptic Lam\u{e9} coefficients: {0}")]
    NonElliptic(String),

    /// Reference density or squared sound speed nonpositive.
    #[error("invalid equation of state: {0}")]
    InvalidState(String),

    /// The density left the admissible region (time stepping or a pointwise
    /// composition); `context` says where.
    #[error("vacuum: min(1+a) = {min_density:.3e} fell below the floor {floor:.1e} ({context})")]
    Vacuum {
        min_density: f64,
        floor: f64,
        context: String,
    },

    /// A non-finite value appeared in the state during time stepping.
    #[error("blow-up detected at t = {t:.6}")]
    BlowUp { t: f64 },

    /// The advective time-step restriction was violated.
    #[error("advective dt bound violated: dt = {dt:.3e} exceeds {bound:.3e} (0.5*dx/max|v|)")]
    DtBound { dt: f64, bound: f64 },

    /// Binary field-file violations: bad magic, truncated payload, or a
    /// header inconsistent with the expected grid.
    #[error("field file: {0}")]
    FieldFile(String),

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// Regression input unusable (too few points or degenerate abscissae).
    #[error("fit: {0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
