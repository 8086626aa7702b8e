use thiserror::Error;

/// Errors raised by the numerical core.
///
/// Numeric payloads are stored as `f64` regardless of the working scalar so
/// the error type stays non-generic.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid point count {0} is odd; an even count is required")]
    OddPointCount(usize),
    #[error("grid point count {0} is below the minimum of 8")]
    TooFewPoints(usize),
    #[error("grid length must be positive and finite, got {0}")]
    InvalidLength(f64),
    #[error("sample count {found} does not match grid size {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("kappa = {0} is below the standing assumption kappa >= 1")]
    KappaBelowOne(f64),
    #[error("norm of the field is zero; ratio undefined")]
    DivisionByZeroNorm,
    #[error("Lax operator is numerically singular (sigma_min/sigma_max = {ratio:.3e}); kappa too small for this potential")]
    NearSingularOperator { ratio: f64 },
    #[error("diagonal Green's function is not positive (min g = {min:.3e})")]
    NonPositiveGreens { min: f64 },
    #[error("resolvent series does not contract: kappa^(-1/2) ||u||_(H^-1_kappa) = {ratio:.4} > 1/2")]
    SeriesNotContracting { ratio: f64 },
    #[error("resolvent series did not converge in {terms} terms (last term sup = {last:.3e})")]
    NoConvergence { terms: usize, last: f64 },
    #[error("density rho is negative (min rho = {min:.3e}); grid under-resolved or kappa out of range")]
    NegativeDensity { min: f64 },
    #[error("kernel is unresolved: kappa * dx = {kappa_dx:.3} exceeds 0.5")]
    UnresolvedKernel { kappa_dx: f64 },
    #[error("solution diverged at t = {t}")]
    Diverged { t: f64 },
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("trajectory needs at least {needed} snapshots, found {found}")]
    TooFewSnapshots { needed: usize, found: usize },
    #[error("snapshot times are not uniformly spaced")]
    NonuniformSaveInterval,
    #[error("times must be strictly increasing")]
    NonMonotoneTimes,
    #[error("kappa = {kappa} is not admissible at t = {t}: need kappa >= {required:.4}")]
    KappaTooSmall { kappa: f64, t: f64, required: f64 },
    #[error("channel bottom too shallow: min(1 - c) = {min_depth:.4} is below the margin {margin}")]
    BottomTooShallow { min_depth: f64, margin: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
