use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid too small: need at least {min} nodes per direction, got {got}")]
    GridTooSmall { min: usize, got: usize },

    #[error("invalid annulus radii: require 0 < r_in < r_out, got r_in={r_in}, r_out={r_out}")]
    InvalidRadii { r_in: f64, r_out: f64 },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("field length {got} does not match grid node count {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("unknown catalog entry '{0}'")]
    UnknownMetric(String),

    #[error("cone parameter alpha must lie in (0, 1), got {0}")]
    AlphaOutOfRange(f64),

    #[error("beta = {beta} violates the constraint beta < n+1 = {n_plus_1}")]
    BetaConstraint { beta: f64, n_plus_1: i32 },

    #[error("rho must be nonnegative (it is a squared norm); found {value} at node {index}")]
    NegativeRho { index: usize, value: f64 },

    #[error("metric '{0}' is a model-only asymptotic profile; PDE residual checks do not apply")]
    ModelOnly(String),

    #[error("cubic form vanishes identically; no singularity order to declare")]
    NoOrder,

    #[error(
        "declared order n = {n} looks wrong: min/max of 16|Xi0|^2 |z|^(-2n) is {ratio:.3e} (threshold {threshold:.1e})"
    )]
    MisdeclaredOrder { n: i32, ratio: f64, threshold: f64 },

    #[error("slope {slope:.4} of log max|Xi0| vs log r is not within {tol} of an integer")]
    NonIntegerOrder { slope: f64, tol: f64 },

    #[error("radius {0} outside the grid/domain range")]
    RadiusOutOfRange(f64),

    #[error("profile is not positive or not strictly decreasing in radius")]
    InvalidProfile,

    #[error(
        "classification inconclusive: power fit deviation {power_dev:.3e}, logarithmic fit deviation {log_dev:.3e}, threshold {threshold:.2}"
    )]
    Inconclusive {
        power_dev: f64,
        log_dev: f64,
        threshold: f64,
    },

    #[error("malformed CSV at line {line}: {message}")]
    MalformedCsv { line: usize, message: String },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("referenced file does not exist: {0}")]
    MissingFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
