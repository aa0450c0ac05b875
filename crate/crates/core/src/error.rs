use thiserror::Error;

/// Errors produced by cavity construction, quadrature and regularization.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cavity length must be positive and finite, got {0}")]
    InvalidLength(f64),

    #[error("velocity must satisfy |v| < 1, got {0}")]
    InvalidVelocity(f64),

    #[error("mode index must be >= 1, got {0}")]
    InvalidModeIndex(i64),

    #[error("point ({t}, {x}) lies outside the instantaneous cavity [{lo}, {hi}]")]
    OutsideCavity { t: f64, x: f64, lo: f64, hi: f64 },

    #[error("quadrature did not converge: estimated error {achieved:e} exceeds {requested:e}")]
    QuadratureNotConverged { achieved: f64, requested: f64 },

    #[error("per-mode contributions are not proportional to the spectrum: n-dispersion {n_dispersion:e}, t-dispersion {t_dispersion:e}")]
    NotProportional { n_dispersion: f64, t_dispersion: f64, ratios: Vec<(u32, f64, f64, f64)> },

    #[error("invalid regularization config: {0}")]
    InvalidConfig(String),

    #[error("cutoff fit is ill-conditioned (condition number {condition:e}); try a different epsilon schedule")]
    IllConditioned { condition: f64 },

    #[error("cutoff sum did not converge within {max_terms} terms at epsilon = {epsilon}")]
    TruncationNotConvergent { epsilon: f64, max_terms: u64 },

    #[error("integration tolerance not met: estimated error {0:e}")]
    IntegrationTolerance(f64),

    #[error("regularization method {0} is not available for this sum")]
    UnsupportedMethod(&'static str),

    #[error("polynomial fit residual {residual:e} exceeds {threshold:e}")]
    FitResidual { residual: f64, threshold: f64 },

    #[error("underdetermined system: {equations} equation(s) for {unknowns} unknowns")]
    Underdetermined { equations: usize, unknowns: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
