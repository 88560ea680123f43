use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("outside domain: {0}")]
    Domain(String),

    #[error("inadmissible point: {0}")]
    Inadmissible(String),

    #[error("degenerate crossing cluster on [{t0}, {t1}]")]
    DegenerateCrossing { t0: f64, t1: f64 },

    #[error("no stabilizing perturbation found (last eps = {last_eps:e})")]
    EpsilonExhausted { last_eps: f64 },

    #[error("non-regular crossing at t = {t}")]
    NonRegularCrossing { t: f64 },

    /// `last` holds the last valid state as (xi, theta, xi_dot, theta_dot).
    #[error("trajectory escaped the domain after t = {t} (last xi = {})", last[0])]
    EscapedDomain { t: f64, last: [f64; 4] },

    #[error("internal consistency check failed: {0}")]
    SelfCheck(String),
}
