use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("diffusion rate gamma_p must be positive, got {0}")]
    NonPositiveDiffusion(f64),
    #[error("rate {name} must be non-negative, got {value}")]
    NegativeRate { name: &'static str, value: f64 },
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("domain too narrow: mass {tail_mass:e} outside [-L, L] exceeds {tolerance:e}")]
    DomainTooNarrow { tail_mass: f64, tolerance: f64 },
    #[error("invalid initial condition: {0}")]
    InvalidInitialCondition(String),
    #[error("argument must be non-negative, got {0}")]
    NegativeArgument(f64),
    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("degenerate parameters: {0}")]
    DegenerateParams(&'static str),
    #[error("no well-conditioned eigenbasis at xi = {xi} (condition {condition:e})")]
    DefectiveMatrix { xi: f64, condition: f64 },
    #[error("eigenvalue with non-negative real part {re:e} at xi = {xi}")]
    StabilityViolation { xi: f64, re: f64 },
    #[error("grid under-resolved: dx = {dx} but the solution scale needs dx <= {required}")]
    GridUnderResolved { dx: f64, required: f64 },
    #[error("kernel has not decayed at the grid boundary: |value| = {boundary:e}")]
    TailNotDecayed { boundary: f64 },
    #[error("wrong parameter regime: {0}")]
    WrongRegime(String),
    #[error("initial Laplace scale {found} does not match delta/omega = {expected}")]
    ScaleMismatch { expected: f64, found: f64 },
    #[error("quadrature did not converge (order {order}, last change {change:e})")]
    QuadratureNotConverged { order: usize, change: f64 },
    #[error("time stepping unstable at t = {t}: norm grew by {growth:e}")]
    UnstableStep { t: f64, growth: f64 },
    #[error("far-field form disagrees with quadrature at x = {x} by {discrepancy:e}")]
    SelfCheckFailed { x: f64, discrepancy: f64 },
}
