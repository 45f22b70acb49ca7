use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by model construction and the numerical solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval [{a1}, {a2}]: need finite a1 < a2")]
    InvalidInterval { a1: f64, a2: f64 },

    #[error("invalid boundary parameters: {0}")]
    InvalidBoundary(String),

    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),

    #[error("step functions live on different intervals")]
    MismatchedInterval,

    #[error("b1 > b2 on pieces {pieces:?}")]
    ConstraintOrderViolation { pieces: Vec<usize> },

    #[error("b1 and b2 coincide everywhere: the admissible family is a single structure")]
    EmptyE,

    #[error("structure with b = 0 and nu1 = 0 has no closed-form spectrum")]
    MasslessNeumann,

    #[error("derivative formula has a vanishing denominator (d/dx theta(a2) = 0)")]
    DegenerateDenominator,

    #[error("z = {z} is not a resonance: |F| = {residual:e} exceeds tolerance")]
    NotAResonance { z: Complex64, residual: f64 },

    #[error("contour passes within tolerance of a zero of F (min |F| = {min_abs:e})")]
    ContourTooCloseToZero { min_abs: f64 },

    #[error("m-th derivative of F is numerically zero; splitting coefficient undefined")]
    ZeroDenominator,

    #[error("family is not bang-bang ready: b1 vanishes on part of the set where b1 < b2")]
    NotBangbangReady,

    #[error("bang-bang solver requires Im z^2 <= 0, got z = {0}")]
    UpperHalfPlaneZ(Complex64),

    #[error("ambiguous coefficient choice at x = {x}: {detail}")]
    AmbiguousBranch { x: f64, detail: String },

    #[error("recovered structure does not reproduce the eigenvalue (|F| = {residual:e})")]
    RoundTripFailure { residual: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("Jacobian is singular")]
    JacobianSingular,

    #[error("no root found for alpha = {alpha} with beta up to {beta_max}")]
    NoRootFound { alpha: f64, beta_max: f64 },

    #[error("zero frequency is not guaranteed admissible: {0}")]
    HypothesisViolated(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of an iterative numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::NoRootFound { .. }
                | Error::JacobianSingular
                | Error::AmbiguousBranch { .. }
                | Error::RoundTripFailure { .. }
                | Error::ContourTooCloseToZero { .. }
                | Error::DegenerateDenominator
                | Error::ZeroDenominator
                | Error::NotAResonance { .. }
        )
    }
}
