use thiserror::Error;

use crate::trajectories::EnergyClass;

/// Errors shared by the algebra, trajectory and geometry layers.
///
/// The integrators have their own error type carrying partial traces; see
/// [`crate::dynamics::IntegrationError`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix dimension {got} is below the minimum of 2")]
    DimensionTooSmall { got: usize },

    #[error("matrix is {rows}x{cols}, not square")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is outside the rank-one cone (relative residual {residual:.3e})")]
    OutsideCone { residual: f64 },

    #[error("trace {trace:.3e} is not positive enough for a cone point")]
    NonPositiveTrace { trace: f64 },

    #[error("direction is not tangent at the base point (relative residual {residual:.3e})")]
    OutsideRange { residual: f64 },

    #[error("vector norm {norm:.3e} is below the origin cutoff")]
    NearOrigin { norm: f64 },

    #[error("zero vector where a nonzero one is required")]
    ZeroVector,

    #[error("trajectory collides at tau = {tau}")]
    Collision { tau: f64 },

    #[error("colliding trajectory: u and v are linearly dependent")]
    CollidingSpec,

    #[error("hyperbolic data needs |v|^2 > |u|^2 (got |u|^2 = {u2:.6e}, |v|^2 = {v2:.6e})")]
    HyperbolicOrdering { u2: f64, v2: f64 },

    #[error("parabolic |v|^2 = {v2:.6e} is not the required 1/2; canonicalize first")]
    NotNormalized { v2: f64 },

    #[error("no convergence after {iters} iterations")]
    NoConvergence { iters: usize },

    #[error("class mismatch: {left} vs {right}")]
    ClassMismatch { left: EnergyClass, right: EnergyClass },

    #[error("operation is not available for the {0} class")]
    UnsupportedClass(EnergyClass),

    #[error("point is off the chart plane (residual {residual:.3e})")]
    OffPlane { residual: f64 },

    #[error("group element is numerically singular (det = {det:.3e})")]
    SingularGroupElement { det: f64 },

    #[error("need at least {need} points, got {got}")]
    TooFewPoints { got: usize, need: usize },

    #[error("degenerate fit: the points do not determine a unique conic")]
    DegenerateFit,

    #[error("inputs are too close to the colliding set (residual {residual:.3e})")]
    IllConditioned { residual: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("internal invariant violated: {0}")]
    Internal(&'static str),
}
