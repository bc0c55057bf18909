//! Numerical tolerances, pinned in one place.
//!
//! Every cutoff the crate applies is a named constant here, so the tolerance
//! budget can be audited without chasing literals through the code.  The
//! relative tolerances leave roughly three orders of magnitude of headroom
//! above accumulated double-precision rounding at the supported sizes
//! (n ≤ 16); the absolute cutoffs guard divisions by tr x and ‖X‖².

/// Relative Frobenius tolerance for rank-one cone membership:
/// `‖x·x − tr(x)·x‖_F ≤ TOL_CONE · (tr x)²`.
pub const TOL_CONE: f64 = 1e-9;

/// Relative Frobenius tolerance for tangency: projecting a direction onto
/// the velocity space at its base point may move it by at most
/// `TOL_RANGE · ‖dir‖_F`.
pub const TOL_RANGE: f64 = 1e-9;

/// Relative tolerance on the defining equation of the restricted inverse,
/// `L_x(w) = v`, checked in debug builds.
pub const TOL_SOLVE: f64 = 1e-10;

/// Positive-trace cutoff: operations reject cone points with
/// `tr x ≤ TOL_TRACE` (the potential n/tr x is singular at the boundary).
pub const TOL_TRACE: f64 = 1e-12;

/// Origin cutoff upstairs: vectors with `‖X‖ < TOL_ORIGIN` are treated as
/// the (excluded) collision point.
pub const TOL_ORIGIN: f64 = 1e-12;

/// Linear-dependence threshold for collision detection:
/// `(u·v)² ≥ (1 − TOL_DEP)·u²v²` flags the pair as colliding.
pub const TOL_DEP: f64 = 1e-12;

/// Dead band around zero energy: `|Ẽ| ≤ EPS_ENERGY` is classified as the
/// parabolic (zero-energy) case.
pub const EPS_ENERGY: f64 = 1e-12;

/// Convergence tolerance for physical-time inversion:
/// `|t(τ) − t| ≤ TOL_TIME · max(1, |t|)`.
pub const TOL_TIME: f64 = 1e-12;

/// Iteration budget for the safeguarded Newton solve in time inversion.
pub const TIME_MAX_ITER: usize = 200;

/// Relative tolerance on the parabolic speed normalization `‖v‖² = ½`
/// required by physical-time queries.
pub const TOL_PARABOLIC_NORM: f64 = 1e-9;

/// Discriminant dead band for the conic classifier, applied after the
/// coefficient vector is scaled to unit Euclidean norm.
pub const EPS_DISC: f64 = 1e-6;

/// Residual bound asserted when an orbit plane is fitted: every sample must
/// sit within `TOL_PLANE_FIT · (1 + ‖point‖_F)` of the fitted plane.
pub const TOL_PLANE_FIT: f64 = 1e-10;

/// Membership gate for chart coordinates: points farther than
/// `TOL_PLANE_MEMBER · (1 + ‖x − center‖_F)` from the plane are rejected.
pub const TOL_PLANE_MEMBER: f64 = 1e-8;

/// Componentwise residual allowed when a transporter is verified against
/// the pair it was built from.
pub const TOL_TRANSPORT: f64 = 1e-10;

/// Determinant cutoff below which a group element is rejected as singular.
pub const TOL_DET: f64 = 1e-12;

/// Squared upstairs radius at which the physical integrator declares a
/// collision singularity (the potential 1/X² is about to overflow the
/// tolerance budget).
pub const COLLISION_RADIUS_SQ: f64 = 1e-10;

/// Step-underflow fraction: an adaptive step shorter than
/// `MIN_STEP_FRACTION · |span|` also counts as hitting the singularity.
pub const MIN_STEP_FRACTION: f64 = 1e-14;
