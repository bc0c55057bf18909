//! Kepler dynamics on the rank-one cone of real symmetric matrices.
//!
//! The configuration space is the cone of positive-trace rank-one symmetric
//! `n×n` matrices, a curved hypersurface inside the Euclidean Jordan algebra
//! of symmetric matrices ([`jordan`]).  A quadratic 2:1 covering map
//! `X ↦ nXXᵀ` from ℝⁿ∖{0} flattens the geometry ([`regularization`]): the
//! pulled-back Lagrangian is that of a particle in an inverse-square-radius
//! potential, and after the classical time reparametrization
//! `dt/dτ = pref·‖X‖²` the flow at fixed energy becomes *linear*.  All
//! trajectories are therefore available in closed form ([`trajectories`]),
//! an independent adaptive Runge–Kutta integrator cross-checks them in
//! physical time ([`dynamics`]), and the conic-section geometry of the
//! orbits—planarity, the energy trichotomy, and the transitive linear
//! symmetry of the cone—is verified directly ([`geometry`]).
//!
//! [`checks`] packages the invariants as seeded property suites, and the
//! `conekepler` command-line tool (separate crate) exposes sampling,
//! integration, classification, and plotting.

pub mod checks;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod jordan;
pub mod regularization;
pub mod sampling;
pub mod tol;
pub mod trajectories;

pub use error::Error;
pub use jordan::{ConePoint, SymMatrix, TangentVector};
pub use regularization::RegState;
pub use trajectories::{EnergyClass, TrajectorySpec};
