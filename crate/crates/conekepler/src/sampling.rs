//! Deterministic random generators for cone points, tangents, phase states,
//! trajectory specifications, and group elements.
//!
//! Everything here is driven by an explicit [`ChaCha8Rng`] so that property
//! checks and the command-line `check` subcommand reproduce bit-identically
//! for a given seed.  Trial `k` of a suite seeded with `s` uses
//! [`rng_for`]`(s, k)`, so single trials can be replayed in isolation.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::jordan::{ConePoint, SymMatrix, TangentVector};
use crate::regularization::RegState;
use crate::trajectories::{EnergyClass, TrajectorySpec};

/// Stream for trial `trial` of a run seeded with `seed`.
pub fn rng_for(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ trial)
}

/// Standard normal via the Box–Muller transform.
pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let a: f64 = rng.gen::<f64>();
        if a > 0.0 {
            let b: f64 = rng.gen::<f64>();
            return (-2.0 * a.ln()).sqrt() * (std::f64::consts::TAU * b).cos();
        }
    }
}

/// Vector of independent standard normals.
pub fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| gaussian(rng))
}

/// Uniform point on the unit sphere in ℝⁿ.
pub fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    loop {
        let v = gaussian_vector(rng, n);
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}

/// Dense symmetric matrix with independent Gaussian upper-triangle entries.
pub fn sym_matrix(rng: &mut ChaCha8Rng, n: usize) -> SymMatrix {
    let raw = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    SymMatrix::from_upper(n, |i, j| raw[(i, j)])
}

/// Random rank-one cone point `t·ppᵀ` with unit axis and trace in [0.5, 2].
pub fn cone_point(rng: &mut ChaCha8Rng, n: usize) -> ConePoint {
    let p = unit_vector(rng, n);
    let t: f64 = rng.gen_range(0.5..2.0);
    ConePoint::new(SymMatrix::outer(&p).scale(t)).expect("sampled point is on the cone")
}

/// Random tangent vector at `x`, built directly in the range of the
/// multiplication operator: `apᵀ + paᵀ` for a Gaussian `a`.
pub fn tangent_at(rng: &mut ChaCha8Rng, x: &ConePoint) -> TangentVector {
    let a = gaussian_vector(rng, x.n());
    let dir = SymMatrix::sym_outer(&a, x.axis());
    TangentVector::new(x.clone(), dir).expect("sampled direction lies in the tangent space")
}

/// Random phase state upstairs, bounded away from the puncture at the origin.
pub fn reg_state(rng: &mut ChaCha8Rng, n: usize) -> RegState {
    let scale: f64 = rng.gen_range(0.5..1.5);
    let x = unit_vector(rng, n) * scale;
    let xdot = gaussian_vector(rng, n);
    RegState::new(x, xdot).expect("sampled state is away from the origin")
}

/// Random well-conditioned trajectory specification of the requested class.
///
/// Conditioning: `‖u‖ ∈ [0.6, 1.4]`, the angle between `u` and `v` is kept
/// away from 0 and π (|cos| ≤ 0.9), parabolic `v` is normalized to
/// `‖v‖² = 1/2` (the physical time gauge), and hyperbolic `v` satisfies
/// `‖v‖² ≥ 1.2‖u‖²` so the class constraint holds with margin.
pub fn spec(rng: &mut ChaCha8Rng, n: usize, class: EnergyClass) -> TrajectorySpec {
    let u = unit_vector(rng, n) * rng.gen_range(0.6..1.4);
    let v_hat = loop {
        let cand = unit_vector(rng, n);
        let cos = u.dot(&cand) / u.norm();
        if cos.abs() <= 0.9 {
            break cand;
        }
    };
    let v = match class {
        EnergyClass::Elliptic => v_hat * rng.gen_range(0.6..1.4),
        EnergyClass::Parabolic => v_hat / 2f64.sqrt(),
        EnergyClass::Hyperbolic => {
            let ratio: f64 = rng.gen_range(1.2..2.2);
            v_hat * (ratio * u.norm_squared()).sqrt()
        }
    };
    TrajectorySpec::new(class, u, v).expect("sampled specification is admissible")
}

/// Random invertible matrix (Gaussian entries, redrawn while |det| < 0.1).
pub fn group_element(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    loop {
        let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
        if g.determinant().abs() >= 0.1 {
            return g;
        }
    }
}

/// Random orthogonal matrix: Q factor of a Gaussian matrix.
pub fn orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    loop {
        let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
        let qr = g.qr();
        let q = qr.q();
        if qr.r()[(n - 1, n - 1)].abs() > 1e-8 {
            return q;
        }
    }
}
