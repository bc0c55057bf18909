//! The quadratic 2:1 covering `q(X) = nXXᵀ` of the rank-one cone by
//! ℝⁿ∖{0}, its tangent map, fiber lifting, and the pulled-back
//! Lagrangian/energy.
//!
//! The pullback collapses the constrained matrix dynamics to a flat
//! vector problem: `L̃ = 2X²Ẋ² + 1/X²` and `Ẽ = 2X²Ẋ² − 1/X²`, where
//! `X² = ‖X‖²` and `Ẋ² = ‖Ẋ‖²`.  The sign of `Ẽ` drives every downstream
//! case split, with a dead band [`tol::EPS_ENERGY`] treated as zero energy.

use nalgebra::DVector;

use crate::error::Error;
use crate::jordan::{self, ConePoint, SymMatrix, TangentVector};
use crate::tol;

/// Upstairs phase state `(X, Ẋ)` with `X ≠ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegState {
    x: DVector<f64>,
    xdot: DVector<f64>,
}

impl RegState {
    pub fn new(x: DVector<f64>, xdot: DVector<f64>) -> Result<Self, Error> {
        if x.len() != xdot.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), got: xdot.len() });
        }
        if x.len() < 2 {
            return Err(Error::DimensionTooSmall { got: x.len() });
        }
        let norm = x.norm();
        if norm < tol::TOL_ORIGIN {
            return Err(Error::NearOrigin { norm });
        }
        Ok(RegState { x, xdot })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn xdot(&self) -> &DVector<f64> {
        &self.xdot
    }
}

/// The covering map `X ↦ nXXᵀ`.  Identifies `±X` exactly (the products
/// `(−Xᵢ)(−Xⱼ)` and `XᵢXⱼ` are bitwise equal).
pub fn q_map(x: &DVector<f64>) -> Result<ConePoint, Error> {
    let norm = x.norm();
    if norm < tol::TOL_ORIGIN {
        return Err(Error::NearOrigin { norm });
    }
    if x.len() < 2 {
        return Err(Error::DimensionTooSmall { got: x.len() });
    }
    let n = x.len() as f64;
    let base = SymMatrix::from_upper(x.len(), |i, j| n * x[i] * x[j]);
    ConePoint::new(base)
}

/// Pushforward of a phase state: base `q(X)`, direction `n(ẊXᵀ + XẊᵀ)`.
pub fn tangent_q(s: &RegState) -> Result<TangentVector, Error> {
    let at = q_map(&s.x)?;
    let n = s.n() as f64;
    let dir = SymMatrix::sym_outer(&s.x, &s.xdot).scale(n);
    #[cfg(debug_assertions)]
    {
        let projected = jordan::range_project(&at, &dir)?;
        let defect = (&dir - &projected).norm();
        debug_assert!(
            defect <= tol::TOL_RANGE * dir.norm().max(1.0),
            "pushforward left the tangent space: {defect:.3e}"
        );
    }
    Ok(TangentVector::new_unchecked(at, dir))
}

/// The two preimages `{X, −X}` of a cone point, recovered from the column
/// with the largest diagonal entry: `X = column_j / √(n·x_jj)`.
///
/// Branch choice is the caller's: lifting a path continuously means picking
/// whichever of the two returned vectors extends the previous choice.
pub fn lift(x: &ConePoint) -> (DVector<f64>, DVector<f64>) {
    let n = x.n();
    let mut j = 0;
    for k in 1..n {
        if x.base().entry(k, k) > x.base().entry(j, j) {
            j = k;
        }
    }
    let scale = (n as f64 * x.base().entry(j, j)).sqrt();
    let lifted = x.base().matrix().column(j) / scale;
    (lifted.clone_owned(), -lifted)
}

/// Pulled-back Lagrangian `2X²Ẋ² + 1/X²`.
pub fn lagrangian_reg(s: &RegState) -> f64 {
    let x2 = s.x.norm_squared();
    let v2 = s.xdot.norm_squared();
    2.0 * x2 * v2 + 1.0 / x2
}

/// Pulled-back energy `Ẽ = 2X²Ẋ² − 1/X²`, the constant of motion.
pub fn energy_reg(s: &RegState) -> f64 {
    let x2 = s.x.norm_squared();
    let v2 = s.xdot.norm_squared();
    2.0 * x2 * v2 - 1.0 / x2
}

/// Self-test of the kinetic trace identity
/// `tr(d/dt(XXᵀ) · L̄⁻¹(d/dt(XXᵀ))) = 4Ẋ²` at the unscaled rank-one point
/// `XXᵀ`; returns `|lhs − 4Ẋ²| / max(1, 4Ẋ²)`.
pub fn velocity_trace_identity_check(s: &RegState) -> Result<f64, Error> {
    let point = ConePoint::new(SymMatrix::outer(&s.x))?;
    let rate = SymMatrix::sym_outer(&s.x, &s.xdot);
    let tangent = TangentVector::new_unchecked(point.clone(), rate.clone());
    let inverse = jordan::restricted_inverse(&point, &tangent)?;
    // Plain (unnormalized) trace pairing: tr(uv) = n·⟨u, v⟩.
    let lhs = s.n() as f64 * jordan::trace_inner(&rate, inverse.dir())?;
    let rhs = 4.0 * s.xdot.norm_squared();
    Ok((lhs - rhs).abs() / rhs.max(1.0))
}

// ───────────────────────── Tests ─────────────────────────

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::{energy, lagrangian, metric_norm_sq};
    use approx::assert_relative_eq;
    use nalgebra::dvector;
    use rand::Rng;

    #[test]
    fn q_map_frozen_values() {
        let x = q_map(&dvector![1.0, 0.0]).unwrap();
        assert_eq!(x.base().entry(0, 0), 2.0);
        assert_eq!(x.base().entry(0, 1), 0.0);
        assert_eq!(x.base().entry(1, 1), 0.0);

        let half = 1.0 / 2f64.sqrt();
        let diag = q_map(&dvector![half, half]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(diag.base().entry(i, j), 1.0, max_relative = 1e-15);
            }
        }

        let e2 = q_map(&dvector![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(e2.base().entry(1, 1), 3.0);
        assert_eq!(e2.base().norm(), 3.0);
    }

    #[test]
    fn q_map_rejects_origin() {
        assert!(matches!(q_map(&dvector![0.0, 0.0]), Err(Error::NearOrigin { .. })));
    }

    #[test]
    fn deck_symmetry_is_exact() {
        let mut rng = crate::sampling::rng_for(21, 0);
        for _ in 0..50 {
            let n = *[2usize, 3, 5, 8].get(rng.gen_range(0..4)).unwrap();
            let x = crate::sampling::gaussian_vector(&mut rng, n);
            let plus = q_map(&x).unwrap();
            let minus = q_map(&(-&x)).unwrap();
            assert_eq!(plus.base(), minus.base());
        }
    }

    #[test]
    fn trace_of_image_is_n_times_norm_squared() {
        let mut rng = crate::sampling::rng_for(22, 0);
        for _ in 0..50 {
            let n = *[2usize, 3, 5].get(rng.gen_range(0..3)).unwrap();
            let x = crate::sampling::gaussian_vector(&mut rng, n);
            let image = q_map(&x).unwrap();
            assert_relative_eq!(
                image.trace(),
                n as f64 * x.norm_squared(),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn tangent_q_frozen_values() {
        let s = RegState::new(dvector![1.0, 0.0], dvector![0.0, 1.0]).unwrap();
        let v = tangent_q(&s).unwrap();
        assert_eq!(v.dir().entry(0, 1), 2.0);
        assert_eq!(v.dir().entry(0, 0), 0.0);

        let radial = RegState::new(dvector![1.0, 0.0], dvector![1.0, 0.0]).unwrap();
        let vr = tangent_q(&radial).unwrap();
        assert_eq!(vr.dir().entry(0, 0), 4.0);

        let rest = RegState::new(dvector![1.0, 0.0], dvector![0.0, 0.0]).unwrap();
        assert_eq!(tangent_q(&rest).unwrap().dir().norm(), 0.0);
    }

    #[test]
    fn lift_recovers_both_preimages() {
        let x = q_map(&dvector![1.0, 0.0]).unwrap();
        let (a, b) = lift(&x);
        assert_relative_eq!((a - dvector![1.0, 0.0]).norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!((b - dvector![-1.0, 0.0]).norm(), 0.0, epsilon = 1e-15);

        let y = q_map(&dvector![3.0, 4.0]).unwrap();
        let (a, b) = lift(&y);
        let target = dvector![3.0, 4.0];
        let err = (&a - &target).norm().min((&b - &target).norm());
        assert!(err <= 1e-13);
    }

    #[test]
    fn lift_round_trip_across_scales() {
        let mut rng = crate::sampling::rng_for(23, 0);
        for _ in 0..200 {
            let n = *[2usize, 3, 5, 8].get(rng.gen_range(0..4)).unwrap();
            let exponent: f64 = rng.gen_range(-3.0..3.0);
            let x = crate::sampling::unit_vector(&mut rng, n) * 10f64.powf(exponent);
            let image = q_map(&x).unwrap();
            let (a, b) = lift(&image);
            let err = (&a - &x).norm().min((&b - &x).norm());
            assert!(err <= 1e-12 * x.norm(), "lift error {err} at scale {exponent}");
        }
    }

    #[test]
    fn lift_rejected_for_non_cone_input() {
        assert!(ConePoint::new(SymMatrix::identity(2)).is_err());
    }

    #[test]
    fn pullback_scalars_frozen_values() {
        let s = RegState::new(dvector![1.0, 0.0], dvector![0.0, 1.0]).unwrap();
        assert_eq!(energy_reg(&s), 1.0);
        assert_eq!(lagrangian_reg(&s), 3.0);

        let slow = RegState::new(dvector![1.0, 0.0], dvector![0.0, 0.5]).unwrap();
        assert_eq!(energy_reg(&slow), -0.5);

        let critical =
            RegState::new(dvector![1.0, 0.0], dvector![0.0, 1.0 / 2f64.sqrt()]).unwrap();
        assert!(energy_reg(&critical).abs() <= 1e-15);
    }

    #[test]
    fn pullback_matches_downstairs_functionals() {
        let mut rng = crate::sampling::rng_for(24, 0);
        for _ in 0..200 {
            let n = *[2usize, 3, 5, 8].get(rng.gen_range(0..4)).unwrap();
            let s = crate::sampling::reg_state(&mut rng, n);
            let v = tangent_q(&s).unwrap();
            assert_relative_eq!(
                lagrangian(&v),
                lagrangian_reg(&s),
                max_relative = 1e-10
            );
            assert_relative_eq!(energy(&v), energy_reg(&s), max_relative = 1e-10, epsilon = 1e-12);
            let kinetic = 4.0 * s.x().norm_squared() * s.xdot().norm_squared();
            assert_relative_eq!(
                metric_norm_sq(&v),
                kinetic,
                max_relative = 1e-10,
                epsilon = 1e-14
            );
        }
    }

    mod arbitrary_inputs {
        use super::*;
        use proptest::prelude::*;

        fn vector(n: usize) -> impl Strategy<Value = DVector<f64>> {
            proptest::collection::vec(-1e3..1e3f64, n)
                .prop_map(DVector::from_vec)
                .prop_filter("bounded away from the origin", |v| v.norm() > 1e-3)
        }

        proptest! {
            #[test]
            fn covering_image_is_always_on_the_cone(x in (2usize..=5).prop_flat_map(vector)) {
                let image = q_map(&x).unwrap();
                prop_assert!(crate::jordan::cone_check(image.base(), crate::tol::TOL_CONE));
                prop_assert!(image.trace() > 0.0);
            }

            #[test]
            fn sign_flip_is_invisible_downstairs(x in (2usize..=5).prop_flat_map(vector)) {
                let plus = q_map(&x).unwrap();
                let minus = q_map(&(-&x)).unwrap();
                prop_assert_eq!(plus.base(), minus.base());
            }
        }
    }

    #[test]
    fn velocity_trace_identity_holds() {
        // The axis-aligned case where the operator scalings are explicit.
        let a = 1.7;
        let s = RegState::new(dvector![a, 0.0, 0.0], dvector![0.3, -1.2, 0.8]).unwrap();
        assert!(velocity_trace_identity_check(&s).unwrap() <= 1e-12);

        let rest = RegState::new(dvector![1.0, 1.0], dvector![0.0, 0.0]).unwrap();
        assert_eq!(velocity_trace_identity_check(&rest).unwrap(), 0.0);

        let mut rng = crate::sampling::rng_for(25, 0);
        for _ in 0..100 {
            let s = crate::sampling::reg_state(&mut rng, 5);
            let residual = velocity_trace_identity_check(&s).unwrap();
            assert!(residual <= 1e-10, "trace identity residual {residual}");
        }
    }
}
