//! The Euclidean Jordan algebra of real symmetric n×n matrices and its
//! rank-one cone.
//!
//! Configuration points are rank-one symmetric matrices with positive trace,
//! `x = tr(x)·ppᵀ` for a unit vector `p` (the *axis*).  The algebra product
//! is the symmetrized matrix product `u ∘ v = (uv + vu)/2` and the inner
//! product is the normalized trace form `⟨u, v⟩ = tr(uv)/n`.  Velocities at
//! `x` live in the range of the multiplication operator `L_x = x ∘ ·`, and
//! the kinetic metric is `‖w‖² = (tr x/n)·⟨w, L̄_x⁻¹w⟩` with `L̄_x` the
//! restriction of `L_x` to its range.
//!
//! The rank-one structure keeps everything O(n²): in a frame where the axis
//! is the first coordinate vector, `Range L_x` is exactly the first
//! row/column, where `L_x` acts by `tr x` on the (1,1) entry and `tr x / 2`
//! on the rest.  A single Householder reflection moves any axis into that
//! frame and back.

use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::tol;

/// Dense real symmetric matrix with exact entrywise symmetry.
///
/// Construction symmetrizes its input by averaging `(m + mᵀ)/2`; all internal
/// arithmetic fills one triangle and mirrors it, so `entry(i, j) == entry(j, i)`
/// holds bit-for-bit, never just approximately.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    m: DMatrix<f64>,
}

impl SymMatrix {
    /// Symmetrizes a square matrix of size ≥ 2.
    pub fn new(m: DMatrix<f64>) -> Result<Self, Error> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        if m.nrows() < 2 {
            return Err(Error::DimensionTooSmall { got: m.nrows() });
        }
        Ok(Self::from_upper(m.nrows(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)])))
    }

    /// Builds a symmetric matrix from an upper-triangle generator
    /// (`f(i, j)` is only evaluated for `i ≤ j`).
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let value = f(i, j);
                m[(i, j)] = value;
                m[(j, i)] = value;
            }
        }
        SymMatrix { m }
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix { m: DMatrix::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix { m: DMatrix::identity(n, n) }
    }

    /// The outer product `wwᵀ`.
    pub fn outer(w: &DVector<f64>) -> Self {
        Self::from_upper(w.len(), |i, j| w[i] * w[j])
    }

    /// The symmetrized outer product `abᵀ + baᵀ`.
    pub fn sym_outer(a: &DVector<f64>, b: &DVector<f64>) -> Self {
        assert_eq!(a.len(), b.len(), "sym_outer dimension mismatch");
        Self::from_upper(a.len(), |i, j| a[i] * b[j] + b[i] * a[j])
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        SymMatrix { m: &self.m * s }
    }

    /// Row-major upper triangle `(0,0), (0,1), …, (1,1), …, (n-1,n-1)`.
    pub fn upper_triangle(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                out.push(self.m[(i, j)]);
            }
        }
        out
    }
}

impl std::ops::Add for &SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n(), rhs.n(), "dimension mismatch");
        SymMatrix { m: &self.m + &rhs.m }
    }
}

impl std::ops::Sub for &SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n(), rhs.n(), "dimension mismatch");
        SymMatrix { m: &self.m - &rhs.m }
    }
}

impl std::ops::Neg for &SymMatrix {
    type Output = SymMatrix;
    fn neg(self) -> SymMatrix {
        SymMatrix { m: -&self.m }
    }
}

/// The Jordan product `u ∘ v = (uv + vu)/2`.
pub fn jordan_product(u: &SymMatrix, v: &SymMatrix) -> Result<SymMatrix, Error> {
    if u.n() != v.n() {
        return Err(Error::DimensionMismatch { expected: u.n(), got: v.n() });
    }
    // (vu)_{ij} = (uv)_{ji} for symmetric u, v, so one product suffices.
    let uv = &u.m * &v.m;
    Ok(SymMatrix::from_upper(u.n(), |i, j| 0.5 * (uv[(i, j)] + uv[(j, i)])))
}

/// The normalized trace form `⟨u, v⟩ = tr(uv)/n`.
pub fn trace_inner(u: &SymMatrix, v: &SymMatrix) -> Result<f64, Error> {
    if u.n() != v.n() {
        return Err(Error::DimensionMismatch { expected: u.n(), got: v.n() });
    }
    // tr(uv) = Σ_{ij} u_{ij} v_{ij} when both factors are symmetric.
    Ok(u.m.dot(&v.m) / u.n() as f64)
}

/// Rank-one cone membership: `‖x² − tr(x)·x‖_F ≤ tol·(tr x)²` and `tr x > 0`.
pub fn cone_check(x: &SymMatrix, tolerance: f64) -> bool {
    let t = x.trace();
    if t <= 0.0 {
        return false;
    }
    cone_residual(x) <= tolerance * t * t
}

/// Absolute Frobenius residual `‖x² − tr(x)·x‖_F` of the rank-one equation.
pub fn cone_residual(x: &SymMatrix) -> f64 {
    let t = x.trace();
    let sq = &x.m * &x.m;
    (sq - &x.m * t).norm()
}

/// A point of the rank-one cone: `x = tr(x)·ppᵀ` with `tr x` above the
/// trace cutoff, stored together with its unit axis `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConePoint {
    base: SymMatrix,
    axis: DVector<f64>,
}

impl ConePoint {
    /// Validates cone membership at [`tol::TOL_CONE`] and extracts the axis
    /// from the column with the largest diagonal entry.
    pub fn new(base: SymMatrix) -> Result<Self, Error> {
        let t = base.trace();
        if t <= tol::TOL_TRACE {
            return Err(Error::NonPositiveTrace { trace: t });
        }
        let residual = cone_residual(&base);
        if residual > tol::TOL_CONE * t * t {
            return Err(Error::OutsideCone { residual: residual / (t * t) });
        }
        let n = base.n();
        let mut j = 0;
        for k in 1..n {
            if base.entry(k, k) > base.entry(j, j) {
                j = k;
            }
        }
        let mut axis = base.matrix().column(j).clone_owned();
        let norm = axis.norm();
        if norm <= 0.0 {
            return Err(Error::Internal("cone point with zero dominant column"));
        }
        axis /= norm;
        // axis[j] = x_jj / ‖column j‖ > 0, so the sign choice is deterministic.
        Ok(ConePoint { base, axis })
    }

    pub fn base(&self) -> &SymMatrix {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn trace(&self) -> f64 {
        self.base.trace()
    }

    /// Unit vector `p` with `base ≈ tr(x)·ppᵀ` (defined up to the sign fixed
    /// at construction).
    pub fn axis(&self) -> &DVector<f64> {
        &self.axis
    }
}

/// A velocity attached to a cone point; the direction lies in `Range L_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    at: ConePoint,
    dir: SymMatrix,
}

impl TangentVector {
    /// Validates tangency: the projection onto `Range L_x` may move `dir`
    /// by at most `TOL_RANGE·‖dir‖_F`.
    pub fn new(at: ConePoint, dir: SymMatrix) -> Result<Self, Error> {
        if at.n() != dir.n() {
            return Err(Error::DimensionMismatch { expected: at.n(), got: dir.n() });
        }
        let scale = dir.norm();
        if scale > 0.0 {
            let projected = range_project(&at, &dir)?;
            let residual = (&dir - &projected).norm();
            if residual > tol::TOL_RANGE * scale {
                return Err(Error::OutsideRange { residual: residual / scale });
            }
        }
        Ok(TangentVector { at, dir })
    }

    /// For directions that are tangent by construction (pushforwards,
    /// restricted inverses); skips the membership gate.
    pub(crate) fn new_unchecked(at: ConePoint, dir: SymMatrix) -> Self {
        debug_assert_eq!(at.n(), dir.n());
        TangentVector { at, dir }
    }

    pub fn at(&self) -> &ConePoint {
        &self.at
    }

    pub fn dir(&self) -> &SymMatrix {
        &self.dir
    }
}

/// Orthogonal projection of `w` onto `Range L_x = {apᵀ + paᵀ : a ∈ ℝⁿ}`
/// where `p` is the axis of `x`.  The trace form and the Frobenius form are
/// proportional, so they induce the same projection.
pub fn range_project(x: &ConePoint, w: &SymMatrix) -> Result<SymMatrix, Error> {
    if x.n() != w.n() {
        return Err(Error::DimensionMismatch { expected: x.n(), got: w.n() });
    }
    let p = &x.axis;
    let s = w.matrix() * p;
    let sigma = p.dot(&s);
    Ok(SymMatrix::from_upper(x.n(), |i, j| {
        p[i] * s[j] + s[i] * p[j] - sigma * p[i] * p[j]
    }))
}

/// Unit Householder vector `ŵ` whose reflection `I − 2ŵŵᵀ` maps the unit
/// vector `p` to `∓e₁`.  The sign keeps `‖p ± e₁‖² = 2 + 2|p₁| ≥ 2`, so the
/// construction never degenerates.
fn axis_reflector(p: &DVector<f64>) -> DVector<f64> {
    let mut w = p.clone();
    let sign = if p[0] >= 0.0 { 1.0 } else { -1.0 };
    w[0] += sign;
    let norm = w.norm();
    w / norm
}

/// The conjugation `H m H` for `H = I − 2ŵŵᵀ`, assembled in O(n²).
fn reflect_sym(m: &SymMatrix, w_hat: &DVector<f64>) -> SymMatrix {
    let s = m.matrix() * w_hat;
    let sigma = w_hat.dot(&s);
    SymMatrix::from_upper(m.n(), |i, j| {
        m.entry(i, j) - 2.0 * (w_hat[i] * s[j] + s[i] * w_hat[j])
            + 4.0 * sigma * w_hat[i] * w_hat[j]
    })
}

/// The inverse of `L_x` restricted to its range, applied to a tangent
/// vector at `x`.
///
/// Algorithm: reflect the axis of `x` onto `e₁`; in that frame `L_x` scales
/// the (1,1) entry by `tr x` and the remaining first row/column by `tr x/2`,
/// so the inverse divides by those factors; reflect back.  Membership in
/// `Range L_x` is enforced when the [`TangentVector`] is built, so the
/// off-range block (bounded by that gate) is projected away here rather
/// than re-policed.
pub fn restricted_inverse(x: &ConePoint, v: &TangentVector) -> Result<TangentVector, Error> {
    if x.n() != v.dir.n() {
        return Err(Error::DimensionMismatch { expected: x.n(), got: v.dir.n() });
    }
    let n = x.n();
    let t = x.trace();
    let w_hat = axis_reflector(&x.axis);
    let rotated = reflect_sym(&v.dir, &w_hat);
    let scaled = SymMatrix::from_upper(n, |i, j| {
        if i == 0 && j == 0 {
            rotated.entry(0, 0) / t
        } else if i == 0 {
            2.0 * rotated.entry(0, j) / t
        } else {
            0.0
        }
    });
    let out = reflect_sym(&scaled, &w_hat);
    #[cfg(debug_assertions)]
    {
        let reproduced = jordan_product(x.base(), &out)?;
        let target = range_project(x, &v.dir)?;
        let defect = (&reproduced - &target).norm();
        debug_assert!(
            defect <= tol::TOL_SOLVE * v.dir.norm().max(1.0),
            "restricted inverse defect {defect:.3e}"
        );
    }
    Ok(TangentVector::new_unchecked(x.clone(), out))
}

/// Squared kinetic-metric norm `(tr x/n)·⟨dir, L̄_x⁻¹ dir⟩`.
pub fn metric_norm_sq(v: &TangentVector) -> f64 {
    let inverse = restricted_inverse(&v.at, v).expect("dimensions fixed at construction");
    let pairing = trace_inner(&v.dir, &inverse.dir).expect("dimensions fixed at construction");
    let value = v.at.trace() / v.at.n() as f64 * pairing;
    // The form is positive semidefinite; clamp the rounding of the zero case.
    value.max(0.0)
}

/// The Lagrangian `½‖ẋ‖² + n/tr x` of the attracting `n/tr x` potential.
pub fn lagrangian(v: &TangentVector) -> f64 {
    0.5 * metric_norm_sq(v) + v.at.n() as f64 / v.at.trace()
}

/// The conserved energy `½‖ẋ‖² − n/tr x`.
pub fn energy(v: &TangentVector) -> f64 {
    0.5 * metric_norm_sq(v) - v.at.n() as f64 / v.at.trace()
}

// ───────────────────────── Tests ─────────────────────────
