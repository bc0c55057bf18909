//! Closed-form trajectories in the linearizing coordinates.
//!
//! Upstairs the equation of motion at fixed energy `Ẽ` is linear—a harmonic
//! oscillator, a free particle, or a saddle—so every solution is an explicit
//! combination of two constant vectors `u, v ∈ ℝⁿ`:
//!
//! | class      | `X(τ)`                  | energy               |
//! |------------|-------------------------|----------------------|
//! | elliptic   | `cos τ·u + sin τ·v`     | `−1/(‖u‖²+‖v‖²)`     |
//! | parabolic  | `u + τ·v`               | `0`                  |
//! | hyperbolic | `cosh τ·u + sinh τ·v`   | `1/(‖v‖²−‖u‖²)`      |
//!
//! Physical time is recovered by integrating `dt/dτ = pref·‖X‖²` in closed
//! form ([`TrajectorySpec::time_law`]) and inverted numerically
//! ([`TrajectorySpec::invert_time`]).  The parabolic family carries a gauge
//! freedom (rescaling `τ` rescales `v`); the physical-time convention pins
//! `‖v‖² = 1/2`, and [`TrajectorySpec::canonicalize`] moves an arbitrary
//! parabolic specification into that gauge.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;

use crate::error::Error;
use crate::jordan::ConePoint;
use crate::regularization::{self, RegState};
use crate::tol;

/// Sign of the conserved energy, which selects the linear model upstairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnergyClass {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl EnergyClass {
    /// Classify a numerical energy, treating `|e| ≤` [`tol::EPS_ENERGY`] as
    /// exactly zero.
    pub fn from_energy(e: f64) -> EnergyClass {
        if e.abs() <= tol::EPS_ENERGY {
            EnergyClass::Parabolic
        } else if e < 0.0 {
            EnergyClass::Elliptic
        } else {
            EnergyClass::Hyperbolic
        }
    }
}

impl fmt::Display for EnergyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            EnergyClass::Elliptic => "elliptic",
            EnergyClass::Parabolic => "parabolic",
            EnergyClass::Hyperbolic => "hyperbolic",
        };
        f.write_str(name)
    }
}

impl FromStr for EnergyClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "elliptic" => Ok(EnergyClass::Elliptic),
            "parabolic" => Ok(EnergyClass::Parabolic),
            "hyperbolic" => Ok(EnergyClass::Hyperbolic),
            _ => Err(Error::InvalidConfig("class must be elliptic, parabolic, or hyperbolic")),
        }
    }
}

/// A closed-form trajectory `X(τ)` upstairs, determined by its class and the
/// two coefficient vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySpec {
    class: EnergyClass,
    u: DVector<f64>,
    v: DVector<f64>,
}

impl TrajectorySpec {
    /// Validates dimensions (equal, ≥ 2), `u ≠ 0`, and for the hyperbolic
    /// class the strict ordering `‖v‖² > ‖u‖²` (otherwise the formula would
    /// produce a negative or undefined energy).
    pub fn new(class: EnergyClass, u: DVector<f64>, v: DVector<f64>) -> Result<Self, Error> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch { expected: u.len(), got: v.len() });
        }
        if u.len() < 2 {
            return Err(Error::DimensionTooSmall { got: u.len() });
        }
        if u.norm() == 0.0 {
            return Err(Error::ZeroVector);
        }
        if class == EnergyClass::Hyperbolic {
            let u2 = u.norm_squared();
            let v2 = v.norm_squared();
            if v2 <= u2 {
                return Err(Error::HyperbolicOrdering { u2, v2 });
            }
        }
        Ok(TrajectorySpec { class, u, v })
    }

    pub fn class(&self) -> EnergyClass {
        self.class
    }

    pub fn u(&self) -> &DVector<f64> {
        &self.u
    }

    pub fn v(&self) -> &DVector<f64> {
        &self.v
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    /// Whether the trajectory meets the origin upstairs (equivalently, the
    /// cone tip downstairs).  This happens exactly when `u` and `v` are
    /// linearly dependent, tested via the normalized Gram determinant
    /// `sin²∠(u,v) ≤` [`tol::TOL_DEP`].
    pub fn colliding(&self) -> bool {
        let u2 = self.u.norm_squared();
        let v2 = self.v.norm_squared();
        let area_sq = u2 * v2 - self.u.dot(&self.v).powi(2);
        area_sq <= tol::TOL_DEP * u2 * v2
    }

    /// Position upstairs at fictitious time `τ`.
    pub fn position_up(&self, tau: f64) -> DVector<f64> {
        match self.class {
            EnergyClass::Elliptic => &self.u * tau.cos() + &self.v * tau.sin(),
            EnergyClass::Parabolic => &self.u + &self.v * tau,
            EnergyClass::Hyperbolic => &self.u * tau.cosh() + &self.v * tau.sinh(),
        }
    }

    /// Derivative `dX/dτ` at fictitious time `τ`.
    pub fn velocity_up(&self, tau: f64) -> DVector<f64> {
        match self.class {
            EnergyClass::Elliptic => &self.v * tau.cos() - &self.u * tau.sin(),
            EnergyClass::Parabolic => self.v.clone(),
            EnergyClass::Hyperbolic => &self.v * tau.cosh() + &self.u * tau.sinh(),
        }
    }

    /// Position on the cone, `q(X(τ))`.  Fails with [`Error::Collision`] when
    /// the trajectory is at the cone tip.
    pub fn position_down(&self, tau: f64) -> Result<ConePoint, Error> {
        regularization::q_map(&self.position_up(tau)).map_err(|e| match e {
            Error::NearOrigin { .. } => Error::Collision { tau },
            other => other,
        })
    }

    /// Conserved energy of the trajectory, in closed form.
    pub fn energy_of(&self) -> f64 {
        match self.class {
            EnergyClass::Elliptic => -1.0 / (self.u.norm_squared() + self.v.norm_squared()),
            EnergyClass::Parabolic => 0.0,
            EnergyClass::Hyperbolic => 1.0 / (self.v.norm_squared() - self.u.norm_squared()),
        }
    }

    /// `‖X(τ)‖²` as a scalar trigonometric expression (no vector built).
    fn radius_sq(&self, tau: f64) -> f64 {
        let u2 = self.u.norm_squared();
        let v2 = self.v.norm_squared();
        let uv = self.u.dot(&self.v);
        match self.class {
            EnergyClass::Elliptic => {
                0.5 * (u2 + v2) + 0.5 * (u2 - v2) * (2.0 * tau).cos() + uv * (2.0 * tau).sin()
            }
            EnergyClass::Parabolic => u2 + 2.0 * tau * uv + tau * tau * v2,
            EnergyClass::Hyperbolic => {
                0.5 * (u2 - v2) + 0.5 * (u2 + v2) * (2.0 * tau).cosh() + uv * (2.0 * tau).sinh()
            }
        }
    }

    /// Prefactor in `dt/dτ = pref·‖X‖²`.  For the parabolic class this
    /// requires the physical gauge `‖v‖² = 1/2` and fails with
    /// [`Error::NotNormalized`] otherwise.
    fn prefactor(&self) -> Result<f64, Error> {
        let u2 = self.u.norm_squared();
        let v2 = self.v.norm_squared();
        match self.class {
            EnergyClass::Elliptic => Ok((2.0 * (u2 + v2)).sqrt()),
            EnergyClass::Parabolic => {
                if (v2 - 0.5).abs() > tol::TOL_PARABOLIC_NORM {
                    Err(Error::NotNormalized { v2 })
                } else {
                    Ok(1.0)
                }
            }
            EnergyClass::Hyperbolic => Ok((2.0 * (v2 - u2)).sqrt()),
        }
    }

    /// `t(τ) = pref·∫₀^τ ‖X‖² dσ` with the integral in closed form.
    fn time_integral(&self, tau: f64, pref: f64) -> f64 {
        let u2 = self.u.norm_squared();
        let v2 = self.v.norm_squared();
        let uv = self.u.dot(&self.v);
        match self.class {
            EnergyClass::Elliptic => {
                pref * (0.5 * (u2 + v2) * tau
                    + 0.25 * (u2 - v2) * (2.0 * tau).sin()
                    + 0.5 * uv * (1.0 - (2.0 * tau).cos()))
            }
            EnergyClass::Parabolic => u2 * tau + uv * tau * tau + tau.powi(3) / 6.0,
            EnergyClass::Hyperbolic => {
                pref * (0.5 * (u2 - v2) * tau
                    + 0.25 * (u2 + v2) * (2.0 * tau).sinh()
                    + 0.5 * uv * ((2.0 * tau).cosh() - 1.0))
            }
        }
    }

    /// Physical elapsed time from `τ = 0` to `τ`, strictly increasing in `τ`
    /// for non-colliding trajectories.
    pub fn time_law(&self, tau: f64) -> Result<f64, Error> {
        let pref = self.prefactor()?;
        Ok(self.time_integral(tau, pref))
    }

    /// Solve `time_law(τ) = t` for `τ`.
    ///
    /// Colliding specifications are refused ([`Error::CollidingSpec`]): there
    /// `dt/dτ` vanishes at the collision and the inverse is ill-posed.  For
    /// the rest, `t(τ)` is a strictly increasing bijection of ℝ, found by
    /// doubling out a bracket and polishing with bisection-safeguarded Newton
    /// until `|t(τ) − t| ≤` [`tol::TOL_TIME`]`·max(1, |t|)`.
    pub fn invert_time(&self, t: f64) -> Result<f64, Error> {
        if self.colliding() {
            return Err(Error::CollidingSpec);
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        let pref = self.prefactor()?;
        let target_tol = tol::TOL_TIME * t.abs().max(1.0);
        let f = |tau: f64| self.time_integral(tau, pref) - t;

        let mut iters = 0usize;
        let budget = |iters: &mut usize| -> Result<(), Error> {
            *iters += 1;
            if *iters > tol::TIME_MAX_ITER {
                Err(Error::NoConvergence { iters: *iters })
            } else {
                Ok(())
            }
        };

        // Bracket the root by doubling away from τ = 0 in the sign of t.
        let (mut lo, mut hi) = (0.0f64, 0.0f64);
        if t >= 0.0 {
            hi = 1.0;
            while f(hi) < 0.0 {
                budget(&mut iters)?;
                lo = hi;
                hi *= 2.0;
            }
        } else {
            lo = -1.0;
            while f(lo) > 0.0 {
                budget(&mut iters)?;
                hi = lo;
                lo *= 2.0;
            }
        }

        let mut tau = 0.5 * (lo + hi);
        loop {
            budget(&mut iters)?;
            let residual = f(tau);
            if residual.abs() <= target_tol {
                return Ok(tau);
            }
            if residual > 0.0 {
                hi = tau;
            } else {
                lo = tau;
            }
            let slope = pref * self.radius_sq(tau);
            let newton = tau - residual / slope;
            tau = if slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
    }

    /// Rewrite a parabolic specification in the physical gauge `‖v‖² = 1/2`.
    ///
    /// Returns the rescaled specification together with the fictitious-time
    /// scale `s = √2·‖v‖`, so that `canonical.position_up(s·τ) ==
    /// self.position_up(τ)` exactly.  Elliptic and hyperbolic specifications
    /// have no gauge freedom and come back unchanged with `s = 1`.
    pub fn canonicalize(&self) -> Result<(TrajectorySpec, f64), Error> {
        if self.class != EnergyClass::Parabolic {
            return Ok((self.clone(), 1.0));
        }
        let norm = self.v.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let scale = 2f64.sqrt() * norm;
        let spec = TrajectorySpec {
            class: EnergyClass::Parabolic,
            u: self.u.clone(),
            v: &self.v / scale,
        };
        Ok((spec, scale))
    }

    /// Phase state `(X, Ẋ)` at fictitious time `τ`, with `Ẋ = dX/dt` in
    /// *physical* time: `Ẋ = X′(τ) / (pref·‖X‖²)`.
    pub fn phase_state(&self, tau: f64) -> Result<RegState, Error> {
        let pref = self.prefactor()?;
        let x = self.position_up(tau);
        let r2 = x.norm_squared();
        if r2.sqrt() < tol::TOL_ORIGIN {
            return Err(Error::Collision { tau });
        }
        let xdot = self.velocity_up(tau) / (pref * r2);
        RegState::new(x, xdot)
    }

    /// Reconstruct the trajectory through a phase state, anchored so that the
    /// state sits at `τ = 0` of the result.
    ///
    /// The class comes from the conserved energy (dead band
    /// [`tol::EPS_ENERGY`] around zero), then `u = X` and `v = Ẋ·pref·‖X‖²`
    /// inverts the phase-state formula.  In the parabolic case `v` is snapped
    /// onto the gauge sphere `‖v‖² = 1/2` (it already lies within the energy
    /// dead band of it).
    pub fn spec_from_state(s: &RegState) -> Result<TrajectorySpec, Error> {
        let e = regularization::energy_reg(s);
        let class = EnergyClass::from_energy(e);
        let pref = match class {
            EnergyClass::Elliptic => (2.0 / -e).sqrt(),
            EnergyClass::Parabolic => 1.0,
            EnergyClass::Hyperbolic => (2.0 / e).sqrt(),
        };
        let u = s.x().clone();
        let mut v = s.xdot() * (pref * s.x().norm_squared());
        if class == EnergyClass::Parabolic {
            let norm = v.norm();
            if norm > tol::TOL_ORIGIN {
                v /= 2f64.sqrt() * norm;
            }
        }
        TrajectorySpec::new(class, u, v)
    }
}

// ───────────────────────── Tests ─────────────────────────
