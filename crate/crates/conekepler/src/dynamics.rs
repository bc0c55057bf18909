//! Independent numerical integration, used as an oracle against the closed
//! forms in [`crate::trajectories`].
//!
//! Two routes are provided.  [`integrate_physical`] solves the equations of
//! motion upstairs in *physical* time,
//!
//! ```text
//! Ẋ = V,   V̇ = Ẽ·X/(2‖X‖⁴) − (2(X·V)/‖X‖²)·V,
//! ```
//!
//! where the conserved energy `Ẽ` is evaluated once at the initial state and
//! then treated as a parameter; along exact solutions the field coincides
//! with the Euler–Lagrange equation of `2X²Ẋ² + 1/X²`, and the drift of
//! `Ẽ` ([`energy_drift`]) is a direct measurement of integrator error.
//! [`integrate_fictitious`] solves the linear fictitious-time systems
//! `X″ = −X / 0 / +X` together with the quadrature `t′ = pref·‖X‖²` for the
//! physical clock.
//!
//! Both use an embedded Dormand–Prince 5(4) pair with the standard
//! proportional–integral step controller.  Requested output times are hit
//! exactly by clamping steps, so traces need no interpolation.

use nalgebra::DVector;
use thiserror::Error as ThisError;

use crate::error::Error;
use crate::regularization::{self, RegState};
use crate::tol;
use crate::trajectories::EnergyClass;

/// Adaptive step-size control parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    /// Relative tolerance per component.
    pub rtol: f64,
    /// Absolute tolerance per component.
    pub atol: f64,
    /// Hard cap on the step magnitude (independent-variable units).
    pub max_step: f64,
    /// Total step-attempt budget for one call.
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { rtol: 1e-10, atol: 1e-12, max_step: f64::INFINITY, max_steps: 10_000_000 }
    }
}

impl IntegratorConfig {
    /// Reject non-positive tolerances, step caps, or budgets.
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.rtol > 0.0) || !(self.atol > 0.0) {
            return Err(Error::InvalidConfig("rtol and atol must be positive"));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidConfig("max_step must be positive"));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be positive"));
        }
        Ok(())
    }
}

/// Failure modes of an integration run.
#[derive(Debug, Clone, ThisError)]
pub enum IntegrationError {
    /// The trajectory ran into the collision singularity; carries the partial
    /// trace up to and including the last accepted state.
    #[error("collision singularity reached at t = {t}")]
    Singularity { t: f64, trace: Vec<(f64, RegState)> },
    /// The step budget was exhausted before reaching the end of the span.
    #[error("step budget exhausted after {steps} steps at t = {t}")]
    Budget { t: f64, steps: usize },
    /// Invalid input or configuration.
    #[error(transparent)]
    Core(#[from] Error),
}

/// One record of a fictitious-time run: `τ`, `X(τ)`, `dX/dτ`, and the
/// physical time accumulated by quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct FictitiousSample {
    pub tau: f64,
    pub x: DVector<f64>,
    pub xdot: DVector<f64>,
    pub t: f64,
}

// Dormand–Prince 5(4) tableau.  The last row of `A` doubles as the 5th-order
// weights (first-same-as-last), and `E` holds the difference between the
// 5th- and 4th-order weights, so `h·Σ Eᵢkᵢ` is the embedded error estimate.
const A: [&[f64]; 7] = [
    &[],
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
    &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

enum FailKind {
    Singular,
    Budget,
}

struct RawFailure {
    kind: FailKind,
    t: f64,
    steps: usize,
    trace: Vec<(f64, DVector<f64>)>,
}

/// Generic driver for an autonomous system.  `guard` returns `true` inside
/// the forbidden region (collision); `eval = None` records every accepted
/// step, `eval = Some(times)` records exactly the requested times, which must
/// lie inside the span and be ordered in the direction of integration.
fn drive<R, G>(
    rhs: R,
    guard: G,
    span: (f64, f64),
    y0: DVector<f64>,
    h0: f64,
    cfg: &IntegratorConfig,
    eval: Option<&[f64]>,
) -> Result<Vec<(f64, DVector<f64>)>, RawFailure>
where
    R: Fn(&DVector<f64>) -> DVector<f64>,
    G: Fn(&DVector<f64>) -> bool,
{
    let (t0, t1) = span;
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span_len = (t1 - t0).abs();
    let dim = y0.len();

    let mut t = t0;
    let mut y = y0;
    let mut out: Vec<(f64, DVector<f64>)> = Vec::new();
    let mut eval_idx = 0usize;

    // Emit everything due at or behind the current time.
    let emit = |t: f64, y: &DVector<f64>, eval_idx: &mut usize, out: &mut Vec<(f64, DVector<f64>)>| {
        match eval {
            None => out.push((t, y.clone())),
            Some(times) => {
                while *eval_idx < times.len() && (times[*eval_idx] - t) * dir <= 0.0 {
                    out.push((times[*eval_idx], y.clone()));
                    *eval_idx += 1;
                }
            }
        }
    };

    if guard(&y) {
        return Err(RawFailure { kind: FailKind::Singular, t, steps: 0, trace: vec![(t, y)] });
    }
    emit(t, &y, &mut eval_idx, &mut out);
    if span_len == 0.0 {
        return Ok(out);
    }

    let mut h = h0.abs().min(cfg.max_step).min(span_len).max(span_len * tol::MIN_STEP_FRACTION);
    let mut k: Vec<DVector<f64>> = Vec::with_capacity(7);
    k.push(rhs(&y));
    let mut facold: f64 = 1e-4;
    let mut steps = 0usize;

    while (t1 - t) * dir > 0.0 {
        steps += 1;
        if steps > cfg.max_steps {
            return Err(RawFailure { kind: FailKind::Budget, t, steps, trace: out });
        }

        if h < span_len * tol::MIN_STEP_FRACTION {
            let mut trace = out;
            if trace.last().map_or(true, |(tt, _)| *tt != t) {
                trace.push((t, y.clone()));
            }
            return Err(RawFailure { kind: FailKind::Singular, t, steps, trace });
        }

        // Clamp the attempt so output times and the span end are hit exactly;
        // stretching the final step by up to 1% avoids a rounding sliver.
        let mut h_att = h;
        let mut landing = None;
        if h_att * 1.01 >= (t1 - t) * dir {
            h_att = (t1 - t) * dir;
            landing = Some(t1);
        }
        if let Some(times) = eval {
            if eval_idx < times.len() {
                let ahead = (times[eval_idx] - t) * dir;
                if ahead >= 0.0 && h_att >= ahead {
                    h_att = ahead;
                    landing = Some(times[eval_idx]);
                }
            }
        }
        let hs = h_att * dir;

        k.truncate(1);
        for row in &A[1..6] {
            let mut stage = y.clone();
            for (j, &a) in row.iter().enumerate() {
                stage.axpy(hs * a, &k[j], 1.0);
            }
            k.push(rhs(&stage));
        }
        let mut y_new = y.clone();
        for (j, &a) in A[6].iter().enumerate() {
            y_new.axpy(hs * a, &k[j], 1.0);
        }
        k.push(rhs(&y_new));

        // Per-step weights sit at a quarter of the requested tolerances:
        // local truncation errors accumulate over a span, and this margin
        // keeps invariant drift within an order of magnitude of rtol.
        let mut acc = 0.0;
        for i in 0..dim {
            let mut est = 0.0;
            for (j, &e) in E.iter().enumerate() {
                est += e * k[j][i];
            }
            let sc = 0.25 * (cfg.atol + cfg.rtol * y[i].abs().max(y_new[i].abs()));
            acc += (hs * est / sc).powi(2);
        }
        let err = (acc / dim as f64).sqrt();

        if err <= 1.0 {
            t = landing.unwrap_or(t + hs);
            y = y_new;
            let k_last = k.pop().expect("seven stages");
            k.truncate(1);
            k[0] = k_last;
            if guard(&y) {
                let mut trace = out;
                trace.push((t, y));
                return Err(RawFailure { kind: FailKind::Singular, t, steps, trace });
            }
            emit(t, &y, &mut eval_idx, &mut out);
            let fac = (err.powf(0.17) / facold.powf(0.04) / 0.9).clamp(0.1, 5.0);
            h = (h_att / fac).min(cfg.max_step);
            facold = err.max(1e-4);
        } else {
            k.truncate(1);
            let fac = (err.powf(0.17) / 0.9).min(5.0);
            h = h_att / fac;
            if h < span_len * tol::MIN_STEP_FRACTION {
                let mut trace = out;
                if trace.last().map_or(true, |(tt, _)| *tt != t) {
                    trace.push((t, y.clone()));
                }
                return Err(RawFailure { kind: FailKind::Singular, t, steps, trace });
            }
        }
    }
    Ok(out)
}

/// Integrate the physical-time equations of motion from `s0` across
/// `t_span`.  With `t_eval = None` every accepted step is recorded;
/// otherwise exactly the requested times are.  The conserved energy is
/// frozen at its initial value, making [`energy_drift`] an error meter.
pub fn integrate_physical(
    s0: &RegState,
    t_span: (f64, f64),
    t_eval: Option<&[f64]>,
    cfg: &IntegratorConfig,
) -> Result<Vec<(f64, RegState)>, IntegrationError> {
    cfg.validate()?;
    let n = s0.n();
    let e0 = regularization::energy_reg(s0);

    let mut y0 = DVector::zeros(2 * n);
    y0.rows_mut(0, n).copy_from(s0.x());
    y0.rows_mut(n, n).copy_from(s0.xdot());

    let rhs = move |y: &DVector<f64>| {
        let x = y.rows(0, n);
        let v = y.rows(n, n);
        let r2 = x.norm_squared();
        let cx = e0 / (2.0 * r2 * r2);
        let cv = -2.0 * x.dot(&v) / r2;
        let mut dy = DVector::zeros(2 * n);
        for i in 0..n {
            dy[i] = v[i];
            dy[n + i] = cx * x[i] + cv * v[i];
        }
        dy
    };
    let guard = move |y: &DVector<f64>| y.rows(0, n).norm_squared() < tol::COLLISION_RADIUS_SQ;

    // Characteristic time: ‖X‖² is the natural clock of the problem (the
    // fictitious-time substitution divides by it).
    let speed = s0.xdot().norm();
    let h0 = if speed > 0.0 { (0.01 * s0.x().norm_squared() / speed).min(1.0) } else { 1.0 };

    let to_states = |raw: Vec<(f64, DVector<f64>)>| -> Result<Vec<(f64, RegState)>, Error> {
        raw.into_iter()
            .map(|(t, y)| {
                let x = y.rows(0, n).clone_owned();
                let v = y.rows(n, n).clone_owned();
                RegState::new(x, v).map(|s| (t, s))
            })
            .collect()
    };

    match drive(rhs, guard, t_span, y0, h0, cfg, t_eval) {
        Ok(raw) => Ok(to_states(raw)?),
        Err(RawFailure { kind: FailKind::Budget, t, steps, .. }) => {
            Err(IntegrationError::Budget { t, steps })
        }
        Err(RawFailure { kind: FailKind::Singular, t, trace, .. }) => {
            // States this close to the puncture still satisfy the RegState
            // gate (the collision radius is far above it); keep what parses.
            let trace = trace
                .into_iter()
                .filter_map(|(t, y)| {
                    let x = y.rows(0, n).clone_owned();
                    let v = y.rows(n, n).clone_owned();
                    RegState::new(x, v).ok().map(|s| (t, s))
                })
                .collect();
            Err(IntegrationError::Singularity { t, trace })
        }
    }
}

/// Integrate the linear fictitious-time system of the given class with
/// initial data `X(0) = u`, `X′(0) = v`, accumulating physical time by the
/// quadrature `t′ = pref·‖X‖²`.
///
/// The parabolic rate uses the gauge-covariant prefactor `√2·‖v‖` (equal to
/// 1 in the physical gauge `‖v‖² = 1/2`), so the clock is correct for any
/// parametrization.
pub fn integrate_fictitious(
    class: EnergyClass,
    u: &DVector<f64>,
    v: &DVector<f64>,
    tau_span: (f64, f64),
    tau_eval: Option<&[f64]>,
    cfg: &IntegratorConfig,
) -> Result<Vec<FictitiousSample>, IntegrationError> {
    cfg.validate()?;
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch { expected: u.len(), got: v.len() }.into());
    }
    let n = u.len();
    let u2 = u.norm_squared();
    let v2 = v.norm_squared();
    let (sign, pref) = match class {
        EnergyClass::Elliptic => (-1.0, (2.0 * (u2 + v2)).sqrt()),
        EnergyClass::Parabolic => (0.0, 2f64.sqrt() * v2.sqrt()),
        EnergyClass::Hyperbolic => {
            if v2 <= u2 {
                return Err(Error::HyperbolicOrdering { u2, v2 }.into());
            }
            (1.0, (2.0 * (v2 - u2)).sqrt())
        }
    };

    let mut y0 = DVector::zeros(2 * n + 1);
    y0.rows_mut(0, n).copy_from(u);
    y0.rows_mut(n, n).copy_from(v);

    let rhs = move |y: &DVector<f64>| {
        let mut dy = DVector::zeros(2 * n + 1);
        for i in 0..n {
            dy[i] = y[n + i];
            dy[n + i] = sign * y[i];
        }
        dy[2 * n] = pref * y.rows(0, n).norm_squared();
        dy
    };

    let h0 = 1.0f64.min(cfg.max_step);
    match drive(rhs, |_| false, tau_span, y0, h0, cfg, tau_eval) {
        Ok(raw) => Ok(raw
            .into_iter()
            .map(|(tau, y)| FictitiousSample {
                tau,
                x: y.rows(0, n).clone_owned(),
                xdot: y.rows(n, n).clone_owned(),
                t: y[2 * n],
            })
            .collect()),
        Err(RawFailure { kind: FailKind::Budget, t, steps, .. }) => {
            Err(IntegrationError::Budget { t, steps })
        }
        Err(RawFailure { kind: FailKind::Singular, t, .. }) => {
            // No guard upstairs; only pathological step collapse lands here.
            Err(IntegrationError::Singularity { t, trace: Vec::new() })
        }
    }
}

/// Worst relative excursion of the conserved energy over a trace:
/// `max |Ẽ(sᵢ) − Ẽ(s₀)| / max(1, |Ẽ(s₀)|)`.
pub fn energy_drift(trace: &[(f64, RegState)]) -> Result<f64, Error> {
    let first = trace.first().ok_or(Error::TooFewPoints { got: 0, need: 1 })?;
    let e0 = regularization::energy_reg(&first.1);
    let scale = e0.abs().max(1.0);
    let mut worst = 0.0f64;
    for (_, s) in trace {
        worst = worst.max((regularization::energy_reg(s) - e0).abs() / scale);
    }
    Ok(worst)
}

// ───────────────────────── Tests ─────────────────────────

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::SymMatrix;
    use crate::regularization::q_map;
    use crate::trajectories::TrajectorySpec;
    use approx::assert_relative_eq;
    use nalgebra::dvector;
    use std::f64::consts::PI;

    fn linspace(a: f64, b: f64, m: usize) -> Vec<f64> {
        (0..m).map(|k| a + (b - a) * k as f64 / (m - 1) as f64).collect()
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::default().validate().is_ok());
        let bad = IntegratorConfig { rtol: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = IntegratorConfig { max_steps: 0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn circular_orbit_returns_to_antipode() {
        // (e₁, ½e₂) is the circular orbit: t = 2τ, so t = 2π is τ = π,
        // where the upstairs path sits at −e₁.
        let s0 = RegState::new(dvector![1.0, 0.0], dvector![0.0, 0.5]).unwrap();
        let out = integrate_physical(&s0, (0.0, 2.0 * PI), Some(&[2.0 * PI]), &Default::default())
            .unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0, 2.0 * PI);
        let err = (out[0].1.x() - dvector![-1.0, 0.0]).norm();
        assert!(err <= 1e-7, "endpoint error {err}");
    }

    #[test]
    fn parabolic_run_matches_closed_form() {
        let s0 = RegState::new(dvector![1.0, 0.0], dvector![0.0, 1.0 / 2f64.sqrt()]).unwrap();
        // t(1) = 1 + 1/6 for the normalized parabolic spec.
        let out =
            integrate_physical(&s0, (0.0, 7.0 / 6.0), Some(&[7.0 / 6.0]), &Default::default())
                .unwrap();
        let expected = dvector![1.0, 1.0 / 2f64.sqrt()];
        let err = (out[0].1.x() - expected).norm();
        assert!(err <= 1e-7, "endpoint error {err}");
    }

    #[test]
    fn radial_infall_is_reported_as_singular() {
        // (e₁, 0) falls straight into the tip; collapse time √2·π/4.
        let s0 = RegState::new(dvector![1.0, 0.0], dvector![0.0, 0.0]).unwrap();
        match integrate_physical(&s0, (0.0, 2.0), None, &Default::default()) {
            Err(IntegrationError::Singularity { t, trace }) => {
                let collapse = 2f64.sqrt() * PI / 4.0;
                assert!((t - collapse).abs() <= 1e-2, "singular time {t} vs {collapse}");
                assert!(!trace.is_empty());
                let (t_last, _) = trace.last().unwrap();
                assert!(*t_last <= collapse);
            }
            other => panic!("expected singularity, got {other:?}"),
        }
    }

    #[test]
    fn budget_is_enforced() {
        let s0 = RegState::new(dvector![1.0, 0.0], dvector![0.0, 0.5]).unwrap();
        let cfg = IntegratorConfig { max_steps: 3, ..Default::default() };
        assert!(matches!(
            integrate_physical(&s0, (0.0, 2.0 * PI), None, &cfg),
            Err(IntegrationError::Budget { .. })
        ));
    }

    #[test]
    fn eval_grid_is_hit_exactly() {
        let s0 = RegState::new(dvector![1.0, 0.0], dvector![0.0, 0.5]).unwrap();
        let grid = linspace(0.0, 3.0, 17);
        let out = integrate_physical(&s0, (0.0, 3.0), Some(&grid), &Default::default()).unwrap();
        assert_eq!(out.len(), grid.len());
        for (sample, want) in out.iter().zip(&grid) {
            assert_eq!(sample.0, *want);
        }
    }

    #[test]
    fn fictitious_exact_solutions() {
        let cfg = IntegratorConfig::default();
        let u = dvector![1.0, 0.0];
        let v = dvector![0.0, 1.0];
        let out =
            integrate_fictitious(EnergyClass::Elliptic, &u, &v, (0.0, PI), Some(&[PI]), &cfg)
                .unwrap();
        assert!((&out[0].x - dvector![-1.0, 0.0]).norm() <= 1e-10);

        let u = dvector![0.3, -0.7, 1.1];
        let v = dvector![0.5, 0.2, -0.4];
        let out =
            integrate_fictitious(EnergyClass::Parabolic, &u, &v, (0.0, 1.0), Some(&[1.0]), &cfg)
                .unwrap();
        assert!((&out[0].x - (&u + &v)).norm() <= 1e-12);

        let u = dvector![0.5, 0.0];
        let v = dvector![0.0, 1.0];
        let out =
            integrate_fictitious(EnergyClass::Hyperbolic, &u, &v, (0.0, 1.0), Some(&[1.0]), &cfg)
                .unwrap();
        let exact = &u * 1f64.cosh() + &v * 1f64.sinh();
        assert!((&out[0].x - exact).norm() <= 1e-10);
    }

    #[test]
    fn fictitious_clock_matches_time_law() {
        let mut rng = crate::sampling::rng_for(41, 0);
        let cfg = IntegratorConfig::default();
        for trial in 0..15 {
            let class =
                [EnergyClass::Elliptic, EnergyClass::Parabolic, EnergyClass::Hyperbolic][trial % 3];
            let s = crate::sampling::spec(&mut rng, 3, class);
            let out = integrate_fictitious(class, s.u(), s.v(), (0.0, 1.5), Some(&[1.5]), &cfg)
                .unwrap();
            let exact = s.time_law(1.5).unwrap();
            assert_relative_eq!(out[0].t, exact, max_relative = 1e-8, epsilon = 1e-10);
        }
    }

    #[test]
    fn physical_integration_tracks_the_pushed_down_closed_form() {
        let mut rng = crate::sampling::rng_for(42, 0);
        let cfg = IntegratorConfig::default();
        for trial in 0..12 {
            let class =
                [EnergyClass::Elliptic, EnergyClass::Parabolic, EnergyClass::Hyperbolic][trial % 3];
            let s = crate::sampling::spec(&mut rng, 3, class);
            let s0 = s.phase_state(0.0).unwrap();
            let t_end = s.time_law(1.2).unwrap();
            let grid = linspace(0.0, t_end, 9);
            let out = integrate_physical(&s0, (0.0, t_end), Some(&grid), &cfg).unwrap();
            for (t, state) in &out {
                let tau = s.invert_time(*t).unwrap();
                let closed = s.position_down(tau).unwrap();
                let numeric = q_map(state.x()).unwrap();
                let rel = (closed.base() - numeric.base()).norm() / closed.base().norm();
                assert!(rel <= 1e-6, "pushdown mismatch {rel} at t = {t}");
            }
        }
    }

    #[test]
    fn energy_drift_behaviour() {
        assert!(matches!(energy_drift(&[]), Err(Error::TooFewPoints { .. })));

        let s = RegState::new(dvector![1.0, 0.0], dvector![0.0, 0.5]).unwrap();
        let constant = vec![(0.0, s.clone()), (1.0, s.clone())];
        assert_eq!(energy_drift(&constant).unwrap(), 0.0);

        let tight = integrate_physical(&s, (0.0, 2.0 * PI), None, &Default::default()).unwrap();
        let drift_tight = energy_drift(&tight).unwrap();
        assert!(drift_tight <= 1e-8, "tight drift {drift_tight}");

        let loose_cfg = IntegratorConfig { rtol: 1e-3, atol: 1e-5, ..Default::default() };
        let loose = integrate_physical(&s, (0.0, 2.0 * PI), None, &loose_cfg).unwrap();
        let drift_loose = energy_drift(&loose).unwrap();
        assert!(
            drift_loose > drift_tight,
            "loose {drift_loose} should exceed tight {drift_tight}"
        );
    }

    #[test]
    fn drift_stays_within_tolerance_budget() {
        let mut rng = crate::sampling::rng_for(43, 0);
        for trial in 0..12 {
            let class =
                [EnergyClass::Elliptic, EnergyClass::Parabolic, EnergyClass::Hyperbolic][trial % 3];
            let s = crate::sampling::spec(&mut rng, 4, class);
            let s0 = s.phase_state(-0.4).unwrap();
            let t_end = s.time_law(1.0).unwrap() - s.time_law(-0.4).unwrap();
            let cfg = IntegratorConfig::default();
            let out = integrate_physical(&s0, (0.0, t_end), None, &cfg).unwrap();
            let drift = energy_drift(&out).unwrap();
            assert!(drift <= 10.0 * cfg.rtol, "drift {drift} exceeds 10·rtol");
        }
    }

    #[test]
    fn fixed_step_convergence_is_fifth_order() {
        // Loose tolerances make every step land on max_step, so the run is a
        // fixed-step one; the endpoint error of the harmonic system then
        // scales as h⁵.
        let u = dvector![1.0, 0.0];
        let v = dvector![0.0, 1.0];
        let mut logs: Vec<(f64, f64)> = Vec::new();
        for k in [16usize, 32, 64, 128] {
            let h = PI / k as f64;
            let cfg =
                IntegratorConfig { rtol: 1.0, atol: 1.0, max_step: h, max_steps: 1_000_000 };
            let out =
                integrate_fictitious(EnergyClass::Elliptic, &u, &v, (0.0, PI), Some(&[PI]), &cfg)
                    .unwrap();
            let err = (&out[0].x - dvector![-1.0, 0.0]).norm();
            logs.push((h.ln(), err.ln()));
        }
        let m = logs.len() as f64;
        let sx: f64 = logs.iter().map(|p| p.0).sum::<f64>() / m;
        let sy: f64 = logs.iter().map(|p| p.1).sum::<f64>() / m;
        let slope: f64 = logs.iter().map(|p| (p.0 - sx) * (p.1 - sy)).sum::<f64>()
            / logs.iter().map(|p| (p.0 - sx).powi(2)).sum::<f64>();
        assert!((slope - 5.0).abs() <= 0.5, "measured order {slope}");
    }

    #[test]
    fn backward_integration_works() {
        let s = TrajectorySpec::new(
            EnergyClass::Elliptic,
            dvector![1.0, 0.0],
            dvector![0.0, 1.0],
        )
        .unwrap();
        let s0 = s.phase_state(0.5).unwrap();
        let t_half = s.time_law(0.5).unwrap();
        let out =
            integrate_physical(&s0, (0.0, -t_half), Some(&[-t_half]), &Default::default())
                .unwrap();
        let err = (out[0].1.x() - s.position_up(0.0)).norm();
        assert!(err <= 1e-7, "backward endpoint error {err}");
    }

    #[test]
    fn sym_matrix_norms_used_in_comparisons_are_frobenius() {
        // Guard against accidental metric changes in the oracle comparisons.
        let m = SymMatrix::from_upper(2, |i, j| if i == j { 1.0 } else { 2.0 });
        assert_relative_eq!(m.norm(), (1.0f64 + 1.0 + 4.0 + 4.0).sqrt(), max_relative = 1e-15);
    }
}
