//! Seeded, reproducible property suites over the whole library.
//!
//! Every property draws its inputs from [`crate::sampling::rng_for`]`(seed ^
//! salt, trial)` with a fixed per-property salt, so a suite run is
//! deterministic for a given seed, individual trials can be replayed in
//! isolation, and trials could be evaluated concurrently and merged in any
//! order without changing the outcome.
//!
//! A property reports the *worst* residual it observed together with its
//! gate; `worst ≤ tolerance` is a pass.  Residuals are defined so that
//! smaller is better, and scale-aware denominators (`1 + ‖·‖`) are used
//! where inputs are unbounded.

use std::fmt;
use std::str::FromStr;

use crate::dynamics::{self, IntegratorConfig};
use crate::error::Error;
use crate::geometry;
use crate::jordan;
use crate::regularization;
use crate::sampling;
use crate::trajectories::{EnergyClass, TrajectorySpec};

/// Which module's invariants to exercise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Jordan,
    Regularization,
    Trajectories,
    Dynamics,
    Geometry,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "jordan" => Ok(Suite::Jordan),
            "regularization" => Ok(Suite::Regularization),
            "trajectories" => Ok(Suite::Trajectories),
            "dynamics" => Ok(Suite::Dynamics),
            "geometry" => Ok(Suite::Geometry),
            "all" => Ok(Suite::All),
            _ => Err(Error::InvalidConfig(
                "suite must be one of jordan, regularization, trajectories, dynamics, geometry, all",
            )),
        }
    }
}

/// Outcome of one property over all its trials.
#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub name: &'static str,
    pub passed: bool,
    pub worst: f64,
    pub tolerance: f64,
    pub trials: usize,
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} worst={:.3e} tolerance={:.3e} trials={}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.worst,
            self.tolerance,
            self.trials
        )
    }
}

const CLASSES: [EnergyClass; 3] =
    [EnergyClass::Elliptic, EnergyClass::Parabolic, EnergyClass::Hyperbolic];
const DIMS: [usize; 4] = [2, 3, 5, 8];

fn property<F>(
    name: &'static str,
    tolerance: f64,
    trials: usize,
    seed: u64,
    salt: u64,
    mut trial_residual: F,
) -> PropertyReport
where
    F: FnMut(&mut rand_chacha::ChaCha8Rng, usize) -> f64,
{
    let mut worst = 0.0f64;
    for trial in 0..trials {
        let mut rng = sampling::rng_for(seed ^ salt, trial as u64);
        worst = worst.max(trial_residual(&mut rng, trial));
    }
    PropertyReport { name, passed: worst <= tolerance, worst, tolerance, trials }
}

/// Run one suite (or all of them) and return one report per property.
pub fn run_suite(suite: Suite, trials: usize, seed: u64) -> Vec<PropertyReport> {
    match suite {
        Suite::Jordan => jordan_suite(trials, seed),
        Suite::Regularization => regularization_suite(trials, seed),
        Suite::Trajectories => trajectories_suite(trials, seed),
        Suite::Dynamics => dynamics_suite(trials, seed),
        Suite::Geometry => geometry_suite(trials, seed),
        Suite::All => {
            let mut all = jordan_suite(trials, seed);
            all.extend(regularization_suite(trials, seed));
            all.extend(trajectories_suite(trials, seed));
            all.extend(dynamics_suite(trials, seed));
            all.extend(geometry_suite(trials, seed));
            all
        }
    }
}

fn jordan_suite(trials: usize, seed: u64) -> Vec<PropertyReport> {
    vec![
        property("trace-form-associativity", 1e-12, trials, seed, 0x1a2b_3c4d_5e6f_0001, |rng, k| {
            let n = DIMS[k % DIMS.len()];
            let u = sampling::sym_matrix(rng, n);
            let v = sampling::sym_matrix(rng, n);
            let w = sampling::sym_matrix(rng, n);
            let lhs = jordan::trace_inner(&jordan::jordan_product(&u, &v).unwrap(), &w).unwrap();
            let rhs = jordan::trace_inner(&v, &jordan::jordan_product(&u, &w).unwrap()).unwrap();
            (lhs - rhs).abs() / (1.0 + u.norm() * v.norm() * w.norm())
        }),
        property("range-projection-idempotent", 1e-12, trials, seed, 0x1a2b_3c4d_5e6f_0002, |rng, k| {
            let n = DIMS[k % DIMS.len()];
            let x = sampling::cone_point(rng, n);
            let w = sampling::sym_matrix(rng, n);
            let p1 = jordan::range_project(&x, &w).unwrap();
            let p2 = jordan::range_project(&x, &p1).unwrap();
            (&p2 - &p1).norm() / (1.0 + w.norm())
        }),
        property("restricted-inverse-solves", 1e-10, trials, seed, 0x1a2b_3c4d_5e6f_0003, |rng, k| {
            let n = DIMS[k % DIMS.len()];
            let x = sampling::cone_point(rng, n);
            let v = sampling::tangent_at(rng, &x);
            let w = jordan::restricted_inverse(&x, &v).unwrap();
            let back = jordan::jordan_product(x.base(), w.dir()).unwrap();
            (&back - v.dir()).norm() / (1.0 + v.dir().norm())
        }),
        property("covering-lands-on-cone", 1e-12, trials, seed, 0x1a2b_3c4d_5e6f_0004, |rng, k| {
            let n = DIMS[k % DIMS.len()];
            let x = sampling::gaussian_vector(rng, n);
            let image = regularization::q_map(&x).unwrap();
            jordan::cone_residual(image.base()) / image.trace().powi(2)
        }),
    ]
}

fn regularization_suite(trials: usize, seed: u64) -> Vec<PropertyReport> {
    vec![
        property("pullback-lagrangian", 1e-10, trials, seed, 0x2b3c_4d5e_6f70_0001, |rng, k| {
            let n = DIMS[k % DIMS.len()];
            let s = sampling::reg_state(rng, n);
            let v = regularization::tangent_q(&s).unwrap();
            let downstairs = jordan::lagrangian(&v);
            let upstairs = regularization::lagrangian_reg(&s);
            (downstairs - upstairs).abs() / upstairs.abs().max(1.0)
        }),
        property("pullback-energy", 1e-10, trials, seed, 0x2b3c_4d5e_6f70_0002, |rng, k| {
            let n = DIMS[k % DIMS.len()];
            let s = sampling::reg_state(rng, n);
            let v = regularization::tangent_q(&s).unwrap();
            let downstairs = jordan::energy(&v);
            let upstairs = regularization::energy_reg(&s);
            (downstairs - upstairs).abs() / upstairs.abs().max(1.0)
        }),
        property("velocity-trace-identity", 1e-10, trials, seed, 0x2b3c_4d5e_6f70_0003, |rng, k| {
            let n = DIMS[k % DIMS.len()];
            let s = sampling::reg_state(rng, n);
            regularization::velocity_trace_identity_check(&s).unwrap()
        }),
        property("deck-symmetry-exact", 0.0, trials, seed, 0x2b3c_4d5e_6f70_0004, |rng, k| {
            let n = DIMS[k % DIMS.len()];
            let x = sampling::gaussian_vector(rng, n);
            let plus = regularization::q_map(&x).unwrap();
            let minus = regularization::q_map(&(-&x)).unwrap();
            (plus.base() - minus.base()).norm()
        }),
        property("lift-section", 1e-12, trials, seed, 0x2b3c_4d5e_6f70_0005, |rng, k| {
            let n = DIMS[k % DIMS.len()];
            let x = sampling::unit_vector(rng, n) * 10f64.powf(rng_range(rng, -2.0, 2.0));
            let image = regularization::q_map(&x).unwrap();
            let (a, b) = regularization::lift(&image);
            (&a - &x).norm().min((&b - &x).norm()) / x.norm()
        }),
    ]
}

fn trajectories_suite(trials: usize, seed: u64) -> Vec<PropertyReport> {
    vec![
        property("closed-form-energy", 1e-10, trials, seed, 0x3c4d_5e6f_7081_0001, |rng, k| {
            let class = CLASSES[k % 3];
            let s = sampling::spec(rng, DIMS[k % DIMS.len()], class);
            let tau = rng_range(rng, -2.0, 2.0);
            let state = s.phase_state(tau).unwrap();
            let e = regularization::energy_reg(&state);
            (e - s.energy_of()).abs() / s.energy_of().abs().max(1.0)
        }),
        property("time-inversion-identity", 1e-10, trials, seed, 0x3c4d_5e6f_7081_0002, |rng, k| {
            let class = CLASSES[k % 3];
            let s = sampling::spec(rng, 3, class);
            let tau = rng_range(rng, -10.0, 10.0);
            let t = s.time_law(tau).unwrap();
            let back = s.time_law(s.invert_time(t).unwrap()).unwrap();
            (back - t).abs() / t.abs().max(1.0)
        }),
        property("clock-strictly-monotone", 0.0, trials, seed, 0x3c4d_5e6f_7081_0003, |rng, k| {
            let class = CLASSES[k % 3];
            let s = sampling::spec(rng, 4, class);
            let mut worst = f64::NEG_INFINITY;
            let mut prev = s.time_law(-3.0).unwrap();
            for j in 1..=60 {
                let t = s.time_law(-3.0 + 6.0 * j as f64 / 60.0).unwrap();
                worst = worst.max(prev - t);
                prev = t;
            }
            worst
        }),
        property("state-roundtrip", 1e-9, trials, seed, 0x3c4d_5e6f_7081_0004, |rng, k| {
            let class = CLASSES[k % 3];
            let s = sampling::spec(rng, 3, class);
            let tau0 = rng_range(rng, -1.5, 1.5);
            let rebuilt = TrajectorySpec::spec_from_state(&s.phase_state(tau0).unwrap()).unwrap();
            let mut worst = 0.0f64;
            for j in 0..8 {
                let sigma = -1.0 + 2.0 * j as f64 / 7.0;
                let a = rebuilt.position_up(sigma);
                let b = s.position_up(tau0 + sigma);
                worst = worst.max((a - &b).norm() / (1.0 + b.norm()));
            }
            worst
        }),
        property("deck-periodicity", 1e-12, trials, seed, 0x3c4d_5e6f_7081_0005, |rng, _| {
            let s = sampling::spec(rng, 3, EnergyClass::Elliptic);
            let mut worst = 0.0f64;
            for j in 0..12 {
                let tau = -3.0 + 6.0 * j as f64 / 11.0;
                let a = s.position_down(tau).unwrap();
                let b = s.position_down(tau + std::f64::consts::PI).unwrap();
                worst = worst.max((a.base() - b.base()).norm() / (1.0 + a.base().norm()));
            }
            worst
        }),
    ]
}

fn dynamics_suite(trials: usize, seed: u64) -> Vec<PropertyReport> {
    let cfg = IntegratorConfig::default();
    let mut reports = vec![
        property("closed-form-oracle", 1e-6, trials, seed, 0x4d5e_6f70_8192_0001, |rng, k| {
            let class = CLASSES[k % 3];
            let s = sampling::spec(rng, 3, class);
            let s0 = s.phase_state(0.0).unwrap();
            let t_end = s.time_law(1.2).unwrap();
            let grid: Vec<f64> = (0..=8).map(|j| t_end * j as f64 / 8.0).collect();
            let cfg = IntegratorConfig::default();
            let out = dynamics::integrate_physical(&s0, (0.0, t_end), Some(&grid), &cfg).unwrap();
            let mut worst = 0.0f64;
            for (t, state) in &out {
                let tau = s.invert_time(*t).unwrap();
                let closed = s.position_down(tau).unwrap();
                let numeric = regularization::q_map(state.x()).unwrap();
                worst =
                    worst.max((closed.base() - numeric.base()).norm() / closed.base().norm());
            }
            worst
        }),
        property("energy-drift-budget", 1e-9, trials, seed, 0x4d5e_6f70_8192_0002, |rng, k| {
            let class = CLASSES[k % 3];
            let s = sampling::spec(rng, 3, class);
            let s0 = s.phase_state(-0.3).unwrap();
            let t_end = s.time_law(1.0).unwrap() - s.time_law(-0.3).unwrap();
            let cfg = IntegratorConfig::default();
            let out = dynamics::integrate_physical(&s0, (0.0, t_end), None, &cfg).unwrap();
            dynamics::energy_drift(&out).unwrap()
        }),
        property("fictitious-endpoint", 1e-8, trials, seed, 0x4d5e_6f70_8192_0003, |rng, k| {
            let class = CLASSES[k % 3];
            let s = sampling::spec(rng, 3, class);
            let cfg = IntegratorConfig::default();
            let out = dynamics::integrate_fictitious(
                class,
                s.u(),
                s.v(),
                (0.0, 1.5),
                Some(&[1.5]),
                &cfg,
            )
            .unwrap();
            let exact = s.position_up(1.5);
            (&out[0].x - &exact).norm() / (1.0 + exact.norm())
        }),
    ];
    reports.push(order_estimate_report(&cfg));
    reports
}

/// Fixed-step convergence study on the harmonic fictitious system: the
/// log-log slope of endpoint error against step size should sit at the
/// method's order, 5 ± 0.5.
fn order_estimate_report(_cfg: &IntegratorConfig) -> PropertyReport {
    use nalgebra::dvector;
    let u = dvector![1.0, 0.0];
    let v = dvector![0.0, 1.0];
    let pi = std::f64::consts::PI;
    let mut logs: Vec<(f64, f64)> = Vec::new();
    for k in [16usize, 32, 64, 128] {
        let h = pi / k as f64;
        let cfg = IntegratorConfig { rtol: 1.0, atol: 1.0, max_step: h, max_steps: 1_000_000 };
        let out = dynamics::integrate_fictitious(
            EnergyClass::Elliptic,
            &u,
            &v,
            (0.0, pi),
            Some(&[pi]),
            &cfg,
        )
        .unwrap();
        let err = (&out[0].x - dvector![-1.0, 0.0]).norm();
        logs.push((h.ln(), err.ln()));
    }
    let m = logs.len() as f64;
    let sx: f64 = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let sy: f64 = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let slope: f64 = logs.iter().map(|p| (p.0 - sx) * (p.1 - sy)).sum::<f64>()
        / logs.iter().map(|p| (p.0 - sx).powi(2)).sum::<f64>();
    let worst = (slope - 5.0).abs();
    PropertyReport {
        name: "fictitious-convergence-order",
        passed: worst <= 0.5,
        worst,
        tolerance: 0.5,
        trials: 1,
    }
}

fn geometry_suite(trials: usize, seed: u64) -> Vec<PropertyReport> {
    vec![
        property("planarity-residual", 1e-9, trials, seed, 0x5e6f_7081_92a3_0001, |rng, k| {
            let class = CLASSES[k % 3];
            let n = DIMS[k % DIMS.len()];
            let s = sampling::spec(rng, n, class);
            let chart = geometry::plane_of(&s).unwrap();
            let scale = 1.0 + chart.center().norm();
            let mut worst = 0.0f64;
            for j in 0..16 {
                let tau = -2.0 + 4.0 * j as f64 / 15.0;
                let p = s.position_down(tau).unwrap();
                worst = worst.max(chart.residual(p.base()).unwrap() / scale);
            }
            worst
        }),
        property("conic-fit-agreement", 0.0, trials, seed, 0x5e6f_7081_92a3_0002, |rng, k| {
            let class = CLASSES[k % 3];
            let s = sampling::spec(rng, 3, class);
            let chart = geometry::plane_of(&s).unwrap();
            let pts: Vec<(f64, f64)> = (0..32)
                .map(|j| {
                    let tau = match class {
                        EnergyClass::Elliptic => std::f64::consts::PI * j as f64 / 32.0,
                        _ => -2.0 + 4.0 * j as f64 / 31.0,
                    };
                    geometry::plane_coords(&chart, &s.position_down(tau).unwrap()).unwrap()
                })
                .collect();
            let fit = geometry::classify_conic(&pts).unwrap();
            if fit == geometry::classify_spec(&s) {
                0.0
            } else {
                1.0
            }
        }),
        property("covering-equivariance", 1e-12, trials, seed, 0x5e6f_7081_92a3_0003, |rng, k| {
            let n = DIMS[k % DIMS.len()];
            let g_raw = sampling::group_element(rng, n);
            let g = geometry::GroupElement::new(g_raw.clone()).unwrap();
            let x = sampling::gaussian_vector(rng, n);
            let downstairs =
                geometry::act_point(&g, &regularization::q_map(&x).unwrap()).unwrap();
            let upstairs = regularization::q_map(&(&g_raw * &x)).unwrap();
            (downstairs.base() - upstairs.base()).norm() / upstairs.base().norm()
        }),
        property("transporter-residual", 1e-8, trials, seed, 0x5e6f_7081_92a3_0004, |rng, k| {
            let class = [EnergyClass::Elliptic, EnergyClass::Parabolic][k % 2];
            let n = [2usize, 3, 5][k % 3];
            let from = sampling::spec(rng, n, class);
            let to = sampling::spec(rng, n, class);
            let g = geometry::transporter(&from, &to).unwrap();
            let mut worst = (g.matrix() * from.u() - to.u()).amax();
            worst = worst.max((g.matrix() * from.v() - to.v()).amax());
            for j in 0..10 {
                let tau = -1.5 + 3.0 * j as f64 / 9.0;
                let a = geometry::act_point(&g, &from.position_down(tau).unwrap()).unwrap();
                let b = to.position_down(tau).unwrap();
                worst = worst.max((a.base() - b.base()).norm() / (1.0 + b.base().norm()));
            }
            worst
        }),
        property("elliptic-image-bounded", 1.0, trials, seed, 0x5e6f_7081_92a3_0005, |rng, _| {
            let s = sampling::spec(rng, 3, EnergyClass::Elliptic);
            let bound = 3.0 * (s.u().norm_squared() + s.v().norm_squared());
            let mut worst = 0.0f64;
            for j in 0..24 {
                let tau = 2.0 * std::f64::consts::PI * j as f64 / 24.0;
                worst = worst.max(s.position_down(tau).unwrap().base().norm() / bound);
            }
            worst
        }),
        property("open-image-escapes", 1.0, trials, seed, 0x5e6f_7081_92a3_0006, |rng, k| {
            let class = [EnergyClass::Parabolic, EnergyClass::Hyperbolic][k % 2];
            let s = sampling::spec(rng, 3, class);
            let near = s.position_down(0.0).unwrap().base().norm();
            let far = s
                .position_down(-20.0)
                .unwrap()
                .base()
                .norm()
                .min(s.position_down(20.0).unwrap().base().norm());
            10.0 * near / far
        }),
    ]
}

fn rng_range(rng: &mut rand_chacha::ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    use rand::Rng;
    rng.gen_range(lo..hi)
}

// ───────────────────────── Tests ─────────────────────────
