//! Command-line front end: trajectory sampling, numerical integration,
//! conic classification, orbit transport, invariant suites, and SVG plots.
//!
//! Exit codes are a stable contract: 0 success, 1 property failure,
//! 2 usage/input, 3 I/O, 4 singularity, 5 internal invariant violation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;

use conekepler::dynamics::{
    energy_drift, integrate_physical, IntegrationError, IntegratorConfig,
};
use conekepler::geometry::{
    act_point, classify_spec, plane_coords, plane_of, transporter, ConicClass, PlaneChart,
};
use conekepler::regularization::q_map;
use conekepler::trajectories::{EnergyClass, TrajectorySpec};
use conekepler::{checks, Error, RegState, SymMatrix};

use conekepler_cli::rows::{RowBody, RowData, TraceRow};
use conekepler_cli::{fmt_f64, input, rows, svg};

const EXIT_PROPERTY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_SINGULARITY: u8 = 4;
const EXIT_INTERNAL: u8 = 5;

/// Verification threshold for `transport`: the printed residual must stay
/// below this for the command to succeed.
const TRANSPORT_RESIDUAL: f64 = 1e-8;

#[derive(Parser)]
#[command(name = "conekepler", version, about = "Closed-form and numerical orbits on the rank-1 cone")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a closed-form trajectory on a uniform parameter grid.
    Sample {
        /// Trajectory description (JSON).
        spec: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        tau_min: f64,
        #[arg(long, default_value_t = std::f64::consts::PI)]
        tau_max: f64,
        /// Number of grid points (at least 2).
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Output path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the equations of motion numerically in physical time.
    Integrate {
        /// Start from a trajectory description (JSON).
        #[arg(long, conflicts_with = "state")]
        spec: Option<PathBuf>,
        /// Start from an explicit state upstairs (JSON).
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-10)]
        rtol: f64,
        #[arg(long, default_value_t = 1e-12)]
        atol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the conic type and energy of a trajectory.
    Classify {
        spec: PathBuf,
    },
    /// Find a symmetry-group element carrying one orbit onto another.
    Transport {
        from: PathBuf,
        to: PathBuf,
    },
    /// Run a randomized invariant suite and report each property.
    Check {
        /// One of: jordan, regularization, trajectories, dynamics, geometry, all.
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 32)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Render the plane-coordinate curve of a trajectory as SVG.
    Plot {
        spec: PathBuf,
        out: PathBuf,
        #[arg(long)]
        tau_min: Option<f64>,
        #[arg(long)]
        tau_max: Option<f64>,
        #[arg(long, default_value_t = 256)]
        steps: usize,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Failure {
        Failure { code: EXIT_USAGE, msg: msg.into() }
    }

    fn io(msg: impl Into<String>) -> Failure {
        Failure { code: EXIT_IO, msg: msg.into() }
    }

    fn internal(msg: impl Into<String>) -> Failure {
        Failure { code: EXIT_INTERNAL, msg: msg.into() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // Clap exits 2 on usage errors and 0 for --help/--version.
        Err(e) => e.exit(),
    };
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Cmd) -> Result<u8, Failure> {
    match cmd {
        Cmd::Sample { spec, tau_min, tau_max, steps, format, out } => {
            cmd_sample(&spec, tau_min, tau_max, steps, format, out.as_deref())
        }
        Cmd::Integrate { spec, state, t_end, rtol, atol, format, out } => {
            cmd_integrate(spec.as_deref(), state.as_deref(), t_end, rtol, atol, format, out.as_deref())
        }
        Cmd::Classify { spec } => cmd_classify(&spec),
        Cmd::Transport { from, to } => cmd_transport(&from, &to),
        Cmd::Check { suite, trials, seed } => cmd_check(&suite, trials, seed),
        Cmd::Plot { spec, out, tau_min, tau_max, steps } => {
            cmd_plot(&spec, &out, tau_min, tau_max, steps)
        }
    }
}

fn load_spec(path: &Path) -> Result<TrajectorySpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    input::parse_spec(&text)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_state(path: &Path) -> Result<RegState, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    input::parse_state(&text)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, contents: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, contents)
            .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(contents.as_bytes())
                .map_err(|e| Failure::io(format!("cannot write to stdout: {e}")))
        }
    }
}

fn render(n: usize, table: &[TraceRow], format: Format) -> String {
    match format {
        Format::Csv => rows::write_csv(n, table),
        Format::Json => rows::write_json(n, table),
    }
}

/// The carrying plane of a spec's downstairs image.  Colliding trajectories
/// degenerate to a ray through the apex; for those the chart is the ray's
/// span completed by an arbitrary orthogonal direction, so emitted plane
/// coordinates remain meaningful (`p2 = 0` along the ray).
fn chart_for(spec: &TrajectorySpec) -> Result<PlaneChart, Failure> {
    match plane_of(spec) {
        Ok(chart) => Ok(chart),
        Err(Error::CollidingSpec) => ray_chart(spec),
        Err(e) => Err(Failure::internal(format!("plane construction failed: {e}"))),
    }
}

fn ray_chart(spec: &TrajectorySpec) -> Result<PlaneChart, Failure> {
    let n = spec.n();
    let a = spec.u() / spec.u().norm();
    // A unit vector orthogonal to the ray axis, seeded from the coordinate
    // direction least aligned with it.
    let k = (0..n).min_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs())).unwrap();
    let mut b = DVector::zeros(n);
    b[k] = 1.0;
    b -= &a * a[k];
    b /= b.norm();

    let scale = (n as f64).sqrt();
    let e1 = SymMatrix::outer(&a).scale(scale);
    let e2 = SymMatrix::outer(&b).scale(scale);
    PlaneChart::new(SymMatrix::zeros(n), e1, e2)
        .map_err(|e| Failure::internal(format!("ray chart construction failed: {e}")))
}

/// Parabolic clock formulas assume the normalization ‖v‖² = ½; reject
/// other parametrizations up front for commands that need the clock.
fn require_clock(spec: &TrajectorySpec) -> Result<(), Failure> {
    if spec.class() == EnergyClass::Parabolic {
        let v2 = spec.v().norm_squared();
        if (v2 - 0.5).abs() > 1e-9 {
            return Err(Failure::usage(format!(
                "parabolic specs must satisfy |v|^2 = 1/2 (got {v2}); rescale u, v accordingly"
            )));
        }
    }
    Ok(())
}

fn cmd_sample(
    spec_path: &Path,
    tau_min: f64,
    tau_max: f64,
    steps: usize,
    format: Format,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    if steps < 2 {
        return Err(Failure::usage("--steps must be at least 2"));
    }
    if !(tau_min < tau_max) {
        return Err(Failure::usage("--tau-min must be smaller than --tau-max"));
    }
    let spec = load_spec(spec_path)?;
    require_clock(&spec)?;
    let chart = chart_for(&spec)?;

    let mut table = Vec::with_capacity(steps);
    for k in 0..steps {
        let tau = tau_min + (tau_max - tau_min) * k as f64 / (steps - 1) as f64;
        table.push(TraceRow { tau, body: row_body(&spec, &chart, tau) });
    }
    emit(out, &render(spec.n(), &table, format))?;
    Ok(0)
}

fn row_body(spec: &TrajectorySpec, chart: &PlaneChart, tau: f64) -> RowBody {
    let t = match spec.time_law(tau) {
        Ok(t) => t,
        Err(e) => return RowBody::Error(format!("{e}").replace(',', ";")),
    };
    let down = match spec.position_down(tau) {
        Ok(pt) => pt,
        Err(e) => return RowBody::Error(format!("{e}").replace(',', ";")),
    };
    let (p1, p2) = match plane_coords(chart, &down) {
        Ok(p) => p,
        Err(e) => return RowBody::Error(format!("{e}").replace(',', ";")),
    };
    RowBody::Data(RowData {
        t,
        x_up: spec.position_up(tau).iter().copied().collect(),
        x_upper: down.base().upper_triangle(),
        p1,
        p2,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_integrate(
    spec_path: Option<&Path>,
    state_path: Option<&Path>,
    t_end: f64,
    rtol: f64,
    atol: f64,
    format: Format,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    if !(t_end > 0.0) {
        return Err(Failure::usage("--t-end must be positive"));
    }
    let cfg = IntegratorConfig { rtol, atol, ..IntegratorConfig::default() };
    cfg.validate().map_err(|e| Failure::usage(format!("{e}")))?;

    let (s0, spec) = match (spec_path, state_path) {
        (Some(path), None) => {
            let spec = load_spec(path)?;
            require_clock(&spec)?;
            let s0 = spec
                .phase_state(0.0)
                .map_err(|e| Failure::usage(format!("spec is unusable at tau = 0: {e}")))?;
            (s0, spec)
        }
        (None, Some(path)) => {
            let s0 = load_state(path)?;
            let spec = TrajectorySpec::spec_from_state(&s0)
                .map_err(|e| Failure::usage(format!("state does not lie over the cone: {e}")))?;
            (s0, spec)
        }
        _ => return Err(Failure::usage("provide exactly one of --spec or --state")),
    };
    let chart = chart_for(&spec)?;

    let (trace, failure) = match integrate_physical(&s0, (0.0, t_end), None, &cfg) {
        Ok(trace) => (trace, None),
        Err(IntegrationError::Singularity { t, trace }) => (trace, Some(t)),
        Err(IntegrationError::Budget { t, steps }) => {
            return Err(Failure::usage(format!(
                "step budget exhausted at t = {t} after {steps} steps; loosen tolerances"
            )));
        }
        Err(IntegrationError::Core(e)) => {
            return Err(Failure::internal(format!("integration failed: {e}")));
        }
    };

    let table: Vec<TraceRow> =
        trace.iter().map(|(t, state)| integrated_row(&spec, &chart, *t, state)).collect();
    emit(out, &render(spec.n(), &table, format))?;

    match energy_drift(&trace) {
        Ok(drift) => eprintln!("energy drift: {}", fmt_f64(drift)),
        Err(e) => eprintln!("energy drift unavailable: {e}"),
    }
    if let Some(t) = failure {
        eprintln!("singularity reached at t = {}; partial trace emitted", fmt_f64(t));
        return Ok(EXIT_SINGULARITY);
    }
    Ok(0)
}

fn integrated_row(spec: &TrajectorySpec, chart: &PlaneChart, t: f64, state: &RegState) -> TraceRow {
    let tau = match tau_from_clock(spec, t) {
        Some(tau) => tau,
        None => {
            return TraceRow {
                tau: f64::NAN,
                body: RowBody::Error("fictitious time not recoverable".to_string()),
            };
        }
    };
    let body = (|| -> Result<RowData, String> {
        let down = q_map(state.x()).map_err(|e| format!("{e}"))?;
        let (p1, p2) = plane_coords(chart, &down).map_err(|e| format!("{e}"))?;
        Ok(RowData {
            t,
            x_up: state.x().iter().copied().collect(),
            x_upper: down.base().upper_triangle(),
            p1,
            p2,
        })
    })();
    match body {
        Ok(data) => TraceRow { tau, body: RowBody::Data(data) },
        Err(msg) => TraceRow { tau, body: RowBody::Error(msg.replace(',', ";")) },
    }
}

/// Invert the clock `t = time_law(τ)`.  The library inversion refuses
/// colliding trajectories (their clock is not strictly monotone), but it is
/// still non-decreasing, so a bisection on the pre-collision branch
/// recovers τ for the times the integrator can actually reach.
fn tau_from_clock(spec: &TrajectorySpec, t: f64) -> Option<f64> {
    match spec.invert_time(t) {
        Ok(tau) => Some(tau),
        Err(Error::CollidingSpec) => {
            if t == 0.0 {
                return Some(0.0);
            }
            let dir = t.signum();
            let mut hi = 1.0;
            let mut iters = 0;
            while spec.time_law(dir * hi).ok()? * dir < t * dir {
                hi *= 2.0;
                iters += 1;
                if iters > 200 {
                    return None;
                }
            }
            let (mut lo, mut hi) = (0.0, hi);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if spec.time_law(dir * mid).ok()? * dir < t * dir {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Some(dir * 0.5 * (lo + hi))
        }
        Err(_) => None,
    }
}

fn conic_of(class: EnergyClass) -> ConicClass {
    match class {
        EnergyClass::Elliptic => ConicClass::Ellipse,
        EnergyClass::Parabolic => ConicClass::Parabola,
        EnergyClass::Hyperbolic => ConicClass::HyperbolaBranch,
    }
}

fn cmd_classify(spec_path: &Path) -> Result<u8, Failure> {
    let spec = load_spec(spec_path)?;
    let expected = if spec.colliding() {
        println!("colliding");
        ConicClass::Colliding
    } else {
        println!("{} E={}", conic_of(spec.class()), spec.energy_of());
        conic_of(spec.class())
    };
    let fitted = classify_spec(&spec);
    println!("fit: {fitted}");
    if fitted != expected {
        return Err(Failure::internal(format!(
            "fit-based classification `{fitted}` disagrees with energy sign `{expected}`"
        )));
    }
    Ok(0)
}

fn cmd_transport(from_path: &Path, to_path: &Path) -> Result<u8, Failure> {
    let from = load_spec(from_path)?;
    let to = load_spec(to_path)?;
    let g = transporter(&from, &to).map_err(|e| match e {
        Error::Internal(_) => Failure::internal(format!("{e}")),
        _ => Failure::usage(format!("{e}")),
    })?;

    let n = g.n();
    for i in 0..n {
        let line: Vec<String> = (0..n).map(|j| fmt_f64(g.matrix()[(i, j)])).collect();
        println!("{}", line.join(" "));
    }

    // Pointwise verification along matched clock readings; this is the
    // orientation check, not just a set-wise one.
    let grid: Vec<f64> = match from.class() {
        EnergyClass::Elliptic => {
            (0..9).map(|k| std::f64::consts::PI * k as f64 / 9.0).collect()
        }
        _ => (0..9).map(|k| -2.0 + 4.0 * k as f64 / 8.0).collect(),
    };
    let mut residual: f64 = 0.0;
    for &tau in &grid {
        let moved = from
            .position_down(tau)
            .and_then(|pt| act_point(&g, &pt))
            .map_err(|e| Failure::internal(format!("verification failed: {e}")))?;
        let target = to
            .position_down(tau)
            .map_err(|e| Failure::internal(format!("verification failed: {e}")))?;
        let err = (moved.base() - target.base()).norm();
        residual = residual.max(err / target.base().norm().max(1.0));
    }
    println!("residual={}", fmt_f64(residual));
    if residual <= TRANSPORT_RESIDUAL {
        Ok(0)
    } else {
        eprintln!("error: transport verification residual exceeds {TRANSPORT_RESIDUAL:e}");
        Ok(EXIT_PROPERTY)
    }
}

fn cmd_check(suite: &str, trials: usize, seed: u64) -> Result<u8, Failure> {
    if trials == 0 {
        return Err(Failure::usage("--trials must be at least 1"));
    }
    let suite: checks::Suite =
        suite.parse().map_err(|e| Failure::usage(format!("{e}")))?;
    let reports = checks::run_suite(suite, trials, seed);
    let mut all_passed = true;
    for report in &reports {
        println!("{report}");
        all_passed &= report.passed;
    }
    Ok(if all_passed { 0 } else { EXIT_PROPERTY })
}

fn cmd_plot(
    spec_path: &Path,
    out: &Path,
    tau_min: Option<f64>,
    tau_max: Option<f64>,
    steps: usize,
) -> Result<u8, Failure> {
    if steps < 2 {
        return Err(Failure::usage("--steps must be at least 2"));
    }
    let spec = load_spec(spec_path)?;
    if spec.colliding() {
        return Err(Failure::usage("colliding trajectories have no plane curve to plot"));
    }
    let (lo_default, hi_default) = match spec.class() {
        EnergyClass::Elliptic => (0.0, std::f64::consts::PI),
        _ => (-2.0, 2.0),
    };
    let lo = tau_min.unwrap_or(lo_default);
    let hi = tau_max.unwrap_or(hi_default);
    if !(lo < hi) {
        return Err(Failure::usage("--tau-min must be smaller than --tau-max"));
    }

    let chart = chart_for(&spec)?;
    let mut points = Vec::with_capacity(steps);
    for k in 0..steps {
        let tau = lo + (hi - lo) * k as f64 / (steps - 1) as f64;
        if let Ok(pt) = spec.position_down(tau) {
            points.push(
                plane_coords(&chart, &pt)
                    .map_err(|e| Failure::internal(format!("point left its plane: {e}")))?,
            );
        }
    }
    let title = format!("{} trajectory, tau in [{lo}, {hi}]", conic_of(spec.class()));
    let doc = svg::polyline_plot(&points, &title);
    std::fs::write(out, doc)
        .map_err(|e| Failure::io(format!("cannot write {}: {e}", out.display())))?;
    Ok(0)
}
