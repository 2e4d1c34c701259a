//! Command-line front end of `gravclock`.
//!
//! Exit codes: 0 success, 1 I/O failure or failing selftest, 2 invalid input,
//! 3 numerical non-convergence, 64 usage error.

pub mod output;
pub mod params;
pub mod selftest;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use gravclock::detectability::{evaluate, phase_shift, required_ell, run_sweep, DetectabilityQuery, OUTPUT_NAMES};
use gravclock::geodesic::{energy_drift, energy_ratio_drift, solve_extremal_path, verify_first_order};
use gravclock::interferometry::{
    default_clock_state, detection_probabilities, detection_probabilities_from_state, gme_entanglement, gme_oracle,
    visibility_deficit_log10,
};
use gravclock::qep::qep_evaluate;
use gravclock::{
    BoundaryConditions, DeltaTauMode, Error, GapConvention, LogMagnitude, PhysicalConstants, RotatingMassModel,
    Scenario, SpacetimePoint, SweepConfig,
};

use output::{Field, Report, Table};
use params::{Params, CONFIG_KEYS, CONSTANT_KEYS};

pub const CONSTANTS_ENV: &str = "GRAVCLOCK_CONSTANTS";

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Validation(String),
    NoConvergence(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::NoConvergence(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) | CliError::NoConvergence(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NoConvergence { .. } => CliError::NoConvergence(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gravclock", version, about = "Frame-dragging proper-time differences seen by quantum clocks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Proper-time difference between the interferometer arms.
    DeltaTau(Params),
    /// Visibility and detection probabilities of the clock interferometer.
    Interfere(Params),
    /// Source-path-clock entanglement when the source rotation is in superposition.
    Gme(Params),
    /// Signatures of a frame-dragging Hamiltonian that differs from the Newtonian one.
    Qep(Params),
    /// Phase per unit angular momentum and the angular momentum needed for a target phase.
    Detect(Params),
    /// One scenario axis over a list of values.
    Sweep(Params),
    /// Residual study of the first-order proper-time formula against exact extremal paths.
    Verify(Params),
    /// Randomized closed-form versus oracle suites.
    Selftest(Params),
}

/// Parses `args` (program name first), runs the command and returns the exit code.
/// Reads the constants override file named by `GRAVCLOCK_CONSTANTS`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let constants_file = std::env::var_os(CONSTANTS_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    run_with(args, constants_file, out, err)
}

pub fn run_with<I, T>(args: I, constants_file: Option<PathBuf>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    64
                }
            };
        }
    };
    match dispatch(cli.command, constants_file, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn resolve(flags: Params, constants_file: Option<PathBuf>) -> Result<Params, CliError> {
    let base = match constants_file {
        Some(path) => Params::from_file(&path, &CONSTANT_KEYS)?,
        None => Params::default(),
    };
    let file = match &flags.config {
        Some(path) => Params::from_file(path, &CONFIG_KEYS)?,
        None => Params::default(),
    };
    Ok(base.overlay(file).overlay(flags))
}

type Handler = fn(&Params, &mut dyn Write) -> Result<(Report, i32), CliError>;

fn dispatch(
    command: Command,
    constants_file: Option<PathBuf>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let (flags, run): (Params, Handler) = match command {
        Command::DeltaTau(p) => (p, delta_tau),
        Command::Interfere(p) => (p, interfere),
        Command::Gme(p) => (p, gme),
        Command::Qep(p) => (p, qep),
        Command::Detect(p) => (p, detect),
        Command::Sweep(p) => (p, sweep),
        Command::Verify(p) => (p, verify),
        Command::Selftest(p) => (p, selftest),
    };
    let p = resolve(flags, constants_file)?;
    let (report, code) = run(&p, err)?;
    match &p.output {
        Some(path) => {
            let mut f = std::fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            report.write(p.format(), &mut f)?;
        }
        None => report.write(p.format(), out)?,
    }
    Ok(code)
}

fn scenario_inputs(mut r: Report, s: &Scenario) -> Result<Report, CliError> {
    let geom = s.geometry()?;
    r = r
        .input("M", s.mass)
        .input("J", s.angular_momentum.to_f64())
        .input("J_log10", s.angular_momentum.log10_abs())
        .input("w", geom.width)
        .input("L", geom.half_length)
        .input("v0", geom.v0)
        .input("E_g", s.e_g)
        .input("E_e", s.e_e)
        .input("convention", convention_name(s.convention))
        .input("mode", mode_name(s.mode));
    Ok(qep_inputs(r, s))
}

fn qep_inputs(r: Report, s: &Scenario) -> Report {
    match s.qep {
        Some(q) => r
            .input("E_g_prime", q.e_g_prime)
            .input("E_e_prime", q.e_e_prime)
            .input("theta", q.theta)
            .input("varphi", q.varphi),
        None => r,
    }
}

fn convention_name(c: GapConvention) -> &'static str {
    match c {
        GapConvention::Full => "full",
        GapConvention::Half => "half",
    }
}

fn mode_name(m: DeltaTauMode) -> &'static str {
    match m {
        DeltaTauMode::ClosedForm => "closed-form",
        DeltaTauMode::Quadrature => "quadrature",
    }
}

/// The given `delta_tau`, or the one the scenario geometry produces.
fn resolve_delta_tau(p: &Params, s: &Scenario, mut r: Report) -> Result<(LogMagnitude, Report), CliError> {
    match p.delta_tau {
        Some(dt) if dt.is_finite() => {
            r = r.input("delta_tau", dt);
            for (k, v) in [("E_g", s.e_g), ("E_e", s.e_e)] {
                r = r.input(k, v);
            }
            r = r.input("convention", convention_name(s.convention));
            Ok((LogMagnitude::from_f64(dt), qep_inputs(r, s)))
        }
        Some(_) => Err(CliError::Validation("delta_tau must be finite".into())),
        None => Ok((s.delta_tau()?, scenario_inputs(r, s)?)),
    }
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn delta_tau(p: &Params, _: &mut dyn Write) -> Result<(Report, i32), CliError> {
    let s = p.scenario(false)?;
    let mut r = scenario_inputs(Report::new("delta-tau", s.constants), &s)?;
    let cols = names(&["delta_tau", "delta_tau_log10", "phase_mean_log10", "phase_gap_log10"]);
    for (k, v) in cols.iter().zip(evaluate(&s, &cols)?) {
        r = r.output(k, v);
    }
    let k = s.geometry()?.k_factor(s.constants.c);
    Ok((r.output("k_factor", k), 0))
}

fn interfere(p: &Params, _: &mut dyn Write) -> Result<(Report, i32), CliError> {
    let s = p.scenario(false)?;
    let clock = s.clock()?;
    let (dt_log, r) = resolve_delta_tau(p, &s, Report::new("interfere", s.constants))?;
    let dt = dt_log.to_f64();
    let res = detection_probabilities(&clock, dt);
    let (l, rr) = detection_probabilities_from_state(&clock, dt, &default_clock_state());
    let gap = dt_log * (clock.convention.kappa() * clock.gap()) / LogMagnitude::from_f64(s.constants.hbar);
    let r = r
        .output("delta_tau", dt)
        .output("phase_mean", res.phase_mean)
        .output("phase_gap", clock.gap_phase(dt))
        .output("visibility", res.visibility)
        .output("visibility_deficit_log10", visibility_deficit_log10(gap))
        .output("pr_left", res.pr_left)
        .output("pr_right", res.pr_right)
        .output("pr_left_state", l)
        .output("pr_right_state", rr);
    Ok((r, 0))
}

fn gme(p: &Params, _: &mut dyn Write) -> Result<(Report, i32), CliError> {
    let s = p.scenario(false)?;
    let clock = s.clock()?;
    let (dt_log, r) = resolve_delta_tau(p, &s, Report::new("gme", s.constants))?;
    let dt = dt_log.to_f64();
    let g = gme_entanglement(&clock, dt)?;
    let (ee, ef, c) = gme_oracle(&g.state, clock.entropy_base)?;
    let base = if s.entropy_base == gravclock::EntropyBase::Nats { "nats" } else { "bits" };
    let r = r
        .input("entropy_base", base)
        .output("delta_tau", dt)
        .output("ee_spc", g.ee_spc)
        .output("ef_sp", g.ef_sp)
        .output("witness", g.witness)
        .output("ee_spc_oracle", ee)
        .output("ef_sp_oracle", ef)
        .output("concurrence", c);
    Ok((r, 0))
}

fn qep(p: &Params, err: &mut dyn Write) -> Result<(Report, i32), CliError> {
    let s = p.scenario(true)?;
    let tt = s.test_theory()?.ok_or_else(|| CliError::Validation("missing test theory".into()))?;
    let (dt_log, r) = resolve_delta_tau(p, &s, Report::new("qep", s.constants))?;
    let dt = dt_log.to_f64();
    let q = qep_evaluate(&tt, dt)?;
    if q.commutator_warning {
        let _ = writeln!(
            err,
            "warning: ||[H_N, H_f]|| / ||H_N|| = {:.3e} exceeds {:.1e}; the phase accumulation is not a product of commuting factors",
            q.commutator_ratio, tt.commutator_threshold
        );
    }
    let r = r
        .output("delta_tau", dt)
        .output("visibility", q.visibility)
        .output("xi", q.xi)
        .output("offset", q.offset)
        .output("pr_left", q.pr_left)
        .output("pr_right", q.pr_right)
        .output("ee_spc", q.ee_spc)
        .output("ef_sp", q.ef_sp)
        .output("witness", q.witness)
        .output("commutator_ratio", q.commutator_ratio)
        .output("commutator_warning", q.commutator_warning);
    Ok((r, 0))
}

fn detect(p: &Params, _: &mut dyn Write) -> Result<(Report, i32), CliError> {
    let s = p.scenario(false)?;
    let k = s.constants;
    let rate = s.convention.kappa() * (s.e_e - s.e_g) / k.hbar;
    let ell = s.angular_momentum / LogMagnitude::from_f64(k.hbar);
    let target = p.target_phase.unwrap_or(1.0);
    let q = DetectabilityQuery::new(rate, s.width, s.v0, ell)?.with_constants(k)?;
    let phase = phase_shift(&q);
    let r = Report::new("detect", k)
        .input("clock_rate", rate)
        .input("w", s.width)
        .input("v0", s.v0)
        .input("ell_log10", ell.log10_abs())
        .input("target_phase", target)
        .output("phase", phase.to_f64())
        .output("phase_log10", phase.log10_abs())
        .output("phase_per_ell_log10", phase.log10_abs() - ell.log10_abs())
        .output("required_ell_log10", required_ell(target, rate, s.width, s.v0, &k)?);
    Ok((r, 0))
}

const DEFAULT_SWEEP_OUTPUTS: [&str; 4] = ["delta_tau_log10", "phase_gap_log10", "visibility", "pr_left"];

fn sweep(p: &Params, _: &mut dyn Write) -> Result<(Report, i32), CliError> {
    let s = p.scenario(false)?;
    let axis = p.axis.clone().ok_or_else(|| CliError::Validation("sweep needs an axis".into()))?;
    let outputs = p.outputs.clone().unwrap_or_else(|| names(&DEFAULT_SWEEP_OUTPUTS));
    for o in &outputs {
        if !OUTPUT_NAMES.contains(&o.as_str()) {
            return Err(CliError::Validation(format!("unknown output '{o}'; known: {}", OUTPUT_NAMES.join(", "))));
        }
    }
    let cfg = SweepConfig { scenario: s, axis: axis.clone(), values: p.sweep_values()?, outputs: outputs.clone() };
    let t = run_sweep(&cfg)?;
    let mut r = scenario_inputs(Report::new("sweep", s.constants), &s)?
        .input("axis", axis.as_str())
        .input("outputs", outputs.join(",").as_str())
        .output("rows", t.rows.len() as u64);
    r.rows = Some(Table {
        columns: t.columns,
        rows: t.rows.into_iter().map(|row| row.into_iter().map(Field::Num).collect()).collect(),
    });
    Ok((r, 0))
}

const VERIFY_EPSILONS: [f64; 7] = [0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0];

/// Exact extremal paths in units with `c = G = 1` unless constants are given.
fn verify(p: &Params, err: &mut dyn Write) -> Result<(Report, i32), CliError> {
    let k = p.constants_or(PhysicalConstants::new(1.0, 1.0, 1.0)?)?;
    let mass = p.mass.unwrap_or(1e-6);
    let j = p.j.unwrap_or(1e-5);
    let segments = p.segments.unwrap_or(400);
    let eps = p.values.clone().unwrap_or_else(|| VERIFY_EPSILONS.to_vec());
    let model = RotatingMassModel::with_constants(mass, j, k)?;
    let bc = BoundaryConditions::new(
        SpacetimePoint::equatorial(0.0, 1.0, -0.6)?,
        SpacetimePoint::equatorial(565.0, 1.0, 0.6)?,
        segments,
    )?;
    let report = verify_first_order(&model, &bc, &eps)?;
    let mut ratio_drift: f64 = 0.0;
    let mut exact_drift: f64 = 0.0;
    for m in [model.background(), model] {
        let sol = solve_extremal_path(&m, &bc)?;
        ratio_drift = ratio_drift.max(energy_ratio_drift(&m, &sol.path)?);
        exact_drift = exact_drift.max(energy_drift(&m, &sol.path)?);
    }
    let _ = writeln!(
        err,
        "verify: residual slope {:.4}, energy_ratio drift {ratio_drift:.2e}, energy drift {exact_drift:.2e}",
        report.slope
    );
    let mut r = Report::new("verify", k)
        .input("M", mass)
        .input("J", j)
        .input("segments", segments as u64)
        .input("t_end", 565.0)
        .input("r", 1.0)
        .input("phi_span", 1.2)
        .output("background_tau", report.background_tau)
        .output("slope", report.slope)
        .output("antisymmetry", report.antisymmetry)
        .output("energy_ratio_drift", ratio_drift)
        .output("energy_drift", exact_drift);
    let rows = (0..eps.len())
        .map(|i| {
            vec![
                Field::Num(report.epsilons[i]),
                Field::Num(report.exact_shifts[i]),
                Field::Num(report.first_order[i]),
                Field::Num(report.residuals[i]),
            ]
        })
        .collect();
    r.rows = Some(Table { columns: names(&["epsilon", "exact_shift", "first_order", "residual"]), rows });
    Ok((r, 0))
}

fn selftest(p: &Params, err: &mut dyn Write) -> Result<(Report, i32), CliError> {
    let s = p.scenario(false)?;
    let seed = p.seed.unwrap_or(0);
    let samples = p.samples.unwrap_or(200);
    let suites = selftest::run_suites(seed, samples, s.entropy_base)?;
    let passed = suites.iter().all(|x| x.pass());
    for x in suites.iter().filter(|x| !x.pass()) {
        let _ = writeln!(err, "selftest {}: max error {:.3e} exceeds {:.1e}", x.name, x.max_error, x.tolerance);
    }
    let mut r = Report::new("selftest", s.constants)
        .input("seed", seed)
        .input("samples", samples as u64)
        .output("passed", passed);
    let rows = suites
        .iter()
        .map(|x| {
            vec![
                Field::from(x.name),
                Field::Int(x.samples as u64),
                Field::Num(x.max_error),
                Field::Num(x.tolerance),
                Field::Flag(x.pass()),
            ]
        })
        .collect();
    r.rows = Some(Table { columns: names(&["suite", "samples", "max_error", "tolerance", "pass"]), rows });
    Ok((r, if passed { 0 } else { 1 }))
}
