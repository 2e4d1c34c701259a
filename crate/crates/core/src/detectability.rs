//! Order-of-magnitude detectability estimates and parameter sweeps.
//!
//! Angular momenta of interest reach `J/hbar ~ 1e60` while laboratory phases
//! are near `1e-59` rad, so every quantity that carries `ell` is computed in
//! log10 form.

use rayon::prelude::*;

use crate::clockstate::EntropyBase;
use crate::error::{domain, Error, Result};
use crate::interferometry::{
    detection_probabilities, gme_entanglement, visibility, visibility_deficit_log10, ClockModel, GapConvention,
    VisibilityMode,
};
use crate::logdomain::LogMagnitude;
use crate::propertime::{
    closed_form_delta_tau_log, delta_tau_interferometer, DeltaTauMode, InterferometerGeometry, DEFAULT_LENGTH_RATIO,
};
use crate::qep::{qep_evaluate, QepTestTheory};
use crate::spacetime::{PhysicalConstants, RotatingMassModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectabilityQuery {
    /// `Delta E / hbar`, rad/s.
    pub clock_rate: f64,
    pub width: f64,
    pub v0: f64,
    /// `ell = J / hbar`.
    pub ell: LogMagnitude,
    pub constants: PhysicalConstants,
}

impl DetectabilityQuery {
    pub fn new(clock_rate: f64, width: f64, v0: f64, ell: LogMagnitude) -> Result<Self> {
        let q = Self { clock_rate, width, v0, ell, constants: PhysicalConstants::CODATA };
        q.validate()?;
        Ok(q)
    }

    pub fn with_constants(self, constants: PhysicalConstants) -> Result<Self> {
        let q = Self { constants, ..self };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        if !(self.clock_rate.is_finite() && self.clock_rate > 0.0) {
            return domain("clock rate must be finite and > 0");
        }
        if !(self.width.is_finite() && self.width > 0.0) {
            return domain("w must be finite and > 0");
        }
        if !(self.v0.is_finite() && self.v0 >= 0.0 && self.v0 < self.constants.c) {
            return domain("v0 must lie in [0, c)");
        }
        if self.ell.sign() <= 0 {
            return domain("ell must be > 0");
        }
        Ok(())
    }

    /// `log10 K`, exact for `v0 << c`.
    fn k_log10(&self) -> f64 {
        (self.v0 * self.v0 / (2.0 * self.constants.c * self.constants.c)).ln_1p() / std::f64::consts::LN_10
    }

    /// `log10(16 G hbar K / (c^4 w))`: phase per unit `ell` per unit clock rate.
    fn base_log10(&self) -> f64 {
        let k = &self.constants;
        16f64.log10() + k.g.log10() + k.hbar.log10() + self.k_log10() - 4.0 * k.c.log10() - self.width.log10()
    }
}

/// `(Delta E/hbar) * 16 G (ell hbar) K / (c^4 w)` as a log-domain magnitude.
pub fn phase_shift(q: &DetectabilityQuery) -> LogMagnitude {
    LogMagnitude::from_parts(1.0, q.clock_rate.log10() + q.ell.log10_abs() + q.base_log10())
}

/// log10 of the phase shift, rad.
pub fn phase_shift_estimate(q: &DetectabilityQuery) -> f64 {
    phase_shift(q).log10_abs()
}

/// log10 of the `ell` producing `target_phase`.
pub fn required_ell(
    target_phase: f64,
    clock_rate: f64,
    width: f64,
    v0: f64,
    constants: &PhysicalConstants,
) -> Result<f64> {
    if !(target_phase.is_finite() && target_phase > 0.0) {
        return domain("target phase must be finite and > 0");
    }
    let q = DetectabilityQuery::new(clock_rate, width, v0, LogMagnitude::ONE)?.with_constants(*constants)?;
    Ok(target_phase.log10() - clock_rate.log10() - q.base_log10())
}

/// Every physical input of a sweep row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub constants: PhysicalConstants,
    pub mass: f64,
    pub angular_momentum: LogMagnitude,
    pub width: f64,
    /// Arm half-length; `DEFAULT_LENGTH_RATIO * width` when absent.
    pub half_length: Option<f64>,
    pub v0: f64,
    pub e_g: f64,
    pub e_e: f64,
    pub convention: GapConvention,
    pub mode: DeltaTauMode,
    pub entropy_base: EntropyBase,
    pub qep: Option<QepParameters>,
}

/// Frame-dragging Hamiltonian of the test theory; `H_N` comes from the scenario clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QepParameters {
    pub e_g_prime: f64,
    pub e_e_prime: f64,
    pub theta: f64,
    pub varphi: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        let k = PhysicalConstants::CODATA;
        Self {
            constants: k,
            mass: 0.0,
            angular_momentum: LogMagnitude::ONE,
            width: 1e-3,
            half_length: None,
            v0: 0.0,
            e_g: 0.0,
            e_e: 1e15 * k.hbar,
            convention: GapConvention::Full,
            mode: DeltaTauMode::ClosedForm,
            entropy_base: EntropyBase::Bits,
            qep: None,
        }
    }
}

impl Scenario {
    pub fn geometry(&self) -> Result<InterferometerGeometry> {
        InterferometerGeometry::new(self.width, self.half_length.unwrap_or(DEFAULT_LENGTH_RATIO * self.width), self.v0)
    }

    pub fn clock(&self) -> Result<ClockModel> {
        Ok(ClockModel::new(self.e_g, self.e_e, self.constants.hbar)?
            .with_convention(self.convention)
            .with_entropy_base(self.entropy_base))
    }

    pub fn test_theory(&self) -> Result<Option<QepTestTheory>> {
        self.qep
            .map(|p| {
                QepTestTheory::new(self.e_g, self.e_e, p.e_g_prime, p.e_e_prime, p.theta, p.varphi, self.constants.hbar)
                    .map(|t| t.with_convention(self.convention).with_entropy_base(self.entropy_base))
            })
            .transpose()
    }

    pub fn delta_tau(&self) -> Result<LogMagnitude> {
        let geom = self.geometry()?;
        if self.v0 >= self.constants.c {
            return domain("v0 must be below c");
        }
        match self.mode {
            DeltaTauMode::ClosedForm => Ok(closed_form_delta_tau_log(self.angular_momentum, &self.constants, &geom)),
            DeltaTauMode::Quadrature => {
                let j = self.angular_momentum.to_f64();
                if !j.is_finite() {
                    return domain("angular momentum too large for quadrature mode");
                }
                let model = RotatingMassModel::with_constants(self.mass, j, self.constants)?;
                Ok(delta_tau_interferometer(&model, &geom, DeltaTauMode::Quadrature)?.delta_tau)
            }
        }
    }

    /// Applies one sweep-axis value.
    pub fn with_axis(mut self, axis: SweepAxis, value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Config(format!("non-finite value {value} for axis {}", axis.name())));
        }
        match axis {
            SweepAxis::Width => self.width = value,
            SweepAxis::AngularMomentum => self.angular_momentum = LogMagnitude::from_f64(value),
            SweepAxis::Ell => self.angular_momentum = LogMagnitude::from_f64(value) * self.constants.hbar,
            SweepAxis::V0 => self.v0 = value,
            SweepAxis::ClockRate => self.e_e = self.e_g + value * self.constants.hbar,
            SweepAxis::GroundEnergy => self.e_g = value,
            SweepAxis::ExcitedEnergy => self.e_e = value,
            SweepAxis::Theta => match self.qep.as_mut() {
                Some(q) => q.theta = value,
                None => return Err(Error::Config("axis theta needs QEP parameters".into())),
            },
            SweepAxis::Mass => self.mass = value,
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Width,
    AngularMomentum,
    Ell,
    V0,
    ClockRate,
    GroundEnergy,
    ExcitedEnergy,
    Theta,
    Mass,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 9] = [
        SweepAxis::Width,
        SweepAxis::AngularMomentum,
        SweepAxis::Ell,
        SweepAxis::V0,
        SweepAxis::ClockRate,
        SweepAxis::GroundEnergy,
        SweepAxis::ExcitedEnergy,
        SweepAxis::Theta,
        SweepAxis::Mass,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Width => "w",
            SweepAxis::AngularMomentum => "J",
            SweepAxis::Ell => "ell",
            SweepAxis::V0 => "v0",
            SweepAxis::ClockRate => "clock_rate",
            SweepAxis::GroundEnergy => "E_g",
            SweepAxis::ExcitedEnergy => "E_e",
            SweepAxis::Theta => "theta",
            SweepAxis::Mass => "M",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == name)
            .ok_or_else(|| Error::Config(format!("unknown sweep axis '{name}'")))
    }
}

/// Columns a sweep can produce.
pub const OUTPUT_NAMES: [&str; 20] = [
    "delta_tau",
    "delta_tau_log10",
    "phase_gap_log10",
    "phase_mean_log10",
    "visibility",
    "visibility_deficit",
    "visibility_deficit_log10",
    "pr_left",
    "pr_right",
    "ee_spc",
    "ef_sp",
    "witness",
    "qep_visibility",
    "qep_xi",
    "qep_offset",
    "qep_pr_left",
    "qep_pr_right",
    "qep_ee_spc",
    "qep_ef_sp",
    "qep_commutator_ratio",
];

pub fn validate_outputs(outputs: &[String]) -> Result<()> {
    for o in outputs {
        if !OUTPUT_NAMES.contains(&o.as_str()) {
            return Err(Error::Config(format!("unknown output '{o}'")));
        }
    }
    Ok(())
}

/// Evaluates the requested outputs for one scenario, in the order given.
pub fn evaluate(scenario: &Scenario, outputs: &[String]) -> Result<Vec<f64>> {
    validate_outputs(outputs)?;
    let clock = scenario.clock()?;
    let dt_log = scenario.delta_tau()?;
    let dt = dt_log.to_f64();
    let hbar = LogMagnitude::from_f64(scenario.constants.hbar);
    let gap_phase = dt_log * (clock.convention.kappa() * clock.gap()) / hbar;
    let mean_phase = dt_log * clock.mean_energy() / hbar;
    let mut interference = None;
    let mut gme = None;
    let mut qep = None;
    let tt = scenario.test_theory()?;
    outputs
        .iter()
        .map(|o| {
            Ok(match o.as_str() {
                "delta_tau" => dt,
                "delta_tau_log10" => dt_log.log10_abs(),
                "phase_gap_log10" => gap_phase.log10_abs(),
                "phase_mean_log10" => mean_phase.log10_abs(),
                "visibility" => visibility(&clock, dt, VisibilityMode::Direct),
                "visibility_deficit" => 10f64.powf(visibility_deficit_log10(gap_phase)),
                "visibility_deficit_log10" => visibility_deficit_log10(gap_phase),
                "pr_left" | "pr_right" => {
                    let r = *interference.get_or_insert_with(|| detection_probabilities(&clock, dt));
                    if o == "pr_left" {
                        r.pr_left
                    } else {
                        r.pr_right
                    }
                }
                "ee_spc" | "ef_sp" | "witness" => {
                    if gme.is_none() {
                        gme = Some(gme_entanglement(&clock, dt)?);
                    }
                    let g = gme.as_ref().expect("set above");
                    match o.as_str() {
                        "ee_spc" => g.ee_spc,
                        "ef_sp" => g.ef_sp,
                        _ => g.witness,
                    }
                }
                name => {
                    let Some(t) = tt.as_ref() else {
                        return Err(Error::Config(format!("output '{name}' needs QEP parameters")));
                    };
                    if qep.is_none() {
                        qep = Some(qep_evaluate(t, dt)?);
                    }
                    let q = qep.as_ref().expect("set above");
                    match name {
                        "qep_visibility" => q.visibility,
                        "qep_xi" => q.xi,
                        "qep_offset" => q.offset,
                        "qep_pr_left" => q.pr_left,
                        "qep_pr_right" => q.pr_right,
                        "qep_ee_spc" => q.ee_spc,
                        "qep_ef_sp" => q.ef_sp,
                        _ => q.commutator_ratio,
                    }
                }
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub scenario: Scenario,
    pub axis: String,
    pub values: Vec<f64>,
    pub outputs: Vec<String>,
}

/// Sweep result; row `i` belongs to `values[i]` and starts with the axis value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Evaluates every axis value concurrently; rows come back in input order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    let axis = SweepAxis::parse(&cfg.axis)?;
    validate_outputs(&cfg.outputs)?;
    let rows = cfg
        .values
        .par_iter()
        .map(|&v| {
            let s = cfg.scenario.with_axis(axis, v)?;
            let mut row = Vec::with_capacity(cfg.outputs.len() + 1);
            row.push(v);
            row.extend(evaluate(&s, &cfg.outputs)?);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut columns = vec![axis.name().to_string()];
    columns.extend(cfg.outputs.iter().cloned());
    Ok(SweepTable { columns, rows })
}
