//! Seeded random sampling of the closed-form/oracle equivalences.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use gravclock::clockstate::{tensor_state, witness_value, DensityMatrix, StateVector, C64};
use gravclock::interferometry::{
    default_clock_state, detection_probabilities, detection_probabilities_from_state, gme_entanglement, gme_oracle,
};
use gravclock::propertime::closed_form_delta_tau;
use gravclock::qep::{qep_gme_entanglement, qep_probabilities, qep_probabilities_from_state};
use gravclock::{
    delta_tau_interferometer, ClockModel, DeltaTauMode, EntropyBase, InterferometerGeometry, QepTestTheory,
    RotatingMassModel,
};

use crate::CliError;

pub struct SuiteResult {
    pub name: &'static str,
    pub samples: usize,
    pub max_error: f64,
    pub tolerance: f64,
}

impl SuiteResult {
    pub fn pass(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

fn qubit(rng: &mut ChaCha8Rng, name: &str) -> Result<StateVector, CliError> {
    let a: Vec<C64> = (0..2).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    Ok(StateVector::from_amplitudes(name, &a)?)
}

/// Clock whose gap and mean phases at `dtau = 1` are `a` and `b`.
fn phase_clock(a: f64, b: f64, base: EntropyBase) -> Result<ClockModel, CliError> {
    Ok(ClockModel::new(b - 0.5 * a, b + 0.5 * a, 1.0)?.with_entropy_base(base))
}

fn interference(rng: &mut ChaCha8Rng, n: usize) -> Result<f64, CliError> {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let clock = phase_clock(rng.random_range(0.0..TAU), rng.random_range(0.0..TAU), EntropyBase::Bits)?;
        let p = detection_probabilities(&clock, 1.0);
        let (l, r) = detection_probabilities_from_state(&clock, 1.0, &default_clock_state());
        worst = worst.max((p.pr_left - l).abs()).max((p.pr_right - r).abs());
    }
    Ok(worst)
}

fn gme(rng: &mut ChaCha8Rng, n: usize, base: EntropyBase) -> Result<f64, CliError> {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let clock = phase_clock(rng.random_range(0.0..TAU), rng.random_range(0.0..TAU), base)?;
        let g = gme_entanglement(&clock, 1.0)?;
        let (ee, ef, _) = gme_oracle(&g.state, base)?;
        worst = worst.max((g.ee_spc - ee).abs()).max((g.ef_sp - ef).abs());
    }
    Ok(worst)
}

fn qep(rng: &mut ChaCha8Rng, n: usize, base: EntropyBase) -> Result<f64, CliError> {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let mut e: Vec<f64> = (0..4).map(|_| rng.random_range(-PI..PI)).collect();
        e[..2].sort_by(f64::total_cmp);
        e[2..].sort_by(f64::total_cmp);
        let theta = rng.random_range(0.0..=FRAC_PI_2);
        let varphi = rng.random_range(0.0..TAU);
        let tt = QepTestTheory::new(e[0], e[1], e[2], e[3], theta, varphi, 1.0)?.with_entropy_base(base);
        let p = qep_probabilities(&tt, 1.0);
        let (l, r) = qep_probabilities_from_state(&tt, 1.0);
        let g = qep_gme_entanglement(&tt, 1.0)?;
        let (ee, ef, _) = gme_oracle(&g.state, base)?;
        worst = worst
            .max((p.pr_left - l).abs())
            .max((p.pr_right - r).abs())
            .max((g.ee_spc - ee).abs())
            .max((g.ef_sp - ef).abs());
    }
    Ok(worst)
}

/// Largest `W - 1` over random separable states; the bound is `W <= 1`.
fn witness(rng: &mut ChaCha8Rng, n: usize) -> Result<f64, CliError> {
    let mut worst = f64::NEG_INFINITY;
    for k in 0..n {
        let rho = if k % 2 == 1 {
            let mut states = Vec::with_capacity(3);
            for _ in 0..3 {
                states.push(tensor_state(&[qubit(rng, "S")?, qubit(rng, "P")?])?);
            }
            let w: Vec<f64> = (0..3).map(|_| rng.random::<f64>() + 1e-3).collect();
            let s: f64 = w.iter().sum();
            DensityMatrix::mixture(&w.iter().map(|x| x / s).collect::<Vec<_>>(), &states)?
        } else {
            tensor_state(&[qubit(rng, "S")?, qubit(rng, "P")?])?.to_density()
        };
        worst = worst.max(witness_value(&rho)? - 1.0);
    }
    Ok(worst.max(0.0))
}

/// Finite-arm quadrature against the closed form scaled by `sin(phi_max)`.
fn delta_tau(rng: &mut ChaCha8Rng, n: usize) -> Result<f64, CliError> {
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let w = 10f64.powf(rng.random_range(-4.0..-2.0));
        let ratio = 10f64.powf(rng.random_range(1.0..3.0));
        let j = rng.random_range(-10.0..10.0);
        let geom = InterferometerGeometry::new(w, ratio * w, rng.random_range(1.0..1e3))?;
        let model = RotatingMassModel::new(rng.random_range(0.0..10.0), j)?;
        let q = delta_tau_interferometer(&model, &geom, DeltaTauMode::Quadrature)?.delta_tau_seconds();
        let c = closed_form_delta_tau(&model, &geom).to_f64() * geom.phi_max().sin();
        worst = worst.max((q / c - 1.0).abs());
    }
    Ok(worst)
}

pub const QUADRATURE_SAMPLE_CAP: usize = 16;

pub fn run_suites(seed: u64, samples: usize, base: EntropyBase) -> Result<Vec<SuiteResult>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quad = samples.min(QUADRATURE_SAMPLE_CAP);
    Ok(vec![
        SuiteResult { name: "interference", samples, max_error: interference(&mut rng, samples)?, tolerance: 1e-12 },
        SuiteResult { name: "gme", samples, max_error: gme(&mut rng, samples, base)?, tolerance: 1e-10 },
        SuiteResult { name: "qep", samples, max_error: qep(&mut rng, samples, base)?, tolerance: 1e-10 },
        SuiteResult { name: "witness", samples, max_error: witness(&mut rng, samples)?, tolerance: 1e-9 },
        SuiteResult { name: "delta_tau", samples: quad, max_error: delta_tau(&mut rng, quad)?, tolerance: 1e-9 },
    ])
}
