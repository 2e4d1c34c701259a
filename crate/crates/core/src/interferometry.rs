//! Two-level clocks in a two-path interferometer: evolution unitaries,
//! visibility, detection probabilities, and the entangled state produced when
//! the source's rotation is itself in superposition.
//!
//! Basis conventions: clock `{|g>, |e>}`, paths `{|L'>, |R'>}` after the output
//! beam splitter, source rotation `{|0>, |1>}` for `+J` and `-J`. The beam
//! splitter maps `|L> -> (|L'>+|R'>)/√2` and `|R> -> (|L'>-|R'>)/√2`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DVector;

use crate::clockstate::{
    binary_entropy, concurrence, formation_from_concurrence, reduced_density, tensor_state, von_neumann_entropy,
    witness_value, EntropyBase, StateVector, Subsystem, C64,
};
use crate::error::{domain, Result};
use crate::logdomain::LogMagnitude;

/// How the level splitting enters each branch's phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GapConvention {
    /// Branch energies `Ebar -/+ Delta E`, so the fringe visibility is
    /// `cos(Delta E dtau / hbar)`.
    #[default]
    Full,
    /// Branch energies are the level energies `E_g`, `E_e`, so the visibility
    /// is `cos(Delta E dtau / (2 hbar))`.
    Half,
}

impl GapConvention {
    /// Factor `kappa` multiplying `Delta E dtau / hbar` in the visibility argument.
    pub fn kappa(self) -> f64 {
        match self {
            GapConvention::Full => 1.0,
            GapConvention::Half => 0.5,
        }
    }
}

/// Two-level clock with rest Hamiltonian `E_g |g><g| + E_e |e><e|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockModel {
    pub e_g: f64,
    pub e_e: f64,
    pub hbar: f64,
    pub convention: GapConvention,
    pub entropy_base: EntropyBase,
}

impl ClockModel {
    pub fn new(e_g: f64, e_e: f64, hbar: f64) -> Result<Self> {
        if !(e_g.is_finite() && e_e.is_finite()) {
            return domain("clock energies must be finite");
        }
        if e_e < e_g {
            return domain(format!("E_e ({e_e}) must not be below E_g ({e_g})"));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return domain("hbar must be finite and > 0");
        }
        Ok(Self { e_g, e_e, hbar, convention: GapConvention::Full, entropy_base: EntropyBase::Bits })
    }

    /// Clock with `E_g = 0` and `E_e = hbar * rate`.
    pub fn from_rate(rate: f64, hbar: f64) -> Result<Self> {
        Self::new(0.0, rate * hbar, hbar)
    }

    pub fn with_convention(self, convention: GapConvention) -> Self {
        Self { convention, ..self }
    }

    pub fn with_entropy_base(self, entropy_base: EntropyBase) -> Self {
        Self { entropy_base, ..self }
    }

    /// `Ebar = (E_g + E_e)/2`.
    pub fn mean_energy(&self) -> f64 {
        0.5 * (self.e_g + self.e_e)
    }

    /// `Delta E = E_e - E_g`.
    pub fn gap(&self) -> f64 {
        self.e_e - self.e_g
    }

    /// Energies that set the phase of `|g>` and `|e>` per unit proper time.
    pub fn branch_energies(&self) -> [f64; 2] {
        let half = self.convention.kappa() * self.gap();
        [self.mean_energy() - half, self.mean_energy() + half]
    }

    /// `Ebar dtau / hbar`.
    pub fn mean_phase(&self, delta_tau: f64) -> f64 {
        self.mean_energy() * delta_tau / self.hbar
    }

    /// `kappa Delta E dtau / hbar`, the visibility argument.
    pub fn gap_phase(&self, delta_tau: f64) -> f64 {
        self.convention.kappa() * self.gap() * delta_tau / self.hbar
    }
}

pub type Unitary2 = nalgebra::Matrix2<C64>;

fn phase(e: f64, tau: f64, hbar: f64) -> C64 {
    C64::from_polar(1.0, -e * tau / hbar)
}

/// `diag(exp(E_g' tau / i hbar), exp(E_e' tau / i hbar))` with the branch energies of the convention.
pub fn clock_unitary(clock: &ClockModel, tau: f64) -> Unitary2 {
    let [a, b] = clock.branch_energies();
    Unitary2::new(phase(a, tau, clock.hbar), C64::new(0.0, 0.0), C64::new(0.0, 0.0), phase(b, tau, clock.hbar))
}

/// `U(tau_2) U(tau_1)^dagger` for `tau_2 - tau_1 = delta_tau`; depends only on the difference.
pub fn relative_evolution(clock: &ClockModel, delta_tau: f64) -> Unitary2 {
    clock_unitary(clock, delta_tau)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VisibilityMode {
    /// `cos(kappa Delta E dtau / hbar)`.
    #[default]
    Direct,
    /// `1 - V`, accurate for arguments far below machine epsilon.
    Deficit,
}

/// `1 - cos(x)` without cancellation.
pub fn visibility_deficit_from_phase(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        x2 / 2.0 - x2 * x2 / 24.0
    } else {
        2.0 * (0.5 * x).sin().powi(2)
    }
}

/// `log10(1 - cos x)` for a phase given in log domain; valid for `|x| < 1e-4`
/// when the phase is not representable.
pub fn visibility_deficit_log10(x: LogMagnitude) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let lx = x.log10_abs();
    if lx < -4.0 {
        let series = 1.0 - 10f64.powf(2.0 * lx) / 12.0;
        2.0 * lx - 2f64.log10() + series.log10()
    } else {
        visibility_deficit_from_phase(x.to_f64()).log10()
    }
}

pub fn visibility(clock: &ClockModel, delta_tau: f64, mode: VisibilityMode) -> f64 {
    let x = clock.gap_phase(delta_tau);
    match mode {
        VisibilityMode::Direct => x.cos(),
        VisibilityMode::Deficit => visibility_deficit_from_phase(x),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceResult {
    pub visibility: f64,
    pub pr_left: f64,
    pub pr_right: f64,
    /// `Ebar dtau / hbar`, rad.
    pub phase_mean: f64,
    pub phase_mean_log10: f64,
}

/// `Pr(L') = (1 + V cos(Ebar dtau/hbar))/2`, `Pr(R') = 1 - Pr(L')`.
pub fn detection_probabilities(clock: &ClockModel, delta_tau: f64) -> InterferenceResult {
    let v = visibility(clock, delta_tau, VisibilityMode::Direct);
    let m = clock.mean_phase(delta_tau);
    let pr_left = 0.5 * (1.0 + v * m.cos());
    InterferenceResult {
        visibility: v,
        pr_left,
        pr_right: 0.5 * (1.0 - v * m.cos()),
        phase_mean: m,
        phase_mean_log10: LogMagnitude::from_f64(m).log10_abs(),
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `(|g> + |e>)/√2`.
pub fn default_clock_state() -> [C64; 2] {
    [c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]
}

fn apply(u: &Unitary2, v: &[C64; 2]) -> [C64; 2] {
    [u[(0, 0)] * v[0] + u[(0, 1)] * v[1], u[(1, 0)] * v[0] + u[(1, 1)] * v[1]]
}

/// Amplitudes over `P ⊗ C` after both beam splitters, for a particle entering
/// `|L>` and a clock starting in `xi0`, when the left arm applies `u_left` and
/// the right arm `u_right`.
pub(crate) fn path_clock_amplitudes(u_left: &Unitary2, u_right: &Unitary2, xi0: &[C64; 2]) -> [C64; 4] {
    let s = c(FRAC_1_SQRT_2);
    // first beam splitter on |L>: amplitudes s on |L>, s on |R>
    let left = apply(u_left, xi0).map(|a| a * s);
    let right = apply(u_right, xi0).map(|a| a * s);
    // second beam splitter: L' gets (left + right)/√2, R' gets (left - right)/√2
    [(left[0] + right[0]) * s, (left[1] + right[1]) * s, (left[0] - right[0]) * s, (left[1] - right[1]) * s]
}

/// Detection probabilities read off the evolved path–clock state, independent of
/// the closed form: the left arm evolves by `U(-dtau/2)`, the right by `U(dtau/2)`.
pub fn detection_probabilities_from_state(clock: &ClockModel, delta_tau: f64, xi0: &[C64; 2]) -> (f64, f64) {
    let amps =
        path_clock_amplitudes(&clock_unitary(clock, -0.5 * delta_tau), &clock_unitary(clock, 0.5 * delta_tau), xi0);
    let pl = amps[0].norm_sqr() + amps[1].norm_sqr();
    let pr = amps[2].norm_sqr() + amps[3].norm_sqr();
    let n = pl + pr;
    (pl / n, pr / n)
}

/// Labels of the tripartite source–path–clock state.
pub fn gme_labels() -> Vec<Subsystem> {
    vec![Subsystem::new("S", 2), Subsystem::new("P", 2), Subsystem::new("C", 2)]
}

/// Final `S ⊗ P ⊗ C` state when the source rotation is in `(|0>+|1>)/√2`.
///
/// For `|0>` the left arm carries `U(-dtau/2)` and the right `U(dtau/2)`; for
/// `|1>` the arms swap because reversing `J` reverses `dtau`.
pub fn gme_final_state_with(u_minus: &Unitary2, u_plus: &Unitary2, xi0: &[C64; 2]) -> Result<StateVector> {
    let up = path_clock_amplitudes(u_minus, u_plus, xi0);
    let down = path_clock_amplitudes(u_plus, u_minus, xi0);
    let s = c(FRAC_1_SQRT_2);
    let amps: Vec<C64> = up.iter().chain(down.iter()).map(|a| a * s).collect();
    StateVector::new(DVector::from_vec(amps), gme_labels())
}

pub fn gme_final_state(clock: &ClockModel, delta_tau: f64) -> Result<StateVector> {
    gme_final_state_with(
        &clock_unitary(clock, -0.5 * delta_tau),
        &clock_unitary(clock, 0.5 * delta_tau),
        &default_clock_state(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmeResult {
    pub state: StateVector,
    /// Entropy of the source across the `S | PC` cut.
    pub ee_spc: f64,
    /// Entanglement of formation of the reduced `S, P` state.
    pub ef_sp: f64,
    pub witness: f64,
}

/// Closed forms `E_E = h((1 + V cos m)/2)` and `E_F = h((1 + sqrt(1 - V^2 sin^2 m))/2)`.
pub fn gme_closed_forms(v: f64, mean_phase: f64, base: EntropyBase) -> (f64, f64) {
    let ee = binary_entropy(0.5 * (1.0 + v * mean_phase.cos()), base);
    let ef = formation_from_concurrence(v.abs() * mean_phase.sin().abs(), base);
    (ee, ef)
}

pub fn gme_entanglement(clock: &ClockModel, delta_tau: f64) -> Result<GmeResult> {
    let state = gme_final_state(clock, delta_tau)?;
    let v = visibility(clock, delta_tau, VisibilityMode::Direct);
    let (ee_spc, ef_sp) = gme_closed_forms(v, clock.mean_phase(delta_tau), clock.entropy_base);
    let witness = witness_value(&reduced_density(&state, &["S", "P"])?)?;
    Ok(GmeResult { state, ee_spc, ef_sp, witness })
}

/// Entanglement measures computed numerically from a tripartite state:
/// `(S(rho_S), E_F(rho_SP), C(rho_SP))`.
pub fn gme_oracle(state: &StateVector, base: EntropyBase) -> Result<(f64, f64, f64)> {
    let ee = von_neumann_entropy(&reduced_density(state, &["S"])?, base);
    let c = concurrence(&reduced_density(state, &["S", "P"])?)?;
    Ok((ee, formation_from_concurrence(c, base), c))
}

/// `|eta_+|^2` of the unnormalized clock state accompanying `|+>|L'>`.
pub fn eta_plus_norm_sqr(state: &StateVector) -> f64 {
    // <+| on S, <L'| on P, summed over C; the coefficient of |+>|L'>|eta_+> is 1/√2
    let a = state.amplitudes();
    let s = FRAC_1_SQRT_2;
    let mut acc = 0.0;
    for k in 0..2 {
        let amp = (a[k] + a[4 + k]) * s;
        acc += amp.norm_sqr();
    }
    2.0 * acc
}

/// Tensor of the three single-subsystem states, handy for product-state checks.
pub fn product_state(s: &[C64; 2], p: &[C64; 2], clock: &[C64; 2]) -> Result<StateVector> {
    tensor_state(&[
        StateVector::from_amplitudes("S", s)?,
        StateVector::from_amplitudes("P", p)?,
        StateVector::from_amplitudes("C", clock)?,
    ])
}
