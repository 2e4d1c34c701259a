//! Test theory for the quantum equivalence principle: the clock couples to
//! frame dragging through a Hamiltonian `H_f` that need not commute with the
//! Newtonian-sector Hamiltonian `H_N`.
//!
//! `H_N = E_g |g><g| + E_e |e><e|` and `H_f = E'_g |g'><g'| + E'_e |e'><e'|`, with
//! `|g'> = cos θ |g> - e^{iφ} sin θ |e>` and `|e'> = e^{-iφ} sin θ |g> + cos θ |e>`.
//! The clock starts in an eigenstate of `H_N`; for the ground state this is
//! `cos θ |g'> + e^{iφ} sin θ |e'>`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Matrix2;

use crate::clockstate::{reduced_density, witness_value, EntropyBase, StateVector, C64};
use crate::error::{domain, Result};
use crate::interferometry::{gme_closed_forms, gme_final_state_with, path_clock_amplitudes, GapConvention, Unitary2};

/// Default bound on `||[H_N, H_f]|| / (||H_N|| ||H_f||)` above which the factorized phase is flagged.
pub const DEFAULT_COMMUTATOR_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialEigenstate {
    #[default]
    Ground,
    Excited,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QepTestTheory {
    /// Eigenvalues of `H_N`, J.
    pub e_g: f64,
    pub e_e: f64,
    /// Eigenvalues of `H_f`, J.
    pub e_g_prime: f64,
    pub e_e_prime: f64,
    /// Mixing angle between the eigenbases, `[0, π/2]`.
    pub theta: f64,
    pub varphi: f64,
    pub hbar: f64,
    pub convention: GapConvention,
    pub initial: InitialEigenstate,
    pub commutator_threshold: f64,
    pub entropy_base: EntropyBase,
}

impl QepTestTheory {
    pub fn new(e_g: f64, e_e: f64, e_g_prime: f64, e_e_prime: f64, theta: f64, varphi: f64, hbar: f64) -> Result<Self> {
        if ![e_g, e_e, e_g_prime, e_e_prime, varphi].iter().all(|x| x.is_finite()) {
            return domain("test-theory parameters must be finite");
        }
        if e_e < e_g || e_e_prime < e_g_prime {
            return domain("excited energies must not be below ground energies");
        }
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return domain(format!("theta must lie in [0, π/2], got {theta}"));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return domain("hbar must be finite and > 0");
        }
        Ok(Self {
            e_g,
            e_e,
            e_g_prime,
            e_e_prime,
            theta,
            varphi,
            hbar,
            convention: GapConvention::Full,
            initial: InitialEigenstate::Ground,
            commutator_threshold: DEFAULT_COMMUTATOR_THRESHOLD,
            entropy_base: EntropyBase::Bits,
        })
    }

    /// `H_f = H_N`: the equivalence principle holds.
    pub fn equivalent(e_g: f64, e_e: f64, hbar: f64) -> Result<Self> {
        Self::new(e_g, e_e, e_g, e_e, 0.0, 0.0, hbar)
    }

    pub fn with_convention(self, convention: GapConvention) -> Self {
        Self { convention, ..self }
    }

    pub fn with_initial(self, initial: InitialEigenstate) -> Self {
        Self { initial, ..self }
    }

    pub fn with_entropy_base(self, entropy_base: EntropyBase) -> Self {
        Self { entropy_base, ..self }
    }

    /// `Ebar' = (E'_g + E'_e)/2`.
    pub fn mean_energy_prime(&self) -> f64 {
        0.5 * (self.e_g_prime + self.e_e_prime)
    }

    /// `Delta E' = E'_e - E'_g`.
    pub fn gap_prime(&self) -> f64 {
        self.e_e_prime - self.e_g_prime
    }

    /// Columns are `|g'>`, `|e'>` in the `{|g>, |e>}` basis.
    pub fn primed_basis(&self) -> Matrix2<C64> {
        let (s, c) = self.theta.sin_cos();
        let ph = C64::from_polar(1.0, self.varphi);
        Matrix2::new(C64::from(c), ph.conj() * s, -ph * s, C64::from(c))
    }

    pub fn h_n(&self) -> Matrix2<C64> {
        Matrix2::new(C64::from(self.e_g), C64::from(0.0), C64::from(0.0), C64::from(self.e_e))
    }

    pub fn h_f(&self) -> Matrix2<C64> {
        let b = self.primed_basis();
        let d = Matrix2::new(C64::from(self.e_g_prime), C64::from(0.0), C64::from(0.0), C64::from(self.e_e_prime));
        b * d * b.adjoint()
    }

    /// `||[H_N, H_f]|| / (||H_N|| ||H_f||)` in the spectral norm; at most 2.
    pub fn commutator_ratio(&self) -> f64 {
        let (hn, hf) = (self.h_n(), self.h_f());
        let comm = hn * hf - hf * hn;
        let num = spectral_norm(&comm);
        let den = spectral_norm(&hn) * spectral_norm(&hf);
        if num == 0.0 {
            0.0
        } else if den == 0.0 {
            f64::INFINITY
        } else {
            num / den
        }
    }

    pub fn commutator_warning(&self) -> bool {
        self.commutator_ratio() > self.commutator_threshold
    }

    /// Initial clock state in the `{|g>, |e>}` basis.
    pub fn initial_state(&self) -> [C64; 2] {
        match self.initial {
            InitialEigenstate::Ground => [C64::from(1.0), C64::from(0.0)],
            InitialEigenstate::Excited => [C64::from(0.0), C64::from(1.0)],
        }
    }

    /// Populations of the initial state on `|g'>` and `|e'>`.
    fn primed_weights(&self) -> (f64, f64) {
        let b = self.primed_basis();
        let x = self.initial_state();
        let wg = (b[(0, 0)].conj() * x[0] + b[(1, 0)].conj() * x[1]).norm_sqr();
        let we = (b[(0, 1)].conj() * x[0] + b[(1, 1)].conj() * x[1]).norm_sqr();
        (wg, we)
    }

    /// `kappa Delta E' dtau / hbar`.
    pub fn gap_phase(&self, delta_tau: f64) -> f64 {
        self.convention.kappa() * self.gap_prime() * delta_tau / self.hbar
    }

    /// `Ebar' dtau / hbar`.
    pub fn mean_phase(&self, delta_tau: f64) -> f64 {
        self.mean_energy_prime() * delta_tau / self.hbar
    }
}

fn spectral_norm(m: &Matrix2<C64>) -> f64 {
    m.singular_values().max()
}

fn diag_phases(energies: [f64; 2], tau: f64, hbar: f64) -> Matrix2<C64> {
    Matrix2::new(
        C64::from_polar(1.0, -energies[0] * tau / hbar),
        C64::from(0.0),
        C64::from(0.0),
        C64::from_polar(1.0, -energies[1] * tau / hbar),
    )
}

fn branch(mean: f64, gap: f64, convention: GapConvention) -> [f64; 2] {
    let h = convention.kappa() * gap;
    [mean - h, mean + h]
}

/// `exp(H_N tau / i hbar)` with the convention's branch energies.
pub fn newtonian_unitary(tt: &QepTestTheory, tau: f64) -> Unitary2 {
    diag_phases(branch(0.5 * (tt.e_g + tt.e_e), tt.e_e - tt.e_g, tt.convention), tau, tt.hbar)
}

/// `exp(H_f tau / i hbar)` with the convention's branch energies, in the `{|g>, |e>}` basis.
pub fn framedrag_unitary(tt: &QepTestTheory, tau: f64) -> Unitary2 {
    let b = tt.primed_basis();
    b * diag_phases(branch(tt.mean_energy_prime(), tt.gap_prime(), tt.convention), tau, tt.hbar) * b.adjoint()
}

/// Relative evolution between the arms, `exp(H_f dtau / i hbar)`.
pub fn qep_relative_evolution(tt: &QepTestTheory, delta_tau: f64) -> Unitary2 {
    framedrag_unitary(tt, delta_tau)
}

/// Phase operator accumulated along one arm, `exp(H_N I_N / i hbar) exp(H_f I_f / i hbar)`.
///
/// `I_N` and `I_f` are the Newtonian and frame-dragging parts of the arm's
/// proper time (see `propertime::arm_integrals`), so for `H_f = H_N` this is the
/// clock evolution over `I_N + I_f`.
pub fn qep_phase_accumulation(tt: &QepTestTheory, newtonian_integral: f64, framedrag_integral: f64) -> Unitary2 {
    newtonian_unitary(tt, newtonian_integral) * framedrag_unitary(tt, framedrag_integral)
}

/// Visibility, and the fringe offset `xi dtau` in rad, chosen continuous in `dtau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QepVisibility {
    pub visibility: f64,
    /// `xi dtau`, rad.
    pub offset: f64,
    /// `xi`, rad/s; the small-`dtau` limit at `dtau = 0`.
    pub xi: f64,
}

/// `V = sqrt(1 - sin²2θ sin²g)` and `tan(xi dtau) = -cos 2θ tan g` with `g = kappa Delta E' dtau / hbar`.
pub fn qep_visibility(tt: &QepTestTheory, delta_tau: f64) -> QepVisibility {
    let (wg, we) = tt.primed_weights();
    let c = wg - we;
    let g = tt.gap_phase(delta_tau);
    let s2 = (1.0 - c * c).max(0.0);
    let visibility = (1.0 - s2 * g.sin().powi(2)).max(0.0).sqrt();
    let k = (g / PI).round();
    let sign = if c >= 0.0 { 1.0 } else { -1.0 };
    let psi = (c * (g - k * PI).tan()).atan() + sign * k * PI;
    let offset = -psi;
    let xi = if delta_tau == 0.0 { -c * tt.convention.kappa() * tt.gap_prime() / tt.hbar } else { offset / delta_tau };
    QepVisibility { visibility, offset, xi }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QepProbabilities {
    pub visibility: f64,
    pub offset: f64,
    pub xi: f64,
    pub pr_left: f64,
    pub pr_right: f64,
}

/// `Pr(L') = (1 + V cos(Ebar' dtau/hbar + xi dtau))/2`.
pub fn qep_probabilities(tt: &QepTestTheory, delta_tau: f64) -> QepProbabilities {
    let v = qep_visibility(tt, delta_tau);
    let arg = tt.mean_phase(delta_tau) + v.offset;
    QepProbabilities {
        visibility: v.visibility,
        offset: v.offset,
        xi: v.xi,
        pr_left: 0.5 * (1.0 + v.visibility * arg.cos()),
        pr_right: 0.5 * (1.0 - v.visibility * arg.cos()),
    }
}

/// Probabilities from the evolved path–clock state.
pub fn qep_probabilities_from_state(tt: &QepTestTheory, delta_tau: f64) -> (f64, f64) {
    let a = path_clock_amplitudes(
        &framedrag_unitary(tt, -0.5 * delta_tau),
        &framedrag_unitary(tt, 0.5 * delta_tau),
        &tt.initial_state(),
    );
    let pl = a[0].norm_sqr() + a[1].norm_sqr();
    let pr = a[2].norm_sqr() + a[3].norm_sqr();
    (pl / (pl + pr), pr / (pl + pr))
}

/// `|<chi_1|chi_2>|` from the relative evolution applied to the initial state.
pub fn overlap_from_evolution(tt: &QepTestTheory, delta_tau: f64) -> C64 {
    let u = qep_relative_evolution(tt, delta_tau);
    let x = tt.initial_state();
    let ux = [u[(0, 0)] * x[0] + u[(0, 1)] * x[1], u[(1, 0)] * x[0] + u[(1, 1)] * x[1]];
    x[0].conj() * ux[0] + x[1].conj() * ux[1]
}

pub fn qep_final_state(tt: &QepTestTheory, delta_tau: f64) -> Result<StateVector> {
    gme_final_state_with(
        &framedrag_unitary(tt, -0.5 * delta_tau),
        &framedrag_unitary(tt, 0.5 * delta_tau),
        &tt.initial_state(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct QepEntanglement {
    pub state: StateVector,
    pub ee_spc: f64,
    pub ef_sp: f64,
    pub witness: f64,
}

/// `E_E = h((1 + V cos(Ebar' dtau/hbar + xi dtau))/2)` and the matching `E_F`.
pub fn qep_gme_entanglement(tt: &QepTestTheory, delta_tau: f64) -> Result<QepEntanglement> {
    let v = qep_visibility(tt, delta_tau);
    let (ee_spc, ef_sp) = gme_closed_forms(v.visibility, tt.mean_phase(delta_tau) + v.offset, tt.entropy_base);
    let state = qep_final_state(tt, delta_tau)?;
    let witness = witness_value(&reduced_density(&state, &["S", "P"])?)?;
    Ok(QepEntanglement { state, ee_spc, ef_sp, witness })
}

#[derive(Debug, Clone, PartialEq)]
pub struct QepResult {
    pub visibility: f64,
    pub offset: f64,
    pub xi: f64,
    pub pr_left: f64,
    pub pr_right: f64,
    pub ee_spc: f64,
    pub ef_sp: f64,
    pub witness: f64,
    pub commutator_ratio: f64,
    pub commutator_warning: bool,
}

pub fn qep_evaluate(tt: &QepTestTheory, delta_tau: f64) -> Result<QepResult> {
    let p = qep_probabilities(tt, delta_tau);
    let e = qep_gme_entanglement(tt, delta_tau)?;
    Ok(QepResult {
        visibility: p.visibility,
        offset: p.offset,
        xi: p.xi,
        pr_left: p.pr_left,
        pr_right: p.pr_right,
        ee_spc: e.ee_spc,
        ef_sp: e.ef_sp,
        witness: e.witness,
        commutator_ratio: tt.commutator_ratio(),
        commutator_warning: tt.commutator_warning(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    fn tt(theta: f64) -> QepTestTheory {
        QepTestTheory::new(0.0, 1.0, 0.2, 1.4, theta, 0.7, 1.0).unwrap()
    }

    fn unitary_err(u: &Unitary2) -> f64 {
        (u.adjoint() * u - Unitary2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn evolution_properties() {
        let u = qep_relative_evolution(&tt(0.0), 0.9);
        assert!(u[(0, 1)].norm() < 1e-15 && u[(1, 0)].norm() < 1e-15);
        assert!(unitary_err(&qep_relative_evolution(&tt(0.4), 0.9)) < 1e-14);
        let deg = QepTestTheory::new(0.0, 1.0, 0.5, 0.5, 0.3, 0.2, 1.0).unwrap();
        let u = qep_relative_evolution(&deg, 1.3);
        let g = C64::from_polar(1.0, -0.5 * 1.3);
        assert!((u - Unitary2::identity() * g).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn visibility_examples() {
        for dt in [0.1, 1.0, 7.0] {
            assert!((qep_visibility(&tt(0.0), dt).visibility - 1.0).abs() < 1e-15);
        }
        let full = QepTestTheory::new(0.0, 1.0, 0.0, 1.0, FRAC_PI_4, 0.0, 1.0).unwrap();
        assert!(qep_visibility(&full, FRAC_PI_2).visibility < 1e-12);
        let t = QepTestTheory::new(0.0, 1.0, 0.0, 1.0, FRAC_PI_8, 0.3, 1.0).unwrap();
        let v = qep_visibility(&t, FRAC_PI_4).visibility;
        assert!((v - 0.866_025).abs() < 1e-6);
        assert!((v - overlap_from_evolution(&t, FRAC_PI_4).norm()).abs() < 1e-12);
    }

    #[test]
    fn offset_matches_overlap_phase() {
        let t = tt(0.5);
        for dt in [0.3, 2.0, 5.5, 11.0] {
            let ov = overlap_from_evolution(&t, dt);
            let v = qep_visibility(&t, dt);
            let expected = C64::from_polar(v.visibility, -(t.mean_phase(dt) + v.offset));
            assert!((ov - expected).norm() < 1e-12, "{dt}: {ov} vs {expected}");
        }
    }

    #[test]
    fn xi_small_delay_limit() {
        let t = tt(0.5);
        let at0 = qep_visibility(&t, 0.0).xi;
        let near = qep_visibility(&t, 1e-7).xi;
        assert!((at0 - near).abs() < 1e-6 * at0.abs());
        assert_eq!(qep_visibility(&t, 0.0).offset, 0.0);
    }

    #[test]
    fn probabilities_agree_with_state() {
        let t = tt(1.1);
        let p = qep_probabilities(&t, 0.0);
        assert_eq!((p.pr_left, p.pr_right), (1.0, 0.0));
        for dt in [0.4, 3.3] {
            let p = qep_probabilities(&t, dt);
            let (l, r) = qep_probabilities_from_state(&t, dt);
            assert!((p.pr_left - l).abs() < 1e-12 && (p.pr_right - r).abs() < 1e-12);
        }
    }

    #[test]
    fn excited_initial_state() {
        let t = tt(0.5).with_initial(InitialEigenstate::Excited);
        for dt in [0.4, 3.3] {
            let p = qep_probabilities(&t, dt);
            let (l, _) = qep_probabilities_from_state(&t, dt);
            assert!((p.pr_left - l).abs() < 1e-12);
        }
    }

    #[test]
    fn commutator_diagnostic() {
        assert_eq!(tt(0.0).commutator_ratio(), 0.0);
        assert!(!tt(0.0).commutator_warning());
        let r = tt(0.5).commutator_ratio();
        // [H_N, H_f] has norm ΔE ΔE' sin2θ / 2 for diagonal H_N = diag(0, 1); ||H_f|| = 1.4
        assert!((r - 1.2 * 1.0f64.sin() / 2.0 / 1.4).abs() < 1e-12);
        assert!(tt(0.5).commutator_warning());
        // invariant under a change of energy unit
        let si = QepTestTheory::new(0.0, 1e-19, 0.2e-19, 1.4e-19, 0.5, 0.7, 1e-34).unwrap();
        assert!((si.commutator_ratio() - r).abs() < 1e-12);
    }

    #[test]
    fn phase_accumulation_reduces_to_clock() {
        let t = QepTestTheory::equivalent(0.3, 1.1, 1.0).unwrap();
        let u = qep_phase_accumulation(&t, 2.0, 0.25);
        let v = newtonian_unitary(&t, 2.25);
        assert!((u - v).iter().all(|z| z.norm() < 1e-14));
        let p = qep_phase_accumulation(&tt(0.6), 1.7, 0.0);
        assert!(p[(0, 1)].norm() < 1e-15 && p[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_angle() {
        assert!(QepTestTheory::new(0.0, 1.0, 0.0, 1.0, 2.0, 0.0, 1.0).is_err());
        assert!(QepTestTheory::new(1.0, 0.0, 0.0, 1.0, 0.1, 0.0, 1.0).is_err());
    }
}
