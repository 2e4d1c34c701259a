#![allow(dead_code)]

use gravclock::clockstate::{DensityMatrix, EntropyBase, StateVector, Subsystem, C64};
use gravclock::interferometry::{
    clock_unitary, detection_probabilities, detection_probabilities_from_state, gme_entanglement, gme_final_state_with,
    gme_oracle, ClockModel,
};
use nalgebra::{DVector, Matrix3, Vector3};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar-random pure state of the given dimension.
pub fn haar_amplitudes(rng: &mut impl Rng, dim: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

pub fn haar_state(rng: &mut impl Rng, labels: &[(&str, usize)]) -> StateVector {
    let dim = labels.iter().map(|l| l.1).product();
    let subs = labels.iter().map(|(n, d)| Subsystem::new(*n, *d)).collect();
    StateVector::new(DVector::from_vec(haar_amplitudes(rng, dim)), subs).unwrap()
}

pub fn qubit(rng: &mut impl Rng, name: &str) -> StateVector {
    StateVector::from_amplitudes(name, &haar_amplitudes(rng, 2)).unwrap()
}

/// Random mixture of `k` pure states with the given labels.
pub fn random_mixture(rng: &mut impl Rng, labels: &[(&str, usize)], k: usize) -> DensityMatrix {
    let states: Vec<StateVector> = (0..k).map(|_| haar_state(rng, labels)).collect();
    let mut w: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    DensityMatrix::mixture(&w, &states).unwrap()
}

/// Least-squares residual of `y ≈ a cos(ωx) + b sin(ωx) + c` at fixed `ω`.
pub fn sinusoid_residual(xs: &[f64], ys: &[f64], omega: f64) -> f64 {
    let mut ata = Matrix3::<f64>::zeros();
    let mut aty = Vector3::<f64>::zeros();
    for (&x, &y) in xs.iter().zip(ys) {
        let row = Vector3::new((omega * x).cos(), (omega * x).sin(), 1.0);
        ata += row * row.transpose();
        aty += row * y;
    }
    let Some(coef) = ata.cholesky().map(|c| c.solve(&aty)) else {
        return f64::INFINITY;
    };
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let f = coef[0] * (omega * x).cos() + coef[1] * (omega * x).sin() + coef[2];
            (y - f).powi(2)
        })
        .sum()
}

/// Angular frequency of a single sinusoid sampled at `xs`: grid scan over
/// `[lo, hi]`, then golden-section refinement of the best bracket.
pub fn fit_frequency(xs: &[f64], ys: &[f64], lo: f64, hi: f64) -> f64 {
    let span = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let step = std::f64::consts::PI / (8.0 * span);
    let n = ((hi - lo) / step).ceil() as usize + 1;
    let grid: Vec<f64> = (0..n).map(|k| lo + k as f64 * step).collect();
    let best = (0..n)
        .min_by(|&i, &j| sinusoid_residual(xs, ys, grid[i]).total_cmp(&sinusoid_residual(xs, ys, grid[j])))
        .unwrap();
    let (mut a, mut b) = (grid[best] - step, grid[best] + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (sinusoid_residual(xs, ys, c), sinusoid_residual(xs, ys, d));
    while (b - a) > 1e-13 * grid[best].abs() {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = sinusoid_residual(xs, ys, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = sinusoid_residual(xs, ys, d);
        }
    }
    0.5 * (a + b)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Clock-interferometer outputs for a clock prepared in the eigenstate `index`
/// of `clock`: closed forms of a degenerate clock at that branch energy, plus
/// the state-vector route with the eigenstate as input.
pub fn eigenstate_reference(clock: &ClockModel, index: usize, dt: f64) -> ([f64; 5], [f64; 4]) {
    let e = clock.branch_energies()[index];
    let degenerate = ClockModel::new(e, e, clock.hbar).unwrap();
    let p = detection_probabilities(&degenerate, dt);
    let g = gme_entanglement(&degenerate, dt).unwrap();
    let closed = [p.visibility, p.pr_left, p.pr_right, g.ee_spc, g.ef_sp];
    let mut x = [C64::from(0.0); 2];
    x[index] = C64::from(1.0);
    let (l, r) = detection_probabilities_from_state(clock, dt, &x);
    let state = gme_final_state_with(&clock_unitary(clock, -0.5 * dt), &clock_unitary(clock, 0.5 * dt), &x).unwrap();
    let (ee, ef, _) = gme_oracle(&state, EntropyBase::Bits).unwrap();
    (closed, [l, r, ee, ef])
}
