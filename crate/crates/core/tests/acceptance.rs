//! One line per acceptance criterion, with pinned tolerances and runtimes.

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};
use std::time::{Duration, Instant};

use common::{eigenstate_reference, fit_frequency, loglog_slope, qubit, rng};
use gravclock::clockstate::{tensor_state, witness_value, DensityMatrix, EntropyBase};
use gravclock::detectability::{phase_shift_estimate, required_ell};
use gravclock::geodesic::{energy_ratio_drift, solve_extremal_path, verify_first_order};
use gravclock::interferometry::*;
use gravclock::propertime::closed_form_delta_tau;
use gravclock::qep::*;
use gravclock::*;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: u32, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let pass = out.pass && elapsed < limit;
    println!(
        "criterion {id}: {} | {} | {:.3} s (limit {} s)",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

fn criterion_1() -> Outcome {
    let k = PhysicalConstants::CODATA;
    let independent = 16.0 * k.g * 1.0 / (k.c * k.c * k.c * k.c * 1e-3);
    let model = RotatingMassModel::new(1.0, 1.0).unwrap();
    let geom = InterferometerGeometry::with_width(1e-3, 0.0).unwrap();
    let closed = delta_tau_interferometer(&model, &geom, DeltaTauMode::ClosedForm).unwrap().delta_tau_seconds();
    let fast = InterferometerGeometry::with_width(1e-3, 1.0).unwrap();
    let quad = delta_tau_interferometer(&model, &fast, DeltaTauMode::Quadrature).unwrap().delta_tau_seconds();
    let e_ind = (closed / independent - 1.0).abs();
    let e_ref = (closed / 1.3220e-40 - 1.0).abs();
    let e_quad = (quad / closed - 1.0).abs();
    Outcome {
        pass: e_ind <= 1e-4 && e_ref <= 1e-4 && e_quad <= 2e-3,
        detail: format!(
            "delta_tau = {closed:.5e} s, rel. err vs arithmetic {e_ind:.1e} (<= 1e-4), vs 1.3220e-40 {e_ref:.1e} (<= 1e-4), quadrature L=1e3 w {e_quad:.1e} (<= 2e-3)"
        ),
    }
}

fn criterion_2() -> Outcome {
    let q = DetectabilityQuery::new(1e15, 1e-3, 0.0, LogMagnitude::ONE).unwrap();
    let phase = phase_shift_estimate(&q);
    let ell = required_ell(1.0, 1e15, 1e-3, 0.0, &PhysicalConstants::CODATA).unwrap();
    Outcome {
        pass: (-60.5..=-58.5).contains(&phase) && (58.0..=61.0).contains(&ell),
        detail: format!(
            "log10 phase per ell = {phase:.3} in [-60.5, -58.5], log10 ell for 1 rad = {ell:.3} in [58, 61]"
        ),
    }
}

fn criterion_3() -> Outcome {
    let units = PhysicalConstants::new(1.0, 1.0, 1.0).unwrap();
    let model = RotatingMassModel::with_constants(1e-6, 1e-5, units).unwrap();
    let arc = BoundaryConditions::new(
        SpacetimePoint::equatorial(0.0, 1.0, -0.6).unwrap(),
        SpacetimePoint::equatorial(565.0, 1.0, 0.6).unwrap(),
        400,
    )
    .unwrap();
    let radial = BoundaryConditions::new(
        SpacetimePoint::equatorial(0.0, 1.0, 0.0).unwrap(),
        SpacetimePoint::equatorial(565.0, 2.0, 0.3).unwrap(),
        400,
    )
    .unwrap();
    let eps = [0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0];
    let report = verify_first_order(&model, &arc, &eps).unwrap();
    let mut drift: f64 = 0.0;
    for m in [model.background(), model] {
        for bc in [&arc, &radial] {
            let sol = solve_extremal_path(&m, bc).unwrap();
            drift = drift.max(energy_ratio_drift(&m, &sol.path).unwrap());
        }
    }
    Outcome {
        pass: report.slope >= 1.8 && drift < 1e-9,
        detail: format!(
            "residual slope {:.4} over eps in [1e-2, 1] (>= 1.8), max energy_ratio drift {drift:.1e} (< 1e-9)",
            report.slope
        ),
    }
}

fn grid_clock(a: f64, b: f64) -> ClockModel {
    ClockModel::new(b - 0.5 * a, b + 0.5 * a, 1.0).unwrap()
}

fn criterion_4() -> Outcome {
    let (mut ee_err, mut ef_err, mut pr_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..10 {
        for j in 0..10 {
            let (a, b) = (TAU * i as f64 / 10.0, TAU * j as f64 / 10.0);
            let clock = grid_clock(a, b);
            let g = gme_entanglement(&clock, 1.0).unwrap();
            let (ee, ef, _) = gme_oracle(&g.state, EntropyBase::Bits).unwrap();
            ee_err = ee_err.max((g.ee_spc - ee).abs());
            ef_err = ef_err.max((g.ef_sp - ef).abs());
            let p = detection_probabilities(&clock, 1.0);
            let (l, r) = detection_probabilities_from_state(&clock, 1.0, &default_clock_state());
            pr_err = pr_err.max((p.pr_left - l).abs()).max((p.pr_right - r).abs());
        }
    }
    Outcome {
        pass: ee_err <= 1e-10 && ef_err <= 1e-10 && pr_err <= 1e-12,
        detail: format!("max |E_E - oracle| {ee_err:.1e}, |E_F - oracle| {ef_err:.1e} (<= 1e-10), |Pr - state| {pr_err:.1e} (<= 1e-12)"),
    }
}

fn criterion_5() -> Outcome {
    let mut r = rng(51);
    let mut reg_err: f64 = 0.0;
    for k in 0..100 {
        let eg = r.random::<f64>() * 2.0;
        let ee = eg + r.random::<f64>() * 3.0;
        let dt = (r.random::<f64>() - 0.5) * 8.0;
        let (initial, index) =
            if k % 2 == 0 { (InitialEigenstate::Ground, 0) } else { (InitialEigenstate::Excited, 1) };
        let tt = QepTestTheory::equivalent(eg, ee, 1.0).unwrap().with_initial(initial);
        let q = qep_evaluate(&tt, dt).unwrap();
        let (closed, oracle) = eigenstate_reference(&ClockModel::new(eg, ee, 1.0).unwrap(), index, dt);
        let got = [q.visibility, q.pr_left, q.pr_right, q.ee_spc, q.ef_sp];
        for (a, b) in got.iter().zip(&closed) {
            reg_err = reg_err.max((a - b).abs());
        }
        for (a, b) in got[1..].iter().zip(&oracle) {
            reg_err = reg_err.max((a - b).abs());
        }
    }
    let null =
        qep_visibility(&QepTestTheory::new(0.0, 1.0, 0.0, 1.0, FRAC_PI_4, 0.0, 1.0).unwrap(), FRAC_PI_2).visibility;
    let mut grid_err: f64 = 0.0;
    for k in 0..100 {
        let theta = FRAC_PI_2 * (k % 10) as f64 / 9.0;
        let egp = r.random::<f64>();
        let tt =
            QepTestTheory::new(0.0, 1.0, egp, egp + 0.2 + 2.0 * r.random::<f64>(), theta, TAU * r.random::<f64>(), 1.0)
                .unwrap();
        let dt = 0.1 + 6.0 * r.random::<f64>();
        let e = qep_gme_entanglement(&tt, dt).unwrap();
        let (ee, ef, _) = gme_oracle(&e.state, EntropyBase::Bits).unwrap();
        let p = qep_probabilities(&tt, dt);
        let (l, rr) = qep_probabilities_from_state(&tt, dt);
        grid_err = grid_err
            .max((e.ee_spc - ee).abs())
            .max((e.ef_sp - ef).abs())
            .max((p.pr_left - l).abs())
            .max((p.pr_right - rr).abs());
    }
    let k = PhysicalConstants::CODATA;
    let gap = 1e15 * k.hbar;
    let tt = QepTestTheory::new(0.0, gap, 0.0, gap, 0.5, 0.3, k.hbar).unwrap();
    let model = RotatingMassModel::new(0.0, 1e27).unwrap();
    let xs: Vec<f64> = (0..200).map(|i| 10.0 + 990.0 * i as f64 / 199.0).collect();
    let ys: Vec<f64> = xs
        .iter()
        .map(|x| {
            let geom = InterferometerGeometry::with_width(1.0 / x, 0.0).unwrap();
            qep_visibility(&tt, closed_form_delta_tau(&model, &geom).to_f64()).visibility.powi(2)
        })
        .collect();
    let expected = gap * 16.0 * k.g * 1e27 / (k.c.powi(4) * k.hbar);
    let fitted = 0.5 * fit_frequency(&xs, &ys, 0.5 * expected, 8.0 * expected);
    let f_err = (fitted / expected - 1.0).abs();
    Outcome {
        pass: reg_err <= 1e-10 && null.abs() <= 1e-12 && grid_err <= 1e-10 && f_err <= 1e-6,
        detail: format!(
            "theta=0 regression {reg_err:.1e} (<= 1e-10), V(pi/4, pi/2) = {null:.1e} (<= 1e-12), grid {grid_err:.1e} (<= 1e-10), 1/w frequency rel. err {f_err:.1e} (<= 1e-6)"
        ),
    }
}

fn criterion_6() -> Outcome {
    let mut r = rng(61);
    let mut worst: f64 = 0.0;
    for k in 0..10_000 {
        let rho = if k % 4 == 3 {
            let states: Vec<_> =
                (0..3).map(|_| tensor_state(&[qubit(&mut r, "S"), qubit(&mut r, "P")]).unwrap()).collect();
            let w: Vec<f64> = (0..3).map(|_| r.random::<f64>() + 1e-3).collect();
            let s: f64 = w.iter().sum();
            DensityMatrix::mixture(&w.iter().map(|x| x / s).collect::<Vec<_>>(), &states).unwrap()
        } else {
            tensor_state(&[qubit(&mut r, "S"), qubit(&mut r, "P")]).unwrap().to_density()
        };
        worst = worst.max(witness_value(&rho).unwrap());
    }
    // certification uses the same margin as the separable bound above
    let margin = 1e-9;
    let mut violations = 0;
    let mut above = 0;
    let mut spread: f64 = 0.0;
    for i in 0..10 {
        for j in 0..10 {
            let g = gme_entanglement(&grid_clock(TAU * i as f64 / 10.0, TAU * j as f64 / 10.0), 1.0).unwrap();
            spread = spread.max((g.witness - 1.0).abs());
            if g.witness > 1.0 + margin {
                above += 1;
                if g.ef_sp <= 0.0 {
                    violations += 1;
                }
            }
        }
    }
    Outcome {
        pass: worst <= 1.0 + 1e-9 && violations == 0,
        detail: format!(
            "max W over 1e4 separable states {worst:.12} (<= 1 + 1e-9), GME grid points with W > 1 + 1e-9: {above}, of which E_F = 0: {violations}; max |W - 1| on grid {spread:.1e}"
        ),
    }
}

fn criterion_7() -> Outcome {
    let geom = InterferometerGeometry::with_width(1e-3, 1.0).unwrap();
    let dt = |j: f64, mode| {
        let m = RotatingMassModel::new(1.0, j).unwrap();
        delta_tau_interferometer(&m, &geom, mode).unwrap().delta_tau_seconds()
    };
    let mut lin_err: f64 = 0.0;
    let mut flip_exact = true;
    for mode in [DeltaTauMode::ClosedForm, DeltaTauMode::Quadrature] {
        let base = dt(1.0, mode);
        for s in [2.0, 10.0, 1e3] {
            lin_err = lin_err.max((dt(s, mode) / (s * base) - 1.0).abs());
        }
        flip_exact &= dt(-1.0, mode) == -base;
    }
    let widths: Vec<f64> = (0..=20).map(|k| 1e-3 * 10f64.powf(k as f64 / 10.0)).collect();
    let model = RotatingMassModel::new(1.0, 1.0).unwrap();
    let dts: Vec<f64> = widths
        .iter()
        .map(|&w| closed_form_delta_tau(&model, &InterferometerGeometry::with_width(w, 1.0).unwrap()).to_f64())
        .collect();
    let slope = loglog_slope(&widths, &dts);
    Outcome {
        pass: lin_err <= 1e-12 && (slope + 1.0).abs() <= 1e-9 && flip_exact,
        detail: format!(
            "linearity in J rel. err {lin_err:.1e} (<= 1e-12), log-log slope vs w {slope:.12} (-1 +/- 1e-9), J -> -J exact: {flip_exact}"
        ),
    }
}

fn main() {
    let results = [
        run(1, Duration::from_secs(1), criterion_1),
        run(2, Duration::from_secs(1), criterion_2),
        run(3, Duration::from_secs(120), criterion_3),
        run(4, Duration::from_secs(10), criterion_4),
        run(5, Duration::from_secs(30), criterion_5),
        run(6, Duration::from_secs(10), criterion_6),
        run(7, Duration::from_secs(5), criterion_7),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, p)| !**p).map(|(i, _)| i + 1).collect();
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
