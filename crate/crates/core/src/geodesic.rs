//! Independent check of the first-order proper-time formula: extremal timelike
//! paths are found numerically in the full weak-field metric, and the exact
//! change of the extremal proper time is compared with the linearized integral.
//!
//! Paths are polygons in Cartesian coordinates on a uniform coordinate-time
//! grid. Each segment contributes `dt * sqrt(Q(m, u))`, with `m` the segment
//! midpoint and `u` its velocity, and the interior nodes are moved by Newton
//! iteration until the discrete proper time is stationary.

use nalgebra::{Matrix3, Vector3};

use crate::error::{domain, Error, Result};
use crate::propertime::{delta_tau_first_order, PathSample, PathSpec};
use crate::spacetime::{
    energy_ratio, metric_at, proper_time_rate, CoordinateVelocity, RotatingMassModel, SpacetimePoint,
};

/// Fixed endpoints and the number of straight segments in between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryConditions {
    pub start: SpacetimePoint,
    pub end: SpacetimePoint,
    pub segments: usize,
}

impl BoundaryConditions {
    pub fn new(start: SpacetimePoint, end: SpacetimePoint, segments: usize) -> Result<Self> {
        if segments < 2 {
            return domain("at least two segments are required");
        }
        if !(end.t > start.t) {
            return domain("end event must be later than start event");
        }
        Ok(Self { start, end, segments })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalPathResult {
    /// Segment-midpoint samples with midpoint-rule weights.
    pub path: PathSpec,
    /// Cartesian node positions, endpoints included.
    pub nodes: Vec<[f64; 3]>,
    pub proper_time: f64,
    pub iterations: usize,
    /// Max-norm of the proper-time gradient with respect to interior nodes.
    pub residual_norm: f64,
}

/// Newton iteration limit of [`solve_extremal_path`].
pub const MAX_NEWTON_ITERATIONS: usize = 10_000;
const TAU_TOLERANCE: f64 = 1e-12;
const STEP_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
struct Coefficients {
    /// GM/c^2
    mu: f64,
    /// 4GJ/c^4
    alpha: f64,
    inv_c2: f64,
}

impl Coefficients {
    fn new(model: &RotatingMassModel) -> Self {
        let k = &model.constants;
        let c2 = k.c * k.c;
        Self { mu: k.g * model.mass / c2, alpha: 4.0 * k.g * model.angular_momentum / (c2 * c2), inv_c2: 1.0 / c2 }
    }

    fn q(&self, m: &Vector3<f64>, u: &Vector3<f64>) -> f64 {
        let r = m.norm();
        let r3 = r * r * r;
        let p = m.dot(u);
        let w = m.x * u.y - m.y * u.x;
        1.0 - 2.0 * self.mu / r - u.norm_squared() * self.inv_c2 - 2.0 * self.mu * self.inv_c2 * p * p / r3
            + self.alpha * w / r3
    }

    /// `(Q, dQ/dm, dQ/du)`.
    fn q_grad(&self, m: &Vector3<f64>, u: &Vector3<f64>) -> (f64, Vector3<f64>, Vector3<f64>) {
        let r = m.norm();
        let r3 = r * r * r;
        let r5 = r3 * r * r;
        let p = m.dot(u);
        let w = m.x * u.y - m.y * u.x;
        let q = self.q(m, u);
        let k = 2.0 * self.mu * self.inv_c2;
        let dm = m * (2.0 * self.mu / r3) - (u * (2.0 * p / r3) - m * (3.0 * p * p / r5)) * k
            + (Vector3::new(u.y, -u.x, 0.0) / r3 - m * (3.0 * w / r5)) * self.alpha;
        let du = u * (-2.0 * self.inv_c2) - m * (2.0 * k * p / r3) + Vector3::new(-m.y, m.x, 0.0) * (self.alpha / r3);
        (q, dm, du)
    }

    fn segment(&self, a: &Vector3<f64>, b: &Vector3<f64>, dt: f64) -> Result<f64> {
        let q = self.q(&((a + b) * 0.5), &((b - a) / dt));
        if !(q > 0.0) {
            return Err(Error::NotTimelike { radicand: q });
        }
        Ok(dt * q.sqrt())
    }

    /// Gradient of one segment's proper time with respect to its two nodes.
    fn segment_grad(&self, a: &Vector3<f64>, b: &Vector3<f64>, dt: f64) -> Result<(Vector3<f64>, Vector3<f64>)> {
        let (q, dm, du) = self.q_grad(&((a + b) * 0.5), &((b - a) / dt));
        if !(q > 0.0) {
            return Err(Error::NotTimelike { radicand: q });
        }
        let f = dt / (2.0 * q.sqrt());
        Ok(((dm * 0.5 - du / dt) * f, (dm * 0.5 + du / dt) * f))
    }

    /// 6x6 Hessian of one segment as four 3x3 blocks `[aa, ab, ba, bb]`,
    /// by central differences of the analytic gradient.
    fn segment_hessian(&self, a: &Vector3<f64>, b: &Vector3<f64>, dt: f64) -> Result<[Matrix3<f64>; 4]> {
        let mut blocks = [Matrix3::zeros(); 4];
        for node in 0..2 {
            for j in 0..3 {
                let base = if node == 0 { a } else { b };
                let h = 1e-7 * base.norm().max(1e-3 * (b - a).norm()).max(f64::MIN_POSITIVE);
                let shifted = |sgn: f64| {
                    let (mut a2, mut b2) = (*a, *b);
                    if node == 0 {
                        a2[j] += sgn * h;
                    } else {
                        b2[j] += sgn * h;
                    }
                    self.segment_grad(&a2, &b2, dt)
                };
                let (pa, pb) = shifted(1.0)?;
                let (ma, mb) = shifted(-1.0)?;
                let col_a = (pa - ma) / (2.0 * h);
                let col_b = (pb - mb) / (2.0 * h);
                blocks[node].set_column(j, &col_a);
                blocks[2 + node].set_column(j, &col_b);
            }
        }
        // rows: d(grad_a)/d(a), d(grad_a)/d(b), d(grad_b)/d(a), d(grad_b)/d(b)
        Ok(blocks)
    }
}

fn to_vec(p: [f64; 3]) -> Vector3<f64> {
    Vector3::new(p[0], p[1], p[2])
}

fn total_tau(cf: &Coefficients, nodes: &[Vector3<f64>], dt: f64) -> Result<f64> {
    nodes.windows(2).map(|w| cf.segment(&w[0], &w[1], dt)).sum()
}

/// Solves `D_k x_k + U_k x_{k+1} + L_{k-1} x_{k-1} = r_k` for a block-tridiagonal system.
fn block_thomas(
    diag: &[Matrix3<f64>],
    upper: &[Matrix3<f64>],
    lower: &[Matrix3<f64>],
    rhs: &[Vector3<f64>],
) -> Result<Vec<Vector3<f64>>> {
    let n = diag.len();
    let mut c_prime: Vec<Matrix3<f64>> = Vec::with_capacity(n);
    let mut d_prime: Vec<Vector3<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        let (m, r) = if k == 0 {
            (diag[0], rhs[0])
        } else {
            (diag[k] - lower[k - 1] * c_prime[k - 1], rhs[k] - lower[k - 1] * d_prime[k - 1])
        };
        let inv =
            m.try_inverse().ok_or_else(|| Error::Domain("singular Hessian block in extremal path solve".into()))?;
        c_prime.push(if k + 1 < n { inv * upper[k] } else { Matrix3::zeros() });
        d_prime.push(inv * r);
    }
    let mut x = vec![Vector3::zeros(); n];
    for k in (0..n).rev() {
        x[k] = if k + 1 < n { d_prime[k] - c_prime[k] * x[k + 1] } else { d_prime[k] };
    }
    Ok(x)
}

fn gradient(cf: &Coefficients, nodes: &[Vector3<f64>], dt: f64) -> Result<Vec<Vector3<f64>>> {
    let mut g = vec![Vector3::zeros(); nodes.len()];
    for s in 0..nodes.len() - 1 {
        let (ga, gb) = cf.segment_grad(&nodes[s], &nodes[s + 1], dt)?;
        g[s] += ga;
        g[s + 1] += gb;
    }
    Ok(g[1..nodes.len() - 1].to_vec())
}

/// Finds the polygonal path of maximal proper time between the boundary events
/// in the metric of `model`, starting from the straight line.
pub fn solve_extremal_path(model: &RotatingMassModel, bc: &BoundaryConditions) -> Result<ExtremalPathResult> {
    let n = bc.segments;
    let start = to_vec(bc.start.to_cartesian());
    let end = to_vec(bc.end.to_cartesian());
    let initial: Vec<Vector3<f64>> = (0..=n).map(|k| start + (end - start) * (k as f64 / n as f64)).collect();
    solve_from(model, bc, initial)
}

fn solve_from(
    model: &RotatingMassModel,
    bc: &BoundaryConditions,
    mut nodes: Vec<Vector3<f64>>,
) -> Result<ExtremalPathResult> {
    let cf = Coefficients::new(model);
    let n = bc.segments;
    let dt = (bc.end.t - bc.start.t) / n as f64;
    for p in &nodes {
        model.check_radius(p.norm())?;
    }
    let scale = nodes.iter().map(|p| p.amax()).fold(0.0, f64::max);
    let mut tau = total_tau(&cf, &nodes, dt)?;
    let mut iterations = 0;
    loop {
        if iterations >= MAX_NEWTON_ITERATIONS {
            let g = gradient(&cf, &nodes, dt)?;
            return Err(Error::NoConvergence { iterations, residual: g.iter().map(|v| v.amax()).fold(0.0, f64::max) });
        }
        iterations += 1;
        let g = gradient(&cf, &nodes, dt)?;
        let mut diag = vec![Matrix3::zeros(); n - 1];
        let mut upper = vec![Matrix3::zeros(); n.saturating_sub(2)];
        let mut lower = vec![Matrix3::zeros(); n.saturating_sub(2)];
        for s in 0..n {
            let [aa, ab, ba, bb] = cf.segment_hessian(&nodes[s], &nodes[s + 1], dt)?;
            // interior index of node s is s - 1
            if s >= 1 {
                diag[s - 1] += aa;
            }
            if s < n - 1 {
                diag[s] += bb;
            }
            if s >= 1 && s < n - 1 {
                upper[s - 1] += ab;
                lower[s - 1] += ba;
            }
        }
        let rhs: Vec<Vector3<f64>> = g.iter().map(|v| -v).collect();
        let step = block_thomas(&diag, &upper, &lower, &rhs)?;
        let step_norm = step.iter().map(|v| v.amax()).fold(0.0, f64::max);
        if !step_norm.is_finite() {
            return Err(Error::NoConvergence { iterations, residual: f64::NAN });
        }
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let mut trial = nodes.clone();
            for (k, d) in step.iter().enumerate() {
                trial[k + 1] += d * lambda;
            }
            if let Ok(t) = total_tau(&cf, &trial, dt) {
                if t >= tau - 4.0 * f64::EPSILON * tau.abs() {
                    accepted = Some((trial, t));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let converged_step = step_norm * lambda <= STEP_TOLERANCE * scale;
        match accepted {
            Some((trial, t)) => {
                let change = (t - tau).abs();
                nodes = trial;
                tau = t;
                if change <= TAU_TOLERANCE * tau.abs() && converged_step {
                    break;
                }
            }
            None if step_norm <= STEP_TOLERANCE * scale => break,
            None => {
                let residual = g.iter().map(|v| v.amax()).fold(0.0, f64::max);
                return Err(Error::NoConvergence { iterations, residual });
            }
        }
    }
    let residual_norm = gradient(&cf, &nodes, dt)?.iter().map(|v| v.amax()).fold(0.0, f64::max);
    let path = midpoint_path(bc, &nodes, dt)?;
    Ok(ExtremalPathResult {
        path,
        nodes: nodes.iter().map(|v| [v.x, v.y, v.z]).collect(),
        proper_time: tau,
        iterations,
        residual_norm,
    })
}

fn midpoint_path(bc: &BoundaryConditions, nodes: &[Vector3<f64>], dt: f64) -> Result<PathSpec> {
    let samples = nodes
        .windows(2)
        .enumerate()
        .map(|(s, w)| {
            let m = (w[0] + w[1]) * 0.5;
            let u = (w[1] - w[0]) / dt;
            let t = bc.start.t + (s as f64 + 0.5) * dt;
            Ok(PathSample {
                point: SpacetimePoint::from_cartesian(t, [m.x, m.y, m.z])?,
                velocity: CoordinateVelocity::from_cartesian([m.x, m.y, m.z], [u.x, u.y, u.z]),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let weights = vec![dt; samples.len()];
    PathSpec::with_weights(bc.start, bc.end, samples, weights)
}

/// `sum_k w_k dtau/dt` along `path` in the full metric of `model`.
pub fn proper_time_along(model: &RotatingMassModel, path: &PathSpec) -> Result<f64> {
    path.integrate(|s| proper_time_rate(model, &s.point, &s.velocity))
}

/// Largest relative spread of the conserved energy `(-g_tt - g_{t phi} phi_dot / c) dt/dtau`
/// over the samples of `path`. Zero for an exact geodesic of `model`.
pub fn energy_drift(model: &RotatingMassModel, path: &PathSpec) -> Result<f64> {
    let c = model.constants.c;
    let energies = path
        .samples()
        .iter()
        .map(|s| {
            let m = metric_at(model, &s.point)?;
            Ok((-m.g_tt - m.g_tphi() * s.velocity.phi_dot / c) / proper_time_rate(model, &s.point, &s.velocity)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let e0 = energies[0];
    Ok(energies.iter().map(|e| ((e - e0) / e0).abs()).fold(0.0, f64::max))
}

/// Largest relative spread of [`energy_ratio`] over the samples of `path`, with
/// the speed measured in the spatial background metric.
pub fn energy_ratio_drift(model: &RotatingMassModel, path: &PathSpec) -> Result<f64> {
    let ratios = path
        .samples()
        .iter()
        .map(|s| {
            let m = metric_at(model, &s.point)?;
            let v = &s.velocity;
            let v2 =
                m.g_rr * v.r_dot * v.r_dot + m.g_thth * v.theta_dot * v.theta_dot + m.g_phph * v.phi_dot * v.phi_dot;
            energy_ratio(model, &s.point, v2.sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    let e0 = ratios[0];
    Ok(ratios.iter().map(|e| ((e - e0) / e0).abs()).fold(0.0, f64::max))
}

/// Outcome of comparing exact extremal proper times against the first-order formula.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderReport {
    pub background_tau: f64,
    pub epsilons: Vec<f64>,
    /// `tau*(eps J) - tau*(0)`.
    pub exact_shifts: Vec<f64>,
    /// First-order prediction on the background extremal path.
    pub first_order: Vec<f64>,
    /// `|exact - first order|`.
    pub residuals: Vec<f64>,
    /// Least-squares slope of `log R` against `log |eps|` over the nonzero entries.
    pub slope: f64,
    /// Largest `|shift(eps) + shift(-eps)| / |shift(eps) - shift(-eps)|`, for
    /// epsilons whose negation is also present.
    pub antisymmetry: f64,
}

/// Solves the background and each scaled-rotation problem and compares the
/// exact proper-time shift with [`delta_tau_first_order`].
///
/// `model.angular_momentum` sets the reference rotation; each entry of
/// `epsilons` scales it.
pub fn verify_first_order(
    model: &RotatingMassModel,
    bc: &BoundaryConditions,
    epsilons: &[f64],
) -> Result<FirstOrderReport> {
    if epsilons.is_empty() {
        return domain("no rotation scales given");
    }
    let bg = solve_extremal_path(&model.background(), bc)?;
    let mut exact_shifts = Vec::with_capacity(epsilons.len());
    let mut first_order = Vec::with_capacity(epsilons.len());
    let mut residuals = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let scaled = model.with_angular_momentum(eps * model.angular_momentum);
        let (shift, lin) = if eps == 0.0 {
            (0.0, 0.0)
        } else {
            let start = bg.nodes.iter().map(|p| to_vec(*p)).collect();
            let pert = solve_from(&scaled, bc, start)?;
            (pert.proper_time - bg.proper_time, delta_tau_first_order(&scaled, &bg.path)?)
        };
        exact_shifts.push(shift);
        first_order.push(lin);
        residuals.push((shift - lin).abs());
    }
    let pts: Vec<(f64, f64)> = epsilons
        .iter()
        .zip(&residuals)
        .filter(|(e, r)| **e != 0.0 && **r > 0.0)
        .map(|(e, r)| (e.abs().ln(), r.ln()))
        .collect();
    let slope = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    } else {
        f64::NAN
    };
    let mut antisymmetry: f64 = 0.0;
    for (i, &e) in epsilons.iter().enumerate() {
        if e <= 0.0 {
            continue;
        }
        if let Some(j) = epsilons.iter().position(|&f| f == -e) {
            let (a, b) = (exact_shifts[i], exact_shifts[j]);
            antisymmetry = antisymmetry.max(((a + b) / (a - b)).abs());
        }
    }
    Ok(FirstOrderReport {
        background_tau: bg.proper_time,
        epsilons: epsilons.to_vec(),
        exact_shifts,
        first_order,
        residuals,
        slope,
        antisymmetry,
    })
}
