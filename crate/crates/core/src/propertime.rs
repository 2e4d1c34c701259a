//! First-order proper-time deviations caused by the frame-dragging term, and
//! the resulting arm difference of a two-path interferometer.
//!
//! Sign convention: `delta_tau` of an interferometer is `tau(right) - tau(left)`,
//! where the right arm moves in the +phi sense (prograde for `J > 0`).

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::logdomain::LogMagnitude;
use crate::quadrature::{refine, simpson_weights};
use crate::spacetime::{
    coordinate_four_velocity, metric_at, proper_time_rate, CoordinateVelocity, PhysicalConstants, RotatingMassModel,
    SpacetimePoint,
};

/// One sample of a trajectory: an event and its coordinate velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    pub point: SpacetimePoint,
    pub velocity: CoordinateVelocity,
}

/// A discretized timelike trajectory parameterized by coordinate time.
///
/// Integrals along the path are weighted sums over the samples. Paths built
/// from node samples use composite Simpson weights; paths produced by the
/// geodesic solver carry segment-midpoint samples with midpoint-rule weights,
/// which is why the endpoints are kept separately from the samples.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    start: SpacetimePoint,
    end: SpacetimePoint,
    samples: Vec<PathSample>,
    weights: Vec<f64>,
}

impl PathSpec {
    /// Path whose samples include both endpoints; Simpson weights in `t`.
    pub fn from_samples(samples: Vec<PathSample>) -> Result<Self> {
        if samples.len() < 2 {
            return domain("a path needs at least two samples");
        }
        let times: Vec<f64> = samples.iter().map(|s| s.point.t).collect();
        check_increasing(&times)?;
        let weights = simpson_weights(&times);
        let start = samples[0].point;
        let end = samples[samples.len() - 1].point;
        Ok(Self { start, end, samples, weights })
    }

    /// Path with explicit quadrature weights (in seconds of coordinate time).
    pub fn with_weights(
        start: SpacetimePoint,
        end: SpacetimePoint,
        samples: Vec<PathSample>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if samples.is_empty() || samples.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: samples.len(), found: weights.len() });
        }
        if !(end.t > start.t) {
            return domain("path end time must exceed start time");
        }
        let times: Vec<f64> = samples.iter().map(|s| s.point.t).collect();
        check_increasing(&times)?;
        if times[0] < start.t || times[times.len() - 1] > end.t {
            return domain("samples must lie within the path's time span");
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return domain("quadrature weights must be finite");
        }
        Ok(Self { start, end, samples, weights })
    }

    pub fn start(&self) -> &SpacetimePoint {
        &self.start
    }

    pub fn end(&self) -> &SpacetimePoint {
        &self.end
    }

    pub fn samples(&self) -> &[PathSample] {
        &self.samples
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn duration(&self) -> f64 {
        self.end.t - self.start.t
    }

    /// `sum_k w_k f(sample_k)`.
    pub fn integrate<F>(&self, mut f: F) -> Result<f64>
    where
        F: FnMut(&PathSample) -> Result<f64>,
    {
        let mut acc = 0.0;
        for (s, w) in self.samples.iter().zip(&self.weights) {
            acc += w * f(s)?;
        }
        Ok(acc)
    }

    /// The same spatial curve traversed in the opposite direction over the same time span.
    pub fn reversed(&self) -> PathSpec {
        let (t0, t1) = (self.start.t, self.end.t);
        let flip = |p: &SpacetimePoint, t: f64| SpacetimePoint { t, ..*p };
        let samples = self
            .samples
            .iter()
            .rev()
            .map(|s| PathSample {
                point: flip(&s.point, t0 + t1 - s.point.t),
                velocity: CoordinateVelocity::new(-s.velocity.r_dot, -s.velocity.theta_dot, -s.velocity.phi_dot),
            })
            .collect();
        let weights = self.weights.iter().rev().copied().collect();
        PathSpec { start: flip(&self.end, t0), end: flip(&self.start, t1), samples, weights }
    }

    /// Checks that every sample is timelike under the Schwarzschild background.
    pub fn validate_timelike(&self, model: &RotatingMassModel) -> Result<()> {
        let bg = model.background();
        for s in &self.samples {
            proper_time_rate(&bg, &s.point, &s.velocity)?;
        }
        Ok(())
    }
}

fn check_increasing(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("coordinate time must be strictly increasing along a path");
    }
    Ok(())
}

/// Linearized rate change `-(h_{mu nu} u^mu u^nu) / (2 c^2 dtaubar/dt)` at one sample.
fn first_order_integrand(model: &RotatingMassModel, s: &PathSample) -> Result<f64> {
    let c = model.constants.c;
    let m = metric_at(model, &s.point)?;
    let rate_bg = proper_time_rate(&model.background(), &s.point, &s.velocity)?;
    let u = coordinate_four_velocity(c, &s.velocity);
    Ok(-m.perturbation_contract(u) / (2.0 * c * c * rate_bg))
}

/// First-order change of proper time along `background_path` caused by the
/// frame-dragging part of the metric.
///
/// The path should extremize proper time in the background metric; the result
/// then equals the proper-time change of the true extremal path to first order.
pub fn delta_tau_first_order(model: &RotatingMassModel, background_path: &PathSpec) -> Result<f64> {
    background_path.integrate(|s| first_order_integrand(model, s))
}

/// Proper-time difference between `forward_path` and its time-reversed partner,
/// `-(2/c) * integral g_{t phi} (dt/dtaubar) dphi`.
pub fn delta_tau_pair(model: &RotatingMassModel, forward_path: &PathSpec) -> Result<f64> {
    let c = model.constants.c;
    let bg = model.background();
    forward_path.integrate(|s| {
        let g_tphi = metric_at(model, &s.point)?.g_tphi();
        let rate_bg = proper_time_rate(&bg, &s.point, &s.velocity)?;
        Ok(-2.0 / c * g_tphi * s.velocity.phi_dot / rate_bg)
    })
}

/// Path integrals entering the clock phase of one arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmIntegrals {
    /// `integral (1 - v^2/2c^2 + Phi/c^2 - Phi^2/c^4) dt`, seconds.
    pub newtonian: f64,
    /// `integral g_{t phi} / (c gbar_tt) dphi`, seconds; the frame-dragging share of proper time.
    pub frame_dragging: f64,
}

pub fn arm_integrals(model: &RotatingMassModel, path: &PathSpec) -> Result<ArmIntegrals> {
    let c = model.constants.c;
    let c2 = c * c;
    let newtonian = path.integrate(|s| {
        let m = metric_at(model, &s.point)?;
        let v = &s.velocity;
        let v2 = m.g_rr * v.r_dot * v.r_dot + m.g_thth * v.theta_dot * v.theta_dot + m.g_phph * v.phi_dot * v.phi_dot;
        let phi_n = model.potential(s.point.r);
        Ok(1.0 - v2 / (2.0 * c2) + phi_n / c2 - phi_n * phi_n / (c2 * c2))
    })?;
    let frame_dragging = path.integrate(|s| {
        let m = metric_at(model, &s.point)?;
        Ok(m.g_tphi() / (c * m.g_tt) * s.velocity.phi_dot)
    })?;
    Ok(ArmIntegrals { newtonian, frame_dragging })
}

/// Straight-arm interferometer in the equatorial plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferometerGeometry {
    /// Arm separation `w`, m; each arm passes the rotation axis at distance `w/2`.
    pub width: f64,
    /// Half-length `L` of each arm, m.
    pub half_length: f64,
    /// Particle speed far from the source, m/s.
    pub v0: f64,
}

/// Ratio `L/w` used when no arm length is given.
pub const DEFAULT_LENGTH_RATIO: f64 = 1e3;

impl InterferometerGeometry {
    pub fn new(width: f64, half_length: f64, v0: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return domain(format!("interferometer width must be > 0, got {width}"));
        }
        if !(half_length.is_finite() && half_length > width) {
            return domain(format!("arm half-length must exceed the width, got L = {half_length}, w = {width}"));
        }
        if !(v0.is_finite() && v0 >= 0.0) {
            return domain(format!("v0 must be finite and >= 0, got {v0}"));
        }
        Ok(Self { width, half_length, v0 })
    }

    /// Geometry with `L = 10^3 w`.
    pub fn with_width(width: f64, v0: f64) -> Result<Self> {
        Self::new(width, DEFAULT_LENGTH_RATIO * width, v0)
    }

    /// `K = 1 + v0^2 / (2 c^2)`.
    pub fn k_factor(&self, c: f64) -> f64 {
        1.0 + self.v0 * self.v0 / (2.0 * c * c)
    }

    /// Half-angle subtended by an arm seen from the axis, `atan(2L/w)`.
    pub fn phi_max(&self) -> f64 {
        (2.0 * self.half_length / self.width).atan()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArmSide {
    Left,
    Right,
}

/// Default interval count for [`build_straight_arm`].
pub const DEFAULT_ARM_INTERVALS: usize = 4096;

pub fn build_straight_arm(model: &RotatingMassModel, geom: &InterferometerGeometry, side: ArmSide) -> Result<PathSpec> {
    build_straight_arm_with(model, geom, side, DEFAULT_ARM_INTERVALS)
}

/// Straight equatorial arm at distance `w/2` from the axis, length `2L`,
/// traversed in +y at constant coordinate speed `v0`.
///
/// Samples are uniform in the azimuth seen from the axis, which concentrates
/// them near closest approach. The right arm sits at `x = +w/2`; the left arm
/// is its mirror image `x -> -x`, i.e. `phi -> pi - phi`.
pub fn build_straight_arm_with(
    model: &RotatingMassModel,
    geom: &InterferometerGeometry,
    side: ArmSide,
    intervals: usize,
) -> Result<PathSpec> {
    let v0 = geom.v0;
    if !(v0 > 0.0) {
        return domain("arm paths need v0 > 0 to be parameterized by coordinate time");
    }
    if v0 >= model.constants.c {
        return domain("v0 must be below the speed of light");
    }
    if intervals < 2 {
        return domain("an arm needs at least two intervals");
    }
    let half_w = 0.5 * geom.width;
    let phi_max = geom.phi_max();
    let samples = (0..=intervals)
        .map(|j| {
            let phi = -phi_max + 2.0 * phi_max * j as f64 / intervals as f64;
            let (s, c) = phi.sin_cos();
            let y = half_w * phi.tan();
            let r = half_w / c;
            let t = (y + geom.half_length) / v0;
            let phi_dot = v0 * c / r;
            let (azimuth, phi_dot) = match side {
                ArmSide::Right => (phi, phi_dot),
                ArmSide::Left => (PI - phi, -phi_dot),
            };
            Ok(PathSample {
                point: SpacetimePoint::equatorial(t, r, azimuth)?,
                velocity: CoordinateVelocity::new(v0 * s, 0.0, phi_dot),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    PathSpec::from_samples(samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaTauMode {
    /// `16 G J K / (c^4 w)`, the infinite-arm limit.
    ClosedForm,
    /// Refined quadrature of the pair difference over finite arms.
    Quadrature,
}

/// Proper-time difference plus the clock phases it generates.
///
/// Every magnitude is carried as a [`LogMagnitude`]; phases are attached once a
/// clock is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBundle {
    pub delta_tau: LogMagnitude,
    /// `Ebar * delta_tau / hbar`, rad.
    pub phase_mean: Option<LogMagnitude>,
    /// `Delta E * delta_tau / hbar`, rad.
    pub phase_gap: Option<LogMagnitude>,
}

impl PhaseBundle {
    pub fn from_delta_tau(delta_tau: LogMagnitude) -> Self {
        Self { delta_tau, phase_mean: None, phase_gap: None }
    }

    pub fn delta_tau_seconds(&self) -> f64 {
        self.delta_tau.to_f64()
    }

    pub fn log10_delta_tau(&self) -> f64 {
        self.delta_tau.log10_abs()
    }

    /// Attaches `Ebar dtau / hbar` and `dE dtau / hbar`, computed in the log domain.
    pub fn with_clock_energies(self, mean_energy: f64, gap_energy: f64, hbar: f64) -> Self {
        let hb = LogMagnitude::from_f64(hbar);
        Self {
            phase_mean: Some(self.delta_tau * LogMagnitude::from_f64(mean_energy) / hb),
            phase_gap: Some(self.delta_tau * LogMagnitude::from_f64(gap_energy) / hb),
            ..self
        }
    }
}

/// `16 G J K / (c^4 w)` evaluated in the log domain.
pub fn closed_form_delta_tau(model: &RotatingMassModel, geom: &InterferometerGeometry) -> LogMagnitude {
    closed_form_delta_tau_log(LogMagnitude::from_f64(model.angular_momentum), &model.constants, geom)
}

/// As [`closed_form_delta_tau`] for an angular momentum given in log domain.
pub fn closed_form_delta_tau_log(
    angular_momentum: LogMagnitude,
    constants: &PhysicalConstants,
    geom: &InterferometerGeometry,
) -> LogMagnitude {
    if angular_momentum.is_zero() {
        return LogMagnitude::ZERO;
    }
    let k_log10 = (geom.v0 * geom.v0 / (2.0 * constants.c * constants.c)).ln_1p() / std::f64::consts::LN_10;
    let log10 = 16f64.log10() + constants.g.log10() + angular_momentum.log10_abs() + k_log10
        - 4.0 * constants.c.log10()
        - geom.width.log10();
    LogMagnitude::from_parts(f64::from(angular_momentum.sign()), log10)
}

/// `tau(right) - tau(left)` from first-order quadrature of both arms at fixed sampling.
pub fn arm_difference(model: &RotatingMassModel, geom: &InterferometerGeometry, intervals: usize) -> Result<f64> {
    let right = build_straight_arm_with(model, geom, ArmSide::Right, intervals)?;
    let left = build_straight_arm_with(model, geom, ArmSide::Left, intervals)?;
    Ok(delta_tau_first_order(model, &right)? - delta_tau_first_order(model, &left)?)
}

/// Relative tolerance of the refined arm quadrature.
pub const QUADRATURE_TOLERANCE: f64 = 1e-10;

pub fn delta_tau_interferometer(
    model: &RotatingMassModel,
    geom: &InterferometerGeometry,
    mode: DeltaTauMode,
) -> Result<PhaseBundle> {
    let dt = match mode {
        DeltaTauMode::ClosedForm => closed_form_delta_tau(model, geom),
        DeltaTauMode::Quadrature => {
            if model.angular_momentum == 0.0 {
                LogMagnitude::ZERO
            } else {
                let r = refine(
                    |n| delta_tau_pair(model, &build_straight_arm_with(model, geom, ArmSide::Right, n)?),
                    64,
                    QUADRATURE_TOLERANCE,
                )?;
                LogMagnitude::from_f64(r.value)
            }
        }
    };
    Ok(PhaseBundle::from_delta_tau(dt))
}
