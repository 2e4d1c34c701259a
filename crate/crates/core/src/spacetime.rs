//! Weak-field stationary metric of a rotating, axially symmetric mass in
//! Boyer-Lindquist coordinates, to first order in `J` and in `2GM/(c^2 r)`.
//!
//! The time coordinate used for metric entries is `x^0 = c t`, so all diagonal
//! entries are dimensionless except the angular ones (`m^2`), and the
//! frame-dragging entry carries units of metres.

use crate::error::{domain, Error, Result};

/// Physical constants in SI units. Overridable so that oracle runs can use
/// exaggerated values (e.g. `c = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Speed of light, m/s.
    pub c: f64,
    /// Gravitational constant, m^3 kg^-1 s^-2.
    pub g: f64,
    /// Reduced Planck constant, J s.
    pub hbar: f64,
}

impl PhysicalConstants {
    pub const CODATA: PhysicalConstants =
        PhysicalConstants { c: 299_792_458.0, g: 6.674_30e-11, hbar: 1.054_571_817e-34 };

    pub fn new(c: f64, g: f64, hbar: f64) -> Result<Self> {
        let k = PhysicalConstants { c, g, hbar };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c", self.c), ("G", self.g), ("hbar", self.hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return domain(format!("constant {name} must be finite and > 0, got {v}"));
            }
        }
        Ok(())
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

/// Default bound on `2GM/(c^2 r)` accepted by [`metric_at`].
pub const DEFAULT_WEAK_FIELD_LIMIT: f64 = 0.5;

/// Source mass `M` (kg) with signed angular momentum `J` (kg m^2/s) about the polar axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatingMassModel {
    pub mass: f64,
    pub angular_momentum: f64,
    pub constants: PhysicalConstants,
    pub weak_field_limit: f64,
}

impl RotatingMassModel {
    pub fn new(mass: f64, angular_momentum: f64) -> Result<Self> {
        Self::with_constants(mass, angular_momentum, PhysicalConstants::CODATA)
    }

    pub fn with_constants(mass: f64, angular_momentum: f64, constants: PhysicalConstants) -> Result<Self> {
        constants.validate()?;
        if !(mass.is_finite() && mass >= 0.0) {
            return domain(format!("mass must be finite and >= 0, got {mass}"));
        }
        if !angular_momentum.is_finite() {
            return domain("angular momentum must be finite");
        }
        Ok(Self { mass, angular_momentum, constants, weak_field_limit: DEFAULT_WEAK_FIELD_LIMIT })
    }

    pub fn weak_field_limit(mut self, limit: f64) -> Self {
        self.weak_field_limit = limit;
        self
    }

    /// Same source with angular momentum replaced.
    pub fn with_angular_momentum(mut self, j: f64) -> Self {
        self.angular_momentum = j;
        self
    }

    /// Same source with the rotation switched off (the Schwarzschild background).
    pub fn background(self) -> Self {
        self.with_angular_momentum(0.0)
    }

    /// Newtonian potential `Phi = -GM/r`, read off `g_tt = -(1 - 2GM/(c^2 r))`.
    pub fn potential(&self, r: f64) -> f64 {
        -self.constants.g * self.mass / r
    }

    /// Gravitational radius term `2GM/(c^2 r)`.
    pub fn compactness(&self, r: f64) -> f64 {
        2.0 * self.constants.g * self.mass / (self.constants.c * self.constants.c * r)
    }

    pub(crate) fn check_radius(&self, r: f64) -> Result<()> {
        if !(r.is_finite() && r > 0.0) {
            return domain(format!("radius must be finite and > 0, got {r}"));
        }
        let ratio = self.compactness(r);
        if ratio >= self.weak_field_limit {
            return Err(Error::WeakFieldViolation { ratio, limit: self.weak_field_limit, radius: r });
        }
        Ok(())
    }
}

/// Event in Boyer-Lindquist coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimePoint {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SpacetimePoint {
    pub fn new(t: f64, r: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return domain(format!("r must be > 0, got {r}"));
        }
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return domain(format!("theta must lie in [0, pi], got {theta}"));
        }
        Ok(Self { t, r, theta, phi })
    }

    /// Point in the equatorial plane.
    pub fn equatorial(t: f64, r: f64, phi: f64) -> Result<Self> {
        Self::new(t, r, std::f64::consts::FRAC_PI_2, phi)
    }

    pub fn from_cartesian(t: f64, x: [f64; 3]) -> Result<Self> {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if r == 0.0 {
            return domain("the origin has no Boyer-Lindquist representation");
        }
        let theta = (x[2] / r).clamp(-1.0, 1.0).acos();
        let phi = x[1].atan2(x[0]);
        Self::new(t, r, theta, phi)
    }

    pub fn to_cartesian(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [self.r * st * cp, self.r * st * sp, self.r * ct]
    }
}

/// Coordinate-time derivatives `(dr/dt, dtheta/dt, dphi/dt)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoordinateVelocity {
    pub r_dot: f64,
    pub theta_dot: f64,
    pub phi_dot: f64,
}

impl CoordinateVelocity {
    pub const ZERO: CoordinateVelocity = CoordinateVelocity { r_dot: 0.0, theta_dot: 0.0, phi_dot: 0.0 };

    pub fn new(r_dot: f64, theta_dot: f64, phi_dot: f64) -> Self {
        Self { r_dot, theta_dot, phi_dot }
    }

    /// Converts a Cartesian velocity at Cartesian position `x` (not on the polar axis).
    pub fn from_cartesian(x: [f64; 3], v: [f64; 3]) -> Self {
        let rho2 = x[0] * x[0] + x[1] * x[1];
        let r2 = rho2 + x[2] * x[2];
        let r = r2.sqrt();
        let rho = rho2.sqrt();
        let r_dot = (x[0] * v[0] + x[1] * v[1] + x[2] * v[2]) / r;
        let rho_dot = (x[0] * v[0] + x[1] * v[1]) / rho;
        let theta_dot = (x[2] * rho_dot - rho * v[2]) / r2;
        let phi_dot = (x[0] * v[1] - x[1] * v[0]) / rho2;
        Self { r_dot, theta_dot, phi_dot }
    }
}

/// Metric entries at a point: Schwarzschild part plus the frame-dragging term.
///
/// `h_tphi` is the coefficient of `(c dt) dphi` in the line element,
/// `-(4GJ/(c^3 r)) sin^2(theta)`. The symmetric tensor entries are
/// `g_{t phi} = g_{phi t} = h_tphi / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricComponents {
    pub g_tt: f64,
    pub g_rr: f64,
    pub g_thth: f64,
    pub g_phph: f64,
    pub h_tphi: f64,
}

impl MetricComponents {
    /// Symmetric tensor entry `g_{t phi}`.
    pub fn g_tphi(&self) -> f64 {
        0.5 * self.h_tphi
    }

    /// Full 4x4 metric in the `(ct, r, theta, phi)` basis.
    pub fn matrix(&self) -> [[f64; 4]; 4] {
        let off = self.g_tphi();
        [
            [self.g_tt, 0.0, 0.0, off],
            [0.0, self.g_rr, 0.0, 0.0],
            [0.0, 0.0, self.g_thth, 0.0],
            [off, 0.0, 0.0, self.g_phph],
        ]
    }

    /// `gbar_{mu nu} u^mu u^nu` for the Schwarzschild part.
    pub fn background_contract(&self, u: [f64; 4]) -> f64 {
        self.g_tt * u[0] * u[0] + self.g_rr * u[1] * u[1] + self.g_thth * u[2] * u[2] + self.g_phph * u[3] * u[3]
    }

    /// `h_{mu nu} u^mu u^nu` for the frame-dragging part.
    pub fn perturbation_contract(&self, u: [f64; 4]) -> f64 {
        self.h_tphi * u[0] * u[3]
    }
}

/// Four-velocity per unit coordinate time, `(c, dr/dt, dtheta/dt, dphi/dt)`.
pub fn coordinate_four_velocity(c: f64, vel: &CoordinateVelocity) -> [f64; 4] {
    [c, vel.r_dot, vel.theta_dot, vel.phi_dot]
}

pub fn metric_at(model: &RotatingMassModel, pt: &SpacetimePoint) -> Result<MetricComponents> {
    model.check_radius(pt.r)?;
    let PhysicalConstants { c, g, .. } = model.constants;
    let compact = model.compactness(pt.r);
    let s2 = pt.theta.sin().powi(2);
    Ok(MetricComponents {
        g_tt: -1.0 + compact,
        g_rr: 1.0 + compact,
        g_thth: pt.r * pt.r,
        g_phph: pt.r * pt.r * s2,
        h_tphi: -4.0 * g * model.angular_momentum / (c * c * c * pt.r) * s2,
    })
}

/// Squared rate `(dtau/dt)^2` written as `1 + 2Phi/c^2 - v^2/c^2 - (2 g_{0i}/c) dx^i/dt`,
/// with `v^2 = sum_i g_ii (dq^i/dt)^2`.
pub fn proper_time_rate_squared(
    model: &RotatingMassModel,
    pt: &SpacetimePoint,
    vel: &CoordinateVelocity,
) -> Result<f64> {
    let m = metric_at(model, pt)?;
    let c = model.constants.c;
    let phi_n = model.potential(pt.r);
    let v2 = m.g_rr * vel.r_dot * vel.r_dot
        + m.g_thth * vel.theta_dot * vel.theta_dot
        + m.g_phph * vel.phi_dot * vel.phi_dot;
    Ok(1.0 + 2.0 * phi_n / (c * c) - v2 / (c * c) - 2.0 * m.g_tphi() * vel.phi_dot / c)
}

/// `dtau/dt` along a trajectory with the given coordinate velocity.
pub fn proper_time_rate(model: &RotatingMassModel, pt: &SpacetimePoint, vel: &CoordinateVelocity) -> Result<f64> {
    let radicand = proper_time_rate_squared(model, pt, vel)?;
    if !(radicand > 0.0) {
        return Err(Error::NotTimelike { radicand });
    }
    Ok(radicand.sqrt())
}

/// Approximate conserved energy per rest energy, `E/(m c^2) = 1 + v^2/(2c^2) - GM/(c^2 r)`.
pub fn energy_ratio(model: &RotatingMassModel, pt: &SpacetimePoint, speed: f64) -> Result<f64> {
    model.check_radius(pt.r)?;
    let c = model.constants.c;
    Ok(1.0 + speed * speed / (2.0 * c * c) + model.potential(pt.r) / (c * c))
}

/// `|h_{mu nu} dx^mu dx^nu / gbar_{mu nu} dx^mu dx^nu|` along the given direction.
pub fn perturbation_validity(model: &RotatingMassModel, pt: &SpacetimePoint, vel: &CoordinateVelocity) -> Result<f64> {
    let m = metric_at(model, pt)?;
    let u = coordinate_four_velocity(model.constants.c, vel);
    let den = m.background_contract(u);
    if den == 0.0 || !den.is_finite() {
        return domain("background line element vanishes along this direction");
    }
    Ok((m.perturbation_contract(u) / den).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn full_contraction_rate(model: &RotatingMassModel, pt: &SpacetimePoint, vel: &CoordinateVelocity) -> f64 {
        let g = metric_at(model, pt).unwrap().matrix();
        let u = coordinate_four_velocity(model.constants.c, vel);
        let mut s = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                s += g[a][b] * u[a] * u[b];
            }
        }
        (-s).sqrt() / model.constants.c
    }

    #[test]
    fn minkowski_limit() {
        let model = RotatingMassModel::new(0.0, 0.0).unwrap();
        let pt = SpacetimePoint::new(0.0, 2.5, 0.7, 1.1).unwrap();
        let m = metric_at(&model, &pt).unwrap();
        assert_eq!(m.g_tt, -1.0);
        assert_eq!(m.g_rr, 1.0);
        assert_eq!(m.g_thth, 6.25);
        assert!((m.g_phph - 6.25 * 0.7f64.sin().powi(2)).abs() < 1e-15);
        assert_eq!(m.h_tphi, 0.0);
    }

    #[test]
    fn frame_dragging_entry_unit_source() {
        let model = RotatingMassModel::new(0.0, 1.0).unwrap();
        let pt = SpacetimePoint::equatorial(0.0, 1.0, 0.0).unwrap();
        let h = metric_at(&model, &pt).unwrap().h_tphi;
        let expected = -4.0 * 6.674_30e-11 / 299_792_458f64.powi(3);
        assert!(((h - expected) / expected).abs() < 1e-14);
        assert!((h + 9.907e-36).abs() < 1e-38, "{h}");
    }

    #[test]
    fn reversing_spin_flips_only_the_off_diagonal_entry() {
        let a = RotatingMassModel::new(3.0, 2.0).unwrap();
        let b = a.with_angular_momentum(-2.0);
        let pt = SpacetimePoint::new(0.0, 0.3, 1.0, 0.2).unwrap();
        let ma = metric_at(&a, &pt).unwrap();
        let mb = metric_at(&b, &pt).unwrap();
        assert_eq!(ma.h_tphi, -mb.h_tphi);
        assert_eq!((ma.g_tt, ma.g_rr, ma.g_thth, ma.g_phph), (mb.g_tt, mb.g_rr, mb.g_thth, mb.g_phph));
    }

    #[test]
    fn guard_and_domain_errors() {
        let k = PhysicalConstants::new(1.0, 1.0, 1.0).unwrap();
        let model = RotatingMassModel::with_constants(1.0, 0.0, k).unwrap();
        let near = SpacetimePoint::equatorial(0.0, 3.0, 0.0).unwrap();
        assert!(matches!(metric_at(&model, &near), Err(Error::WeakFieldViolation { .. })));
        assert!(metric_at(&model.weak_field_limit(0.9), &near).is_ok());
        assert!(SpacetimePoint::new(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(SpacetimePoint::new(0.0, 1.0, 4.0, 0.0).is_err());
    }

    #[test]
    fn rate_at_rest_and_moving_in_flat_space() {
        let model = RotatingMassModel::new(0.0, 0.0).unwrap();
        let pt = SpacetimePoint::equatorial(0.0, 1.0, 0.0).unwrap();
        assert_eq!(proper_time_rate(&model, &pt, &CoordinateVelocity::ZERO).unwrap(), 1.0);
        let v = CoordinateVelocity::new(0.6 * model.constants.c, 0.0, 0.0);
        assert!((proper_time_rate(&model, &pt, &v).unwrap() - 0.8).abs() < 1e-15);
        let fast = CoordinateVelocity::new(1.2 * model.constants.c, 0.0, 0.0);
        assert!(matches!(proper_time_rate(&model, &pt, &fast), Err(Error::NotTimelike { .. })));
    }

    #[test]
    fn rate_matches_full_metric_contraction() {
        let k = PhysicalConstants::new(1.0, 1.0, 1.0).unwrap();
        let model = RotatingMassModel::with_constants(1e-3, 4e-4, k).unwrap();
        let cases = [
            (0.9, FRAC_PI_2, 0.3, CoordinateVelocity::new(0.01, 0.0, 0.05)),
            (1.7, 0.8, -1.0, CoordinateVelocity::new(-0.02, 0.03, -0.04)),
            (3.0, 2.1, 2.5, CoordinateVelocity::new(0.1, -0.01, 0.02)),
        ];
        for (r, th, ph, v) in cases {
            let pt = SpacetimePoint::new(0.0, r, th, ph).unwrap();
            let a = proper_time_rate(&model, &pt, &v).unwrap();
            let b = full_contraction_rate(&model, &pt, &v);
            assert!(((a - b) / b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn energy_ratio_far_field() {
        let model = RotatingMassModel::new(0.0, 0.0).unwrap();
        let pt = SpacetimePoint::equatorial(0.0, 1.0, 0.0).unwrap();
        assert_eq!(energy_ratio(&model, &pt, 0.0).unwrap(), 1.0);
        let v0 = 1e5;
        let k = 1.0 + v0 * v0 / (2.0 * model.constants.c.powi(2));
        assert_eq!(energy_ratio(&model, &pt, v0).unwrap(), k);
    }

    #[test]
    fn perturbation_ratio_linear_in_j() {
        let pt = SpacetimePoint::equatorial(0.0, 1e-3, 0.0).unwrap();
        let vel = CoordinateVelocity::new(0.0, 0.0, 1e2 / 1e-3);
        let zero = RotatingMassModel::new(1.0, 0.0).unwrap();
        assert_eq!(perturbation_validity(&zero, &pt, &vel).unwrap(), 0.0);
        let base = perturbation_validity(&zero.with_angular_momentum(1.0), &pt, &vel).unwrap();
        for j in [2.0, 4.0] {
            let r = perturbation_validity(&zero.with_angular_momentum(j), &pt, &vel).unwrap();
            assert!((r / base - j).abs() < 1e-12);
        }
        // laboratory scale: M = 1 kg, J = 1, r = 1 mm, v = 100 m/s
        assert!(base < 1e-20, "{base:e}");
        assert!(base > 0.0);
    }

    #[test]
    fn cartesian_round_trip() {
        let pt = SpacetimePoint::new(2.0, 1.5, 0.9, -2.2).unwrap();
        let back = SpacetimePoint::from_cartesian(2.0, pt.to_cartesian()).unwrap();
        assert!((back.r - pt.r).abs() < 1e-14);
        assert!((back.theta - pt.theta).abs() < 1e-14);
        assert!((back.phi - pt.phi).abs() < 1e-14);
    }
}
