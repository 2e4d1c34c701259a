//! Proper-time differences induced by the frame dragging of a slowly rotating
//! mass, and their imprint on clocks in a superposition of two paths.
//!
//! ```
//! use gravclock::{delta_tau_interferometer, DeltaTauMode, InterferometerGeometry, RotatingMassModel};
//!
//! let model = RotatingMassModel::new(0.0, 1.0).unwrap();
//! let geom = InterferometerGeometry::with_width(1e-3, 0.0).unwrap();
//! let dt = delta_tau_interferometer(&model, &geom, DeltaTauMode::ClosedForm).unwrap();
//! assert!((dt.delta_tau_seconds() / 1.3220e-40 - 1.0).abs() < 1e-4);
//! ```

// `!(x > 0.0)` is used on purpose so NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clockstate;
pub mod detectability;
pub mod error;
pub mod geodesic;
pub mod interferometry;
pub mod logdomain;
pub mod propertime;
pub mod qep;
pub mod quadrature;
pub mod spacetime;

pub use clockstate::{DensityMatrix, EntropyBase, StateVector, Subsystem};
pub use detectability::{DetectabilityQuery, Scenario, SweepConfig, SweepTable};
pub use error::{Error, Result};
pub use geodesic::{BoundaryConditions, ExtremalPathResult, FirstOrderReport};
pub use interferometry::{ClockModel, GapConvention, GmeResult, InterferenceResult, VisibilityMode};
pub use logdomain::LogMagnitude;
pub use propertime::{
    delta_tau_first_order, delta_tau_interferometer, delta_tau_pair, ArmSide, DeltaTauMode, InterferometerGeometry,
    PathSample, PathSpec, PhaseBundle,
};
pub use qep::{QepResult, QepTestTheory};
pub use spacetime::{CoordinateVelocity, MetricComponents, PhysicalConstants, RotatingMassModel, SpacetimePoint};
