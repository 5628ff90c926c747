//! Trajectory simulation and first-passage analytics for a spontaneously
//! decaying two-level emitter under photon counting, homodyne and heterodyne
//! detection.
//!
//! Time is measured in units of the inverse decay rate (γ = 1).

// Negated comparisons reject NaN; quadrature nodes are kept as published.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod emitter;
pub mod first_passage;
pub mod montecarlo;
pub mod sde;
pub mod specfun;
pub mod types;

pub use emitter::{PureState, Representation, TrajectorySpec};
pub use first_passage::{Extended, Interval01, QuadratureSpec, Scheme1D};
pub use montecarlo::{EnsembleConfig, EnsembleStats};
pub use sde::{NoiseStream, StepConfig, StepScheme};
pub use types::{DetectionScheme, MeasurementRecord, PathMetadata, PopulationPath};
