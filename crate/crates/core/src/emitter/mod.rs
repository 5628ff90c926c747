//! Physical models of a decaying two-level emitter: the unconditioned
//! master-equation solution, photon counting, the homodyne and heterodyne
//! SSEs, and the population/phase SDEs derived from them.

mod amplitude;
mod counting;
mod population;
mod trajectory;

use thiserror::Error;

use crate::sde::SdeError;

pub use crate::types::{DetectionScheme, MeasurementRecord, PathMetadata, PopulationPath};
pub use amplitude::{
    heterodyne_sse_step, homodyne_sse_step, AmplitudeStepper, HeterodyneSse, HomodyneSse, PureState,
};
pub use counting::{no_jump_population, photon_counting_step, MAX_COUNTING_DT};
pub use population::{
    heterodyne_population_coeffs, homodyne_coupled_step, homodyne_coupled_step_with,
    optimal_homodyne_population_coeffs, CoefficientEval, CoupledHomodyne, PopulationCoefficients,
    PopulationPhaseState, DEFAULT_SINGULAR_FLOOR,
};
pub use trajectory::{
    drive_trajectory, simulate_trajectory, Representation, StepSample, TrajectoryRun, TrajectorySpec,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{what} = {value} is outside its domain")]
    Domain { what: &'static str, value: f64 },
    #[error("population {0} is outside [0, 1]")]
    PopulationOutOfRange(f64),
    #[error("relative phase is singular at C = {c}: 1 - C is below the floor {floor}")]
    SingularPhase { c: f64, floor: f64 },
    #[error("photon-counting step dt = {dt} exceeds {max}")]
    CountingStepTooLarge { dt: f64, max: f64 },
    #[error("non-finite {what}")]
    NonFinite { what: &'static str },
    #[error("non-finite population {value} at step {step}")]
    NonFiniteAt { step: usize, value: f64 },
    #[error(transparent)]
    Sde(#[from] SdeError),
}

/// `ρ_ee(t) = c0 e^{−t}`.
pub fn master_equation_excitation(c0: f64, t: f64) -> Result<f64, ModelError> {
    if !(0.0..=1.0).contains(&c0) {
        return Err(ModelError::PopulationOutOfRange(c0));
    }
    if !(t >= 0.0) {
        return Err(ModelError::Domain { what: "t", value: t });
    }
    Ok(c0 * (-t).exp())
}
