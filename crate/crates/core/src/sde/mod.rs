//! Itô SDE stepping with reproducible noise.
//!
//! Scalar steppers (Euler–Maruyama, Milstein, derivative-free order 1.0) and
//! a small-vector derivative-free strong order 1.0 Itô–Taylor step for
//! systems driven by several Wiener components.

mod noise;
mod path;
mod scalar;
mod vector;

use thiserror::Error;

pub use noise::NoiseStream;
pub use path::{drive_scalar, simulate_scalar_path, ClampInterval, Flow, ScalarRun};
pub use scalar::{
    euler_maruyama_step, milstein_step, strong_taylor_scalar_step, ScalarSde, SdeCoefficients,
};
pub use vector::{strong_taylor_10_vector_step, TaylorWorkspace, VectorCoefficients, VectorSde};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SdeError {
    #[error("Milstein step needs dB/dC but the coefficients do not provide it")]
    MissingDerivative,
    #[error("dimension mismatch: {what} has length {got}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("invalid step configuration: dt={dt}, horizon={horizon}")]
    InvalidConfig { dt: f64, horizon: f64 },
    #[error("initial value {c0} lies outside the clamp interval [{lo}, {hi}]")]
    InitialOutsideClamp { c0: f64, lo: f64, hi: f64 },
    #[error("non-finite state {value} at step {step}")]
    NonFinite { step: usize, value: f64 },
}

/// Which scalar stepper advances the population.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepScheme {
    EulerMaruyama,
    #[default]
    Milstein,
    StrongTaylor10,
}

impl StepScheme {
    pub fn name(&self) -> &'static str {
        match self {
            StepScheme::EulerMaruyama => "euler-maruyama",
            StepScheme::Milstein => "milstein",
            StepScheme::StrongTaylor10 => "strong-taylor-1.0",
        }
    }
}

/// Uniform time grid. The step count is `ceil(horizon/dt)`; the grid may
/// therefore end slightly past the requested horizon, see
/// [`StepConfig::effective_horizon`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    pub dt: f64,
    pub horizon: f64,
    pub scheme: StepScheme,
}

impl StepConfig {
    pub fn new(dt: f64, horizon: f64, scheme: StepScheme) -> Result<Self, SdeError> {
        if !(dt > 0.0) || !(horizon >= dt) || !horizon.is_finite() {
            return Err(SdeError::InvalidConfig { dt, horizon });
        }
        Ok(Self {
            dt,
            horizon,
            scheme,
        })
    }

    pub fn n_steps(&self) -> usize {
        // Tolerate representation error in horizon/dt (5/1e-4 is 50000.000000000004).
        let ratio = self.horizon / self.dt;
        let rounded = ratio.round();
        if (ratio - rounded).abs() <= 1e-9 * rounded.max(1.0) {
            rounded as usize
        } else {
            ratio.ceil() as usize
        }
    }

    pub fn effective_horizon(&self) -> f64 {
        self.n_steps() as f64 * self.dt
    }
}
