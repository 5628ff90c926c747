//! Population-level SDEs: the closed equations for heterodyne and optimal
//! homodyne detection, and the coupled population/phase system for a general
//! local-oscillator phase.

use crate::sde::{
    strong_taylor_10_vector_step, ScalarSde, SdeCoefficients, TaylorWorkspace, VectorSde,
};

use super::ModelError;

/// Radicand `C³(1−C)` clamped at zero; the flag reports whether clamping happened.
#[inline]
pub(crate) fn radicand(c: f64) -> (f64, bool) {
    let r = c * c * c * (1.0 - c);
    if r < 0.0 {
        (0.0, true)
    } else {
        (r, false)
    }
}

/// `dC = −C dt − k √(C³(1−C)) dW`, with `k = √2` (heterodyne) or `k = 2`
/// (optimal homodyne).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationCoefficients {
    noise_gain: f64,
}

/// One evaluation of drift and diffusion, with a flag when `C ∉ [0, 1]` forced
/// the radicand to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientEval {
    pub drift: f64,
    pub diffusion: f64,
    pub radicand_clamped: bool,
}

impl PopulationCoefficients {
    pub fn noise_gain(&self) -> f64 {
        self.noise_gain
    }

    pub fn evaluate(&self, c: f64) -> CoefficientEval {
        let (r, clamped) = radicand(c);
        CoefficientEval {
            drift: -c,
            diffusion: -self.noise_gain * r.sqrt(),
            radicand_clamped: clamped,
        }
    }

    /// Boxed-closure form of the same coefficients.
    pub fn to_coefficients(self) -> SdeCoefficients {
        let k = self.noise_gain;
        SdeCoefficients::new(|c| -c, move |c| -k * radicand(c).0.sqrt())
            .with_derivative(move |c| self.diffusion_derivative(c).unwrap_or(f64::NAN))
    }
}

impl ScalarSde for PopulationCoefficients {
    #[inline]
    fn drift(&self, c: f64) -> f64 {
        -c
    }

    #[inline]
    fn diffusion(&self, c: f64) -> f64 {
        -self.noise_gain * radicand(c).0.sqrt()
    }

    fn diffusion_derivative(&self, c: f64) -> Option<f64> {
        let (r, _) = radicand(c);
        if r == 0.0 {
            // One-sided limits: 0 at C = 0, −∞ at C = 1.
            return Some(if c <= 0.0 { 0.0 } else { f64::NEG_INFINITY });
        }
        Some(-self.noise_gain * (3.0 * c * c - 4.0 * c * c * c) / (2.0 * r.sqrt()))
    }

    /// `B B′ = k² (3C² − 4C³)/2`, finite on all of `[0, 1]`.
    #[inline]
    fn diffusion_times_derivative(&self, c: f64) -> Option<f64> {
        let c = c.clamp(0.0, 1.0);
        Some(self.noise_gain * self.noise_gain * (3.0 * c * c - 4.0 * c * c * c) * 0.5)
    }
}

impl From<PopulationCoefficients> for SdeCoefficients {
    fn from(p: PopulationCoefficients) -> Self {
        p.to_coefficients()
    }
}

/// Closed population SDE under heterodyne detection.
pub fn heterodyne_population_coeffs() -> PopulationCoefficients {
    PopulationCoefficients {
        noise_gain: std::f64::consts::SQRT_2,
    }
}

/// Closed population SDE under homodyne detection with zero relative phase.
pub fn optimal_homodyne_population_coeffs() -> PopulationCoefficients {
    PopulationCoefficients { noise_gain: 2.0 }
}

/// Population and relative phase `φ̃ = φ_e − φ_g − φ_LO` under homodyne detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationPhaseState {
    pub c: f64,
    pub phi_tilde: f64,
}

/// Smallest admissible `1 − C` for the coupled system (its phase equation has a `1/(1−C)` factor).
pub const DEFAULT_SINGULAR_FLOOR: f64 = 1e-12;

/// The coupled homodyne system as a 2-d SDE with one Wiener component:
///
/// ```text
/// dC = −C dt − 2 cos φ̃ √(C³(1−C)) dW
/// dφ̃ = (2C² − C)/(2(1−C)) sin 2φ̃ dt − sin φ̃ √(C/(1−C)) dW
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledHomodyne {
    pub singular_floor: f64,
}

impl Default for CoupledHomodyne {
    fn default() -> Self {
        Self {
            singular_floor: DEFAULT_SINGULAR_FLOOR,
        }
    }
}

impl CoupledHomodyne {
    #[inline]
    fn clamp_c(&self, c: f64) -> f64 {
        c.clamp(0.0, 1.0 - self.singular_floor)
    }
}

impl VectorSde for CoupledHomodyne {
    fn dim(&self) -> usize {
        2
    }

    fn noise_dim(&self) -> usize {
        1
    }

    fn drift(&self, x: &[f64], out: &mut [f64]) {
        let c = self.clamp_c(x[0]);
        out[0] = -x[0];
        out[1] = (2.0 * c * c - c) / (2.0 * (1.0 - c)) * (2.0 * x[1]).sin();
    }

    fn diffusion(&self, _j: usize, x: &[f64], out: &mut [f64]) {
        let c = self.clamp_c(x[0]);
        let (sin, cos) = x[1].sin_cos();
        out[0] = -2.0 * cos * radicand(c).0.sqrt();
        out[1] = -sin * (c / (1.0 - c)).sqrt();
    }
}

/// One strong order 1.0 step of the coupled homodyne system.
///
/// `φ̃ = 0` is an exact fixed point: drift and diffusion of the phase both
/// vanish there, also at the supporting value.
pub fn homodyne_coupled_step(
    state: PopulationPhaseState,
    dw: f64,
    dt: f64,
) -> Result<PopulationPhaseState, ModelError> {
    homodyne_coupled_step_with(&CoupledHomodyne::default(), state, dw, dt, &mut TaylorWorkspace::new(2, 1))
}

pub fn homodyne_coupled_step_with(
    system: &CoupledHomodyne,
    state: PopulationPhaseState,
    dw: f64,
    dt: f64,
    ws: &mut TaylorWorkspace,
) -> Result<PopulationPhaseState, ModelError> {
    if 1.0 - state.c < system.singular_floor {
        return Err(ModelError::SingularPhase {
            c: state.c,
            floor: system.singular_floor,
        });
    }
    if !(0.0..1.0).contains(&state.c) {
        return Err(ModelError::PopulationOutOfRange(state.c));
    }
    let mut x = [state.c, state.phi_tilde];
    strong_taylor_10_vector_step(system, &mut x, &[dw], dt, ws)?;
    if !x[0].is_finite() || !x[1].is_finite() {
        return Err(ModelError::NonFinite {
            what: "population/phase",
        });
    }
    Ok(PopulationPhaseState {
        c: x[0].clamp(0.0, 1.0),
        phi_tilde: x[1],
    })
}
