use std::fmt;
use std::sync::Arc;

use super::SdeError;

/// Scalar Itô SDE `dC = A(C)dt + B(C)dW`.
pub trait ScalarSde {
    fn drift(&self, c: f64) -> f64;
    fn diffusion(&self, c: f64) -> f64;

    /// `dB/dC`, when known.
    fn diffusion_derivative(&self, _c: f64) -> Option<f64> {
        None
    }

    /// `B·dB/dC`. Override when the product stays finite where `B′` alone does not.
    fn diffusion_times_derivative(&self, c: f64) -> Option<f64> {
        self.diffusion_derivative(c).map(|d| d * self.diffusion(c))
    }
}

type Coefficient = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Drift and diffusion given as closures.
#[derive(Clone)]
pub struct SdeCoefficients {
    drift: Coefficient,
    diffusion: Coefficient,
    diffusion_derivative: Option<Coefficient>,
}

impl SdeCoefficients {
    pub fn new(
        drift: impl Fn(f64) -> f64 + Send + Sync + 'static,
        diffusion: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            drift: Arc::new(drift),
            diffusion: Arc::new(diffusion),
            diffusion_derivative: None,
        }
    }

    pub fn with_derivative(mut self, derivative: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.diffusion_derivative = Some(Arc::new(derivative));
        self
    }

    pub fn has_derivative(&self) -> bool {
        self.diffusion_derivative.is_some()
    }
}

impl fmt::Debug for SdeCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SdeCoefficients")
            .field("has_derivative", &self.has_derivative())
            .finish()
    }
}

impl ScalarSde for SdeCoefficients {
    fn drift(&self, c: f64) -> f64 {
        (self.drift)(c)
    }

    fn diffusion(&self, c: f64) -> f64 {
        (self.diffusion)(c)
    }

    fn diffusion_derivative(&self, c: f64) -> Option<f64> {
        self.diffusion_derivative.as_ref().map(|d| d(c))
    }
}

#[inline]
pub fn euler_maruyama_step<S: ScalarSde + ?Sized>(c: f64, sde: &S, dw: f64, dt: f64) -> f64 {
    c + sde.drift(c) * dt + sde.diffusion(c) * dw
}

/// `c + A dt + B dw + ½ B B′ (dw² − dt)`.
#[inline]
pub fn milstein_step<S: ScalarSde + ?Sized>(
    c: f64,
    sde: &S,
    dw: f64,
    dt: f64,
) -> Result<f64, SdeError> {
    let bb = sde
        .diffusion_times_derivative(c)
        .ok_or(SdeError::MissingDerivative)?;
    Ok(c + sde.drift(c) * dt + sde.diffusion(c) * dw + 0.5 * bb * (dw * dw - dt))
}

/// Derivative-free strong order 1.0 step; `B B′` is replaced by a finite
/// difference along the supporting value `c + A dt + B √dt`.
#[inline]
pub fn strong_taylor_scalar_step<S: ScalarSde + ?Sized>(c: f64, sde: &S, dw: f64, dt: f64) -> f64 {
    let a = sde.drift(c);
    let b = sde.diffusion(c);
    let sqrt_dt = dt.sqrt();
    let support = c + a * dt + b * sqrt_dt;
    let b_support = sde.diffusion(support);
    c + a * dt + b * dw + (b_support - b) * (dw * dw - dt) / (2.0 * sqrt_dt)
}
