//! Amplitude-level stochastic Schrödinger equations for homodyne and
//! heterodyne detection, stepped on `[Re c_e, Im c_e, Re c_g, Im c_g]`.

use num_complex::Complex64;

use crate::sde::{strong_taylor_10_vector_step, TaylorWorkspace, VectorSde};

use super::ModelError;

/// `|ψ⟩ = c_e|e⟩ + c_g|g⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState {
    pub c_e: Complex64,
    pub c_g: Complex64,
}

impl PureState {
    pub fn ground() -> Self {
        Self {
            c_e: Complex64::new(0.0, 0.0),
            c_g: Complex64::new(1.0, 0.0),
        }
    }

    /// State with population `c` and dipole phase `φ_e − φ_g = phase`.
    pub fn from_population(c: f64, phase: f64) -> Self {
        Self {
            c_e: Complex64::from_polar(c.sqrt(), phase),
            c_g: Complex64::new((1.0 - c).max(0.0).sqrt(), 0.0),
        }
    }

    pub fn population(&self) -> f64 {
        self.c_e.norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c_e.norm_sqr() + self.c_g.norm_sqr()
    }

    /// `⟨σ₋⟩ = c_g* c_e`.
    pub fn sigma_minus(&self) -> Complex64 {
        self.c_g.conj() * self.c_e
    }

    /// Relative phase `arg(c_g* c_e)`.
    pub fn dipole_phase(&self) -> f64 {
        self.sigma_minus().arg()
    }

    fn to_array(self) -> [f64; 4] {
        [self.c_e.re, self.c_e.im, self.c_g.re, self.c_g.im]
    }

    fn from_slice(x: &[f64]) -> Self {
        Self {
            c_e: Complex64::new(x[0], x[1]),
            c_g: Complex64::new(x[2], x[3]),
        }
    }

    fn renormalized(self) -> Result<Self, ModelError> {
        let n = self.norm_sqr();
        if !n.is_finite() || n <= 0.0 {
            return Err(ModelError::NonFinite { what: "amplitudes" });
        }
        let s = 1.0 / n.sqrt();
        Ok(Self {
            c_e: self.c_e * s,
            c_g: self.c_g * s,
        })
    }
}

#[inline]
fn read(x: &[f64]) -> (Complex64, Complex64) {
    (Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3]))
}

#[inline]
fn write(out: &mut [f64], e: Complex64, g: Complex64) {
    out[0] = e.re;
    out[1] = e.im;
    out[2] = g.re;
    out[3] = g.im;
}

/// Homodyne SSE with local-oscillator phase `phi`; one real Wiener component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneSse {
    lo: Complex64,
}

impl HomodyneSse {
    pub fn new(phi: f64) -> Self {
        Self {
            lo: Complex64::from_polar(1.0, -phi),
        }
    }

    /// `⟨σ₊e^{iφ} + σ₋e^{−iφ}⟩`.
    #[inline]
    fn quadrature(&self, e: Complex64, g: Complex64) -> f64 {
        2.0 * (g.conj() * e * self.lo).re
    }

    pub fn mean_current(&self, state: &PureState) -> f64 {
        self.quadrature(state.c_e, state.c_g)
    }
}

impl VectorSde for HomodyneSse {
    fn dim(&self) -> usize {
        4
    }

    fn noise_dim(&self) -> usize {
        1
    }

    fn drift(&self, x: &[f64], out: &mut [f64]) {
        let (e, g) = read(x);
        let q = self.quadrature(e, g);
        let q2 = 0.25 * q * q;
        let de = 0.5 * (-e - q2 * e);
        let dg = 0.5 * (q * e * self.lo - q2 * g);
        write(out, de, dg);
    }

    fn diffusion(&self, _j: usize, x: &[f64], out: &mut [f64]) {
        let (e, g) = read(x);
        let q = self.quadrature(e, g);
        write(out, -0.5 * q * e, e * self.lo - 0.5 * q * g);
    }
}

/// Heterodyne SSE with `dZ = (dW_x + i dW_y)/√2`; two real Wiener components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HeterodyneSse;

impl VectorSde for HeterodyneSse {
    fn dim(&self) -> usize {
        4
    }

    fn noise_dim(&self) -> usize {
        2
    }

    fn drift(&self, x: &[f64], out: &mut [f64]) {
        let (e, g) = read(x);
        let m = g.conj() * e;
        let m2 = m.norm_sqr();
        write(out, -0.5 * e - 0.5 * m2 * e, m.conj() * e - 0.5 * m2 * g);
    }

    fn diffusion(&self, j: usize, x: &[f64], out: &mut [f64]) {
        let (e, g) = read(x);
        let m = g.conj() * e;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (be, bg) = ((-m * e) * s, (e - m * g) * s);
        if j == 0 {
            write(out, be, bg);
        } else {
            let i = Complex64::i();
            write(out, i * be, i * bg);
        }
    }
}

/// Steps either SSE with a reusable workspace and renormalizes after each step.
#[derive(Debug, Clone)]
pub struct AmplitudeStepper {
    ws: TaylorWorkspace,
    buf: [f64; 4],
}

impl Default for AmplitudeStepper {
    fn default() -> Self {
        Self {
            ws: TaylorWorkspace::new(4, 2),
            buf: [0.0; 4],
        }
    }
}

impl AmplitudeStepper {
    pub fn homodyne(
        &mut self,
        sse: &HomodyneSse,
        state: PureState,
        dw: f64,
        dt: f64,
    ) -> Result<(PureState, f64), ModelError> {
        let dq = sse.mean_current(&state) * dt + dw;
        self.buf = state.to_array();
        strong_taylor_10_vector_step(sse, &mut self.buf, &[dw], dt, &mut self.ws)?;
        Ok((PureState::from_slice(&self.buf).renormalized()?, dq))
    }

    pub fn heterodyne(
        &mut self,
        state: PureState,
        dw_x: f64,
        dw_y: f64,
        dt: f64,
    ) -> Result<(PureState, Complex64), ModelError> {
        let dz = Complex64::new(dw_x, dw_y) * std::f64::consts::FRAC_1_SQRT_2;
        let dq = state.sigma_minus() * dt + dz;
        self.buf = state.to_array();
        strong_taylor_10_vector_step(&HeterodyneSse, &mut self.buf, &[dw_x, dw_y], dt, &mut self.ws)?;
        Ok((PureState::from_slice(&self.buf).renormalized()?, dq))
    }
}

/// One renormalized homodyne step; returns the new state and the current increment `dq`.
pub fn homodyne_sse_step(
    state: PureState,
    phi: f64,
    dw: f64,
    dt: f64,
) -> Result<(PureState, f64), ModelError> {
    AmplitudeStepper::default().homodyne(&HomodyneSse::new(phi), state, dw, dt)
}

/// One renormalized heterodyne step; returns the new state and the complex current increment `dq`.
pub fn heterodyne_sse_step(
    state: PureState,
    dw_x: f64,
    dw_y: f64,
    dt: f64,
) -> Result<(PureState, Complex64), ModelError> {
    AmplitudeStepper::default().heterodyne(state, dw_x, dw_y, dt)
}
