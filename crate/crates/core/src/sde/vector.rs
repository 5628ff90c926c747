use std::fmt;
use std::sync::Arc;

use super::SdeError;

/// `dX = a(X)dt + Σⱼ bʲ(X) dWʲ` on ℝᵈ with `m` independent Wiener components.
pub trait VectorSde {
    fn dim(&self) -> usize;
    fn noise_dim(&self) -> usize;
    fn drift(&self, x: &[f64], out: &mut [f64]);
    /// Column `j` of the diffusion matrix.
    fn diffusion(&self, j: usize, x: &[f64], out: &mut [f64]);
}

type Field = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// A [`VectorSde`] assembled from closures: one drift map and one map per noise column.
#[derive(Clone)]
pub struct VectorCoefficients {
    dim: usize,
    drift: Field,
    columns: Vec<Field>,
}

impl VectorCoefficients {
    pub fn new(dim: usize, drift: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static) -> Self {
        Self {
            dim,
            drift: Arc::new(drift),
            columns: Vec::new(),
        }
    }

    pub fn with_column(mut self, column: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static) -> Self {
        self.columns.push(Arc::new(column));
        self
    }
}

impl fmt::Debug for VectorCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorCoefficients")
            .field("dim", &self.dim)
            .field("noise_dim", &self.columns.len())
            .finish()
    }
}

impl VectorSde for VectorCoefficients {
    fn dim(&self) -> usize {
        self.dim
    }

    fn noise_dim(&self) -> usize {
        self.columns.len()
    }

    fn drift(&self, x: &[f64], out: &mut [f64]) {
        (self.drift)(x, out)
    }

    fn diffusion(&self, j: usize, x: &[f64], out: &mut [f64]) {
        (self.columns[j])(x, out)
    }
}

/// Scratch buffers for [`strong_taylor_10_vector_step`], reused across steps.
#[derive(Debug, Clone, Default)]
pub struct TaylorWorkspace {
    drift: Vec<f64>,
    columns: Vec<f64>,
    support: Vec<f64>,
    column_at_support: Vec<f64>,
    next: Vec<f64>,
}

impl TaylorWorkspace {
    pub fn new(dim: usize, noise_dim: usize) -> Self {
        let mut ws = Self::default();
        ws.resize(dim, noise_dim);
        ws
    }

    fn resize(&mut self, dim: usize, noise_dim: usize) {
        self.drift.resize(dim, 0.0);
        self.columns.resize(dim * noise_dim, 0.0);
        self.support.resize(dim, 0.0);
        self.column_at_support.resize(dim, 0.0);
        self.next.resize(dim, 0.0);
    }
}

/// One step of the explicit derivative-free strong order 1.0 scheme, in
/// place on `state`.
///
/// With supporting values `Υʲ = X + a Δ + bʲ √Δ`:
///
/// ```text
/// X' = X + a Δ + Σⱼ bʲ ΔWʲ
///        + 1/(2√Δ) Σ_{j1,j2} [b^{j2}(Υ^{j1}) − b^{j2}(X)] (ΔW^{j1} ΔW^{j2} − δ_{j1 j2} Δ)
/// ```
///
/// Mixed double integrals are taken as `½ΔW^{j1}ΔW^{j2}` (no Lévy area), which
/// is exact for commutative noise.
#[allow(clippy::needless_range_loop)]
pub fn strong_taylor_10_vector_step<S: VectorSde + ?Sized>(
    sde: &S,
    state: &mut [f64],
    increments: &[f64],
    dt: f64,
    ws: &mut TaylorWorkspace,
) -> Result<(), SdeError> {
    let d = sde.dim();
    let m = sde.noise_dim();
    if state.len() != d {
        return Err(SdeError::DimensionMismatch {
            what: "state",
            got: state.len(),
            expected: d,
        });
    }
    if increments.len() != m {
        return Err(SdeError::DimensionMismatch {
            what: "increments",
            got: increments.len(),
            expected: m,
        });
    }
    ws.resize(d, m);
    let sqrt_dt = dt.sqrt();

    sde.drift(state, &mut ws.drift);
    for j in 0..m {
        sde.diffusion(j, state, &mut ws.columns[j * d..(j + 1) * d]);
    }
    for i in 0..d {
        let mut x = state[i] + ws.drift[i] * dt;
        for j in 0..m {
            x += ws.columns[j * d + i] * increments[j];
        }
        ws.next[i] = x;
    }
    let scale = 0.5 / sqrt_dt;
    for j1 in 0..m {
        for i in 0..d {
            ws.support[i] = state[i] + ws.drift[i] * dt + ws.columns[j1 * d + i] * sqrt_dt;
        }
        for j2 in 0..m {
            let weight = increments[j1] * increments[j2] - if j1 == j2 { dt } else { 0.0 };
            if weight == 0.0 {
                continue;
            }
            sde.diffusion(j2, &ws.support, &mut ws.column_at_support);
            for i in 0..d {
                ws.next[i] += scale * weight * (ws.column_at_support[i] - ws.columns[j2 * d + i]);
            }
        }
    }
    state.copy_from_slice(&ws.next);
    Ok(())
}
