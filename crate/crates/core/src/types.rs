//! Data shared between the trajectory simulators, the ensemble harness and the CLI.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

/// How the emitted field is detected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetectionScheme {
    PhotonCounting,
    /// Homodyne detection with local-oscillator phase `phase` (radians).
    Homodyne { phase: f64 },
    /// Homodyne detection with the dipole initially in phase with the local oscillator.
    /// The relative phase then stays at zero and the population obeys a closed SDE.
    OptimalHomodyne,
    Heterodyne,
}

impl DetectionScheme {
    pub fn name(&self) -> &'static str {
        match self {
            DetectionScheme::PhotonCounting => "photon-counting",
            DetectionScheme::Homodyne { .. } => "homodyne",
            DetectionScheme::OptimalHomodyne => "optimal-homodyne",
            DetectionScheme::Heterodyne => "heterodyne",
        }
    }

    /// Whether the measurement current is complex-valued.
    pub fn complex_record(&self) -> bool {
        matches!(self, DetectionScheme::Heterodyne)
    }
}

impl fmt::Display for DetectionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectionScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "photon-counting" | "counting" => Ok(DetectionScheme::PhotonCounting),
            "homodyne" => Ok(DetectionScheme::Homodyne { phase: 0.0 }),
            "optimal-homodyne" => Ok(DetectionScheme::OptimalHomodyne),
            "heterodyne" => Ok(DetectionScheme::Heterodyne),
            other => Err(format!(
                "unknown scheme '{other}' (expected photon-counting, homodyne, optimal-homodyne, heterodyne)"
            )),
        }
    }
}

/// Measurement record accompanying a population path.
///
/// `dq[i]` is the current increment over step `i` (real part only for
/// homodyne). It is `None` for scalar heterodyne runs, where the rotated
/// Wiener increment cannot be mapped back onto the two quadratures.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MeasurementRecord {
    pub dq: Option<Vec<Complex64>>,
    /// Jump times (photon counting); strictly increasing.
    pub jumps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathMetadata {
    pub scheme: Option<DetectionScheme>,
    pub master_seed: u64,
    pub stream_index: u64,
    pub dt: f64,
    pub n_steps: usize,
    pub effective_horizon: f64,
    /// Raw proposals that left the clamp interval before projection.
    pub overshoots: usize,
}

/// Time series of the excited-state population `C_t` on a uniform grid (units of 1/γ).
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationPath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub record: MeasurementRecord,
    pub metadata: PathMetadata,
}

impl PopulationPath {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}
