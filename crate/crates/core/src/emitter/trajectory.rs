//! Single-trajectory driver for every detection scheme.

use num_complex::Complex64;

use crate::sde::{
    euler_maruyama_step, milstein_step, strong_taylor_scalar_step, Flow, NoiseStream, ScalarSde,
    StepConfig, StepScheme, TaylorWorkspace,
};
use crate::types::{DetectionScheme, MeasurementRecord, PathMetadata, PopulationPath};

use super::amplitude::{AmplitudeStepper, HomodyneSse, PureState};
use super::counting::{counting_step_unchecked, MAX_COUNTING_DT};
use super::population::{
    heterodyne_population_coeffs, homodyne_coupled_step_with, optimal_homodyne_population_coeffs,
    CoupledHomodyne, PopulationCoefficients, PopulationPhaseState, DEFAULT_SINGULAR_FLOOR,
};
use super::ModelError;

/// Which state is stepped for the diffusive schemes. Photon counting always
/// steps the population.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Representation {
    /// Closed scalar SDE (heterodyne, optimal homodyne) or the coupled
    /// population/phase system (general homodyne).
    #[default]
    Population,
    /// Two-amplitude SSE, renormalized after each step.
    Amplitude,
}

impl Representation {
    pub fn name(&self) -> &'static str {
        match self {
            Representation::Population => "population",
            Representation::Amplitude => "amplitude",
        }
    }
}

/// Everything that determines a trajectory apart from its noise stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySpec {
    pub scheme: DetectionScheme,
    pub c0: f64,
    /// Initial dipole phase relative to the local oscillator, in `[0, π/2]`.
    /// Only read for [`DetectionScheme::Homodyne`].
    pub phi_tilde0: f64,
    pub config: StepConfig,
    pub representation: Representation,
    /// Smallest `1 − C` kept by the coupled homodyne system.
    pub singular_floor: f64,
}

impl TrajectorySpec {
    pub fn new(scheme: DetectionScheme, c0: f64, config: StepConfig) -> Self {
        Self {
            scheme,
            c0,
            phi_tilde0: 0.0,
            config,
            representation: Representation::Population,
            singular_floor: DEFAULT_SINGULAR_FLOOR,
        }
    }

    pub fn with_phase(mut self, phi_tilde0: f64) -> Self {
        self.phi_tilde0 = phi_tilde0;
        self
    }

    pub fn with_representation(mut self, representation: Representation) -> Self {
        self.representation = representation;
        self
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(0.0..=1.0).contains(&self.c0) {
            return Err(ModelError::PopulationOutOfRange(self.c0));
        }
        if let DetectionScheme::Homodyne { phase } = self.scheme {
            if !phase.is_finite() {
                return Err(ModelError::Domain { what: "local-oscillator phase", value: phase });
            }
            if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&self.phi_tilde0) {
                return Err(ModelError::Domain { what: "initial relative phase", value: self.phi_tilde0 });
            }
            if self.representation == Representation::Population && 1.0 - self.c0 < self.singular_floor {
                return Err(ModelError::SingularPhase { c: self.c0, floor: self.singular_floor });
            }
        }
        if self.scheme == DetectionScheme::PhotonCounting && self.config.dt > MAX_COUNTING_DT {
            return Err(ModelError::CountingStepTooLarge { dt: self.config.dt, max: MAX_COUNTING_DT });
        }
        Ok(())
    }
}

/// One grid point reported to the observer. `dq` and `jumped` refer to the
/// step that ended at `t`; both are empty at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSample {
    pub step: usize,
    pub t: f64,
    pub c: f64,
    pub dq: Option<Complex64>,
    pub jumped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRun {
    pub steps: usize,
    pub overshoots: usize,
    pub final_c: f64,
    pub jumps: usize,
}

struct Advance {
    c: f64,
    dq: Option<Complex64>,
    jumped: bool,
}

fn run_loop<F, A>(
    c0: f64,
    config: &StepConfig,
    hi: f64,
    mut observe: F,
    mut advance: A,
) -> Result<TrajectoryRun, ModelError>
where
    F: FnMut(&StepSample) -> Flow,
    A: FnMut(f64) -> Result<Advance, ModelError>,
{
    let dt = config.dt;
    let n = config.n_steps();
    let mut run = TrajectoryRun { steps: 0, overshoots: 0, final_c: c0, jumps: 0 };
    let first = StepSample { step: 0, t: 0.0, c: c0, dq: None, jumped: false };
    if observe(&first) == Flow::Stop {
        return Ok(run);
    }
    let mut c = c0;
    for step in 1..=n {
        let a = advance(c)?;
        if !a.c.is_finite() {
            return Err(ModelError::NonFiniteAt { step, value: a.c });
        }
        c = if a.c < 0.0 {
            run.overshoots += 1;
            0.0
        } else if a.c > hi {
            run.overshoots += 1;
            hi
        } else {
            a.c
        };
        run.jumps += a.jumped as usize;
        run.steps = step;
        run.final_c = c;
        let sample = StepSample { step, t: step as f64 * dt, c, dq: a.dq, jumped: a.jumped };
        if observe(&sample) == Flow::Stop {
            break;
        }
    }
    Ok(run)
}

#[inline]
fn scalar_advance<S: ScalarSde>(sde: &S, scheme: StepScheme, c: f64, dw: f64, dt: f64) -> Result<f64, ModelError> {
    Ok(match scheme {
        StepScheme::EulerMaruyama => euler_maruyama_step(c, sde, dw, dt),
        StepScheme::Milstein => milstein_step(c, sde, dw, dt)?,
        StepScheme::StrongTaylor10 => strong_taylor_scalar_step(c, sde, dw, dt),
    })
}

fn closed_population(
    spec: &TrajectorySpec,
    coeffs: PopulationCoefficients,
    record_current: bool,
    stream: &mut NoiseStream,
    observe: impl FnMut(&StepSample) -> Flow,
) -> Result<TrajectoryRun, ModelError> {
    let dt = spec.config.dt;
    let scheme = spec.config.scheme;
    run_loop(spec.c0, &spec.config, 1.0, observe, |c| {
        let dw = stream.gaussian_increment(dt);
        let next = scalar_advance(&coeffs, scheme, c, dw, dt)?;
        let dq = record_current
            .then(|| Complex64::new(2.0 * (c * (1.0 - c)).max(0.0).sqrt() * dt + dw, 0.0));
        Ok(Advance { c: next, dq, jumped: false })
    })
}

/// Runs one trajectory, calling `observe` at every grid point including
/// `t = 0`. Noise is drawn from `stream` in a fixed order: one normal per
/// step for homodyne, `x` then `y` for the heterodyne amplitude SSE, one
/// normal for the scalar heterodyne SDE and one uniform for photon counting.
pub fn drive_trajectory<F>(
    spec: &TrajectorySpec,
    stream: &mut NoiseStream,
    observe: F,
) -> Result<TrajectoryRun, ModelError>
where
    F: FnMut(&StepSample) -> Flow,
{
    spec.validate()?;
    let dt = spec.config.dt;
    match (spec.scheme, spec.representation) {
        (DetectionScheme::PhotonCounting, _) => run_loop(spec.c0, &spec.config, 1.0, observe, |c| {
            let (next, jumped) = counting_step_unchecked(c, stream.uniform(), dt);
            Ok(Advance { c: next, dq: None, jumped })
        }),
        (DetectionScheme::Heterodyne, Representation::Population) => {
            closed_population(spec, heterodyne_population_coeffs(), false, stream, observe)
        }
        (DetectionScheme::OptimalHomodyne, Representation::Population) => {
            closed_population(spec, optimal_homodyne_population_coeffs(), true, stream, observe)
        }
        (DetectionScheme::Homodyne { .. }, Representation::Population) => {
            let system = CoupledHomodyne { singular_floor: spec.singular_floor };
            let mut ws = TaylorWorkspace::new(2, 1);
            let mut phi = spec.phi_tilde0;
            let hi = 1.0 - spec.singular_floor;
            run_loop(spec.c0, &spec.config, hi, observe, |c| {
                let dw = stream.gaussian_increment(dt);
                let mean = 2.0 * (c * (1.0 - c)).sqrt() * phi.cos();
                let next = homodyne_coupled_step_with(
                    &system,
                    PopulationPhaseState { c, phi_tilde: phi },
                    dw,
                    dt,
                    &mut ws,
                )?;
                phi = next.phi_tilde;
                Ok(Advance { c: next.c, dq: Some(Complex64::new(mean * dt + dw, 0.0)), jumped: false })
            })
        }
        (DetectionScheme::Homodyne { .. } | DetectionScheme::OptimalHomodyne, Representation::Amplitude) => {
            let (lo_phase, rel) = match spec.scheme {
                DetectionScheme::Homodyne { phase } => (phase, spec.phi_tilde0),
                _ => (0.0, 0.0),
            };
            let sse = HomodyneSse::new(lo_phase);
            let mut stepper = AmplitudeStepper::default();
            let mut state = PureState::from_population(spec.c0, rel + lo_phase);
            run_loop(spec.c0, &spec.config, 1.0, observe, |_| {
                let dw = stream.gaussian_increment(dt);
                let (next, dq) = stepper.homodyne(&sse, state, dw, dt)?;
                state = next;
                Ok(Advance { c: state.population(), dq: Some(Complex64::new(dq, 0.0)), jumped: false })
            })
        }
        (DetectionScheme::Heterodyne, Representation::Amplitude) => {
            let mut stepper = AmplitudeStepper::default();
            let mut state = PureState::from_population(spec.c0, spec.phi_tilde0);
            run_loop(spec.c0, &spec.config, 1.0, observe, |_| {
                let dw_x = stream.gaussian_increment(dt);
                let dw_y = stream.gaussian_increment(dt);
                let (next, dq) = stepper.heterodyne(state, dw_x, dw_y, dt)?;
                state = next;
                Ok(Advance { c: state.population(), dq: Some(dq), jumped: false })
            })
        }
    }
}

/// Full recorded trajectory: `n_steps + 1` samples, the current record and jump times.
pub fn simulate_trajectory(spec: &TrajectorySpec, stream: &mut NoiseStream) -> Result<PopulationPath, ModelError> {
    let n = spec.config.n_steps();
    let mut times = Vec::with_capacity(n + 1);
    let mut values = Vec::with_capacity(n + 1);
    let mut dq: Vec<Complex64> = Vec::new();
    let mut has_current = false;
    let mut jumps = Vec::new();
    let (seed, index) = (stream.master_seed(), stream.stream_index());
    let run = drive_trajectory(spec, stream, |s| {
        times.push(s.t);
        values.push(s.c);
        if let Some(q) = s.dq {
            has_current = true;
            dq.push(q);
        }
        if s.jumped {
            jumps.push(s.t);
        }
        Flow::Continue
    })?;
    Ok(PopulationPath {
        times,
        values,
        record: MeasurementRecord { dq: has_current.then_some(dq), jumps },
        metadata: PathMetadata {
            scheme: Some(spec.scheme),
            master_seed: seed,
            stream_index: index,
            dt: spec.config.dt,
            n_steps: n,
            effective_horizon: spec.config.effective_horizon(),
            overshoots: run.overshoots,
        },
    })
}
