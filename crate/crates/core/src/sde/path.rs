use super::{
    euler_maruyama_step, milstein_step, strong_taylor_scalar_step, NoiseStream, ScalarSde,
    SdeError, StepConfig, StepScheme,
};
use crate::types::{MeasurementRecord, PathMetadata, PopulationPath};

/// Observer verdict after each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

/// Closed interval onto which every step is projected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClampInterval {
    pub lo: f64,
    pub hi: f64,
}

impl ClampInterval {
    pub const UNIT: ClampInterval = ClampInterval { lo: 0.0, hi: 1.0 };

    pub fn contains(&self, c: f64) -> bool {
        c >= self.lo && c <= self.hi
    }
}

/// Bookkeeping from one scalar run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarRun {
    /// Steps actually taken (fewer than `n_steps` if the observer stopped early).
    pub steps: usize,
    pub overshoots: usize,
    pub final_value: f64,
}

/// Advances `c0` on the grid of `config`, projecting each step onto `clamp`
/// and calling `observe(step_index, t, c)` at every grid point including
/// `t = 0`. The observer may stop the run early.
pub fn drive_scalar<S, F>(
    sde: &S,
    c0: f64,
    config: &StepConfig,
    stream: &mut NoiseStream,
    clamp: ClampInterval,
    mut observe: F,
) -> Result<ScalarRun, SdeError>
where
    S: ScalarSde + ?Sized,
    F: FnMut(usize, f64, f64) -> Flow,
{
    if !clamp.contains(c0) {
        return Err(SdeError::InitialOutsideClamp {
            c0,
            lo: clamp.lo,
            hi: clamp.hi,
        });
    }
    let dt = config.dt;
    let n = config.n_steps();
    let mut c = c0;
    let mut overshoots = 0;
    if observe(0, 0.0, c) == Flow::Stop {
        return Ok(ScalarRun {
            steps: 0,
            overshoots,
            final_value: c,
        });
    }
    for step in 1..=n {
        let dw = stream.gaussian_increment(dt);
        let raw = match config.scheme {
            StepScheme::EulerMaruyama => euler_maruyama_step(c, sde, dw, dt),
            StepScheme::Milstein => milstein_step(c, sde, dw, dt)?,
            StepScheme::StrongTaylor10 => strong_taylor_scalar_step(c, sde, dw, dt),
        };
        if !raw.is_finite() {
            return Err(SdeError::NonFinite { step, value: raw });
        }
        c = if raw < clamp.lo {
            overshoots += 1;
            clamp.lo
        } else if raw > clamp.hi {
            overshoots += 1;
            clamp.hi
        } else {
            raw
        };
        if observe(step, step as f64 * dt, c) == Flow::Stop {
            return Ok(ScalarRun {
                steps: step,
                overshoots,
                final_value: c,
            });
        }
    }
    Ok(ScalarRun {
        steps: n,
        overshoots,
        final_value: c,
    })
}

/// Full recorded path of a scalar SDE; `n_steps + 1` samples.
pub fn simulate_scalar_path<S: ScalarSde + ?Sized>(
    sde: &S,
    c0: f64,
    config: &StepConfig,
    stream: &mut NoiseStream,
    clamp: ClampInterval,
) -> Result<PopulationPath, SdeError> {
    let n = config.n_steps();
    let mut times = Vec::with_capacity(n + 1);
    let mut values = Vec::with_capacity(n + 1);
    let seed = stream.master_seed();
    let index = stream.stream_index();
    let run = drive_scalar(sde, c0, config, stream, clamp, |_, t, c| {
        times.push(t);
        values.push(c);
        Flow::Continue
    })?;
    Ok(PopulationPath {
        times,
        values,
        record: MeasurementRecord::default(),
        metadata: PathMetadata {
            scheme: None,
            master_seed: seed,
            stream_index: index,
            dt: config.dt,
            n_steps: n,
            effective_horizon: config.effective_horizon(),
            overshoots: run.overshoots,
        },
    })
}
