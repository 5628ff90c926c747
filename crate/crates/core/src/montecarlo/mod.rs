//! Ensemble harness: runs batches of trajectories on independent noise
//! substreams and estimates hitting probabilities, passage and occupation
//! times and the mean population trace.
//!
//! Trajectory `k` always uses substream `k` of the master seed, and
//! per-trajectory summaries are reduced in index order, so results do not
//! depend on the number of worker threads.

mod stats;
mod validate;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::emitter::{drive_trajectory, ModelError, Representation, StepSample, TrajectorySpec};
use crate::sde::{Flow, NoiseStream, SdeError, StepConfig, StepScheme};
use crate::types::DetectionScheme;

pub use stats::{wilson_interval, MeanEstimate, Z95};
pub use validate::{validate_analytics, validate_with, Thresholds, ValidationReport, ValidationRow};

/// Population treated as "fully excited" when tracking the level `u = 1`.
pub const FULL_EXCITATION_THRESHOLD: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonteCarloError {
    #[error("invalid ensemble configuration: {0}")]
    Config(String),
    #[error("trajectory {index} failed: {source}")]
    Trajectory { index: u64, source: ModelError },
    #[error(transparent)]
    Step(#[from] SdeError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleConfig {
    #[serde(serialize_with = "serialize_scheme")]
    pub scheme: DetectionScheme,
    pub c0: f64,
    /// Initial dipole phase relative to the local oscillator (general homodyne only).
    pub phi_tilde0: f64,
    pub n_traj: usize,
    pub dt: f64,
    pub horizon: f64,
    pub master_seed: u64,
    /// Excitation levels `u ∈ [c0, 1]`; a trajectory hits `u` at the first grid point with `C ≥ u`.
    pub u_grid: Vec<f64>,
    /// Decay levels `a ∈ (0, c0]`; first passage is the first grid point with `C ≤ a`.
    pub a_grid: Vec<f64>,
    #[serde(serialize_with = "serialize_step_scheme")]
    pub step_scheme: StepScheme,
    #[serde(serialize_with = "serialize_representation")]
    pub representation: Representation,
    /// Stop a trajectory once `C ≤ absorb_below`. Disables the mean trace.
    pub absorb_below: Option<f64>,
    /// Track the first exit from `(a, b)`.
    pub exit_interval: Option<(f64, f64)>,
    /// Track total time spent in each closed interval `[ell, r]`.
    pub occupation_intervals: Vec<(f64, f64)>,
    /// Record the population every `trace_every` steps for the mean trace (0 disables it).
    pub trace_every: usize,
}

fn serialize_scheme<S: serde::Serializer>(s: &DetectionScheme, ser: S) -> Result<S::Ok, S::Error> {
    match s {
        DetectionScheme::Homodyne { phase } => ser.serialize_str(&format!("homodyne(phase={phase})")),
        other => ser.serialize_str(other.name()),
    }
}

fn serialize_step_scheme<S: serde::Serializer>(s: &StepScheme, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(s.name())
}

fn serialize_representation<S: serde::Serializer>(r: &Representation, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(r.name())
}

impl EnsembleConfig {
    /// Defaults of the reference protocol: 5000 trajectories, `dt = 10⁻⁴`,
    /// horizon 5, excitation levels every 0.05 above `c0`.
    pub fn new(scheme: DetectionScheme, c0: f64) -> Self {
        Self {
            scheme,
            c0,
            phi_tilde0: 0.0,
            n_traj: 5000,
            dt: 1e-4,
            horizon: 5.0,
            master_seed: 0,
            u_grid: u_grid_above(c0, 0.05),
            a_grid: Vec::new(),
            step_scheme: StepScheme::Milstein,
            representation: Representation::Population,
            absorb_below: None,
            exit_interval: None,
            occupation_intervals: Vec::new(),
            trace_every: 0,
        }
    }

    pub fn step_config(&self) -> Result<StepConfig, MonteCarloError> {
        Ok(StepConfig::new(self.dt, self.horizon, self.step_scheme)?)
    }

    pub fn trajectory_spec(&self) -> Result<TrajectorySpec, MonteCarloError> {
        Ok(TrajectorySpec::new(self.scheme, self.c0, self.step_config()?)
            .with_phase(self.phi_tilde0)
            .with_representation(self.representation))
    }

    pub fn validate(&self) -> Result<(), MonteCarloError> {
        let bad = |m: String| Err(MonteCarloError::Config(m));
        if self.n_traj == 0 {
            return bad("n_traj must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.c0) {
            return bad(format!("c0 = {} is outside [0, 1]", self.c0));
        }
        if let Some(u) = self.u_grid.iter().find(|&&u| !(u >= self.c0 && u <= 1.0)) {
            return bad(format!("excitation level {u} is outside [c0, 1]"));
        }
        if let Some(a) = self.a_grid.iter().find(|&&a| !(a > 0.0 && a <= self.c0)) {
            return bad(format!("decay level {a} is outside (0, c0]"));
        }
        if let Some((a, b)) = self.exit_interval {
            if !(a < b && a <= self.c0 && self.c0 <= b) {
                return bad(format!("exit interval ({a}, {b}) does not contain c0"));
            }
        }
        if let Some(&(l, r)) = self.occupation_intervals.iter().find(|(l, r)| !(0.0 <= *l && l <= r && *r <= 1.0)) {
            return bad(format!("occupation interval [{l}, {r}] is not inside [0, 1]"));
        }
        if self.absorb_below.is_some() && self.trace_every > 0 {
            return bad("absorb_below stops trajectories early and cannot be combined with a mean trace".into());
        }
        if let Some(f) = self.absorb_below {
            if let Some(a) = self.a_grid.iter().find(|&&a| a < f) {
                return bad(format!("decay level {a} lies below the absorption floor {f}"));
            }
        }
        self.trajectory_spec()?.validate().map_err(|e| MonteCarloError::Config(e.to_string()))
    }
}

/// `c0, c0 + step, …` up to 1 (inclusive when it lands on the grid).
pub fn u_grid_above(c0: f64, step: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut k = 0;
    loop {
        let u = c0 + k as f64 * step;
        let u = (u * 1e12).round() / 1e12;
        if u > 1.0 + 1e-12 {
            break;
        }
        grid.push(u.clamp(c0, 1.0));
        k += 1;
    }
    grid
}

fn hit_threshold(u: f64) -> f64 {
    if u >= 1.0 {
        FULL_EXCITATION_THRESHOLD
    } else {
        u
    }
}

/// What one trajectory contributes to the ensemble statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySummary {
    pub max_c: f64,
    pub final_c: f64,
    pub first_below: Vec<Option<f64>>,
    pub time_above_start: f64,
    pub occupation: Vec<f64>,
    /// `(exit time, left through the upper end)`.
    pub exit: Option<(f64, bool)>,
    pub jumped: bool,
    pub trace: Vec<f64>,
    pub overshoots: usize,
    pub steps: usize,
}

/// Runs trajectory `index` of the ensemble.
pub fn run_trajectory(config: &EnsembleConfig, index: u64) -> Result<TrajectorySummary, MonteCarloError> {
    let spec = config.trajectory_spec()?;
    let mut stream = NoiseStream::new(config.master_seed, index);
    let c0 = config.c0;
    let dt = config.dt;
    let mut s = TrajectorySummary {
        max_c: c0,
        final_c: c0,
        first_below: vec![None; config.a_grid.len()],
        time_above_start: 0.0,
        occupation: vec![0.0; config.occupation_intervals.len()],
        exit: None,
        jumped: false,
        trace: Vec::new(),
        overshoots: 0,
        steps: 0,
    };
    // Decay levels in decreasing order so each step checks only the next one.
    let mut order: Vec<usize> = (0..config.a_grid.len()).collect();
    order.sort_by(|&i, &j| config.a_grid[j].total_cmp(&config.a_grid[i]));
    let mut next_level = 0;

    let observe = |x: &StepSample| {
        let c = x.c;
        s.max_c = s.max_c.max(c);
        while next_level < order.len() && c <= config.a_grid[order[next_level]] {
            s.first_below[order[next_level]] = Some(x.t);
            next_level += 1;
        }
        if x.step > 0 {
            if c > c0 {
                s.time_above_start += dt;
            }
            for (acc, &(l, r)) in s.occupation.iter_mut().zip(&config.occupation_intervals) {
                if l <= c && c <= r {
                    *acc += dt;
                }
            }
        }
        if let (None, Some((a, b))) = (s.exit, config.exit_interval) {
            if c <= a || c >= b {
                s.exit = Some((x.t, c >= b));
            }
        }
        s.jumped |= x.jumped;
        if config.trace_every > 0 && x.step.is_multiple_of(config.trace_every) {
            s.trace.push(c);
        }
        match config.absorb_below {
            Some(floor) if c <= floor && (config.exit_interval.is_none() || s.exit.is_some()) => Flow::Stop,
            _ => Flow::Continue,
        }
    };
    let run = drive_trajectory(&spec, &mut stream, observe)
        .map_err(|source| MonteCarloError::Trajectory { index, source })?;
    s.final_c = run.final_c;
    s.overshoots = run.overshoots;
    s.steps = run.steps;
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HitEstimate {
    pub level: f64,
    pub hits: usize,
    pub fraction: f64,
    pub ci: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PassageEstimate {
    pub level: f64,
    /// Mean over trajectories that reached the level within the horizon.
    pub time: MeanEstimate,
    pub unresolved: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitEstimate {
    pub interval: (f64, f64),
    pub upper_exits: usize,
    pub upper_fraction: f64,
    pub upper_ci: (f64, f64),
    pub time: MeanEstimate,
    pub unresolved: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupationEstimate {
    pub interval: (f64, f64),
    pub time: MeanEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracePoint {
    pub t: f64,
    pub mean: f64,
    pub std_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub n_traj: usize,
    pub dt: f64,
    pub effective_horizon: f64,
    /// Finite-horizon estimates of the probability of ever reaching each `u`.
    pub hits: Vec<HitEstimate>,
    pub first_below: Vec<PassageEstimate>,
    pub occupation_above_start: MeanEstimate,
    pub occupation: Vec<OccupationEstimate>,
    pub exit: Option<ExitEstimate>,
    pub jump_fraction: HitEstimate,
    pub mean_trace: Vec<TracePoint>,
    pub max_c_observed: f64,
    pub overshoots: usize,
    pub total_steps: u64,
}

impl EnsembleStats {
    pub fn hit_fractions(&self) -> Vec<f64> {
        self.hits.iter().map(|h| h.fraction).collect()
    }
}

/// Simulates all trajectories (in parallel) and returns their summaries in index order.
pub fn run_summaries(config: &EnsembleConfig) -> Result<Vec<TrajectorySummary>, MonteCarloError> {
    config.validate()?;
    (0..config.n_traj as u64)
        .into_par_iter()
        .map(|k| run_trajectory(config, k))
        .collect()
}

pub fn run_ensemble(config: &EnsembleConfig) -> Result<EnsembleStats, MonteCarloError> {
    let summaries = run_summaries(config)?;
    Ok(aggregate(config, &summaries))
}

/// Reduces per-trajectory summaries (in slice order) into ensemble statistics.
pub fn aggregate(config: &EnsembleConfig, summaries: &[TrajectorySummary]) -> EnsembleStats {
    let n = summaries.len();
    let hit_estimate = |level: f64, hits: usize| HitEstimate {
        level,
        hits,
        fraction: hits as f64 / n as f64,
        ci: wilson_interval(hits, n, Z95),
    };
    let hits = config
        .u_grid
        .iter()
        .map(|&u| {
            let thr = hit_threshold(u);
            hit_estimate(u, summaries.iter().filter(|s| s.max_c >= thr).count())
        })
        .collect();
    let first_below = config
        .a_grid
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let times = summaries.iter().filter_map(|s| s.first_below[i]);
            PassageEstimate {
                level: a,
                time: MeanEstimate::from_samples(times.clone()),
                unresolved: n - times.count(),
            }
        })
        .collect();
    let occupation = config
        .occupation_intervals
        .iter()
        .enumerate()
        .map(|(i, &interval)| OccupationEstimate {
            interval,
            time: MeanEstimate::from_samples(summaries.iter().map(|s| s.occupation[i])),
        })
        .collect();
    let exit = config.exit_interval.map(|interval| {
        let resolved = summaries.iter().filter_map(|s| s.exit);
        let upper = resolved.clone().filter(|e| e.1).count();
        let count = resolved.clone().count();
        ExitEstimate {
            interval,
            upper_exits: upper,
            upper_fraction: upper as f64 / count.max(1) as f64,
            upper_ci: wilson_interval(upper, count, Z95),
            time: MeanEstimate::from_samples(resolved.map(|e| e.0)),
            unresolved: n - count,
        }
    });
    let mean_trace = if config.trace_every > 0 {
        let points = summaries.iter().map(|s| s.trace.len()).min().unwrap_or(0);
        (0..points)
            .map(|j| {
                let m = MeanEstimate::from_samples(summaries.iter().map(|s| s.trace[j]));
                TracePoint {
                    t: (j * config.trace_every) as f64 * config.dt,
                    mean: m.mean,
                    std_err: m.std_err,
                }
            })
            .collect()
    } else {
        Vec::new()
    };
    let effective_horizon = config.step_config().map(|c| c.effective_horizon()).unwrap_or(config.horizon);
    EnsembleStats {
        n_traj: n,
        dt: config.dt,
        effective_horizon,
        hits,
        first_below,
        occupation_above_start: MeanEstimate::from_samples(summaries.iter().map(|s| s.time_above_start)),
        occupation,
        exit,
        jump_fraction: hit_estimate(0.0, summaries.iter().filter(|s| s.jumped).count()),
        mean_trace,
        max_c_observed: summaries.iter().map(|s| s.max_c).fold(f64::NEG_INFINITY, f64::max),
        overshoots: summaries.iter().map(|s| s.overshoots).sum(),
        total_steps: summaries.iter().map(|s| s.steps as u64).sum(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub u: f64,
    pub fraction: f64,
    pub ci: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcitationCurve {
    pub points: Vec<CurvePoint>,
    pub horizon: f64,
    pub caveat: String,
}

/// Fraction of trajectories reaching each level of `config.u_grid` within the horizon.
pub fn estimate_excitation_curve(config: &EnsembleConfig) -> Result<ExcitationCurve, MonteCarloError> {
    let stats = run_ensemble(config)?;
    Ok(ExcitationCurve {
        points: stats
            .hits
            .iter()
            .map(|h| CurvePoint { u: h.level, fraction: h.fraction, ci: h.ci })
            .collect(),
        horizon: stats.effective_horizon,
        caveat: format!(
            "finite-horizon estimate: trajectories first reaching u after t = {} are counted as misses, \
             and crossings between grid points (dt = {}) are not detected",
            stats.effective_horizon, config.dt
        ),
    })
}
