use serde::Serialize;

use crate::first_passage::{
    excitation_prob, hit_prob_b_before_a, mean_excitation_time, mean_exit_time,
    mean_first_passage_below, Interval01, Scheme1D,
};
use crate::types::DetectionScheme;

use super::{run_ensemble, EnsembleConfig, EnsembleStats, MeanEstimate, MonteCarloError};

/// One analytic-versus-simulation comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRow {
    pub quantity: String,
    pub params: String,
    pub analytic: f64,
    pub estimate: f64,
    pub ci: (f64, f64),
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.rows.extend(other.rows);
    }
}

/// Pass criteria for the rows of a validation report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    /// Allowed absolute error of probability estimates.
    pub probability: f64,
    /// Standard errors allowed for sample means of times.
    pub time_sigmas: f64,
    /// Standard errors allowed for the mean trace and the jump fraction.
    pub trace_sigmas: f64,
    /// Absolute deviation of the mean trace that always passes.
    pub trace_abs: f64,
}

impl Thresholds {
    /// `tolerance` for probabilities, 2 s.e. for times, 3 s.e. for the trace.
    pub fn new(tolerance: f64) -> Self {
        Self { probability: tolerance, time_sigmas: 2.0, trace_sigmas: 3.0, trace_abs: 0.0 }
    }
}
/// Horizon of the ensemble used for passage and occupation times.
const TIMES_HORIZON: f64 = 40.0;

fn mean_row(quantity: &str, params: String, analytic: f64, est: &MeanEstimate, sigmas: f64) -> ValidationRow {
    let ci = est.interval(sigmas);
    ValidationRow {
        quantity: quantity.into(),
        params,
        analytic,
        estimate: est.mean,
        ci,
        pass: est.n > 0 && ci.0 <= analytic && analytic <= ci.1,
    }
}

/// Compares simulation against the closed forms and returns one row per check.
///
/// Probability rows (`excitation_prob`, `hit_prob_b_before_a`) pass when the
/// estimate is within `tolerance` of the analytic value. Time rows pass when
/// the analytic value lies within two standard errors of the sample mean.
/// Mean-trace rows (10 times) and the photon-counting jump fraction use three
/// standard errors. Passage and occupation times come from a second ensemble
/// with a long horizon whose trajectories stop once they fall below every
/// tracked level.
///
/// Simulation failures are reported as failing rows.
pub fn validate_analytics(config: &EnsembleConfig, tolerance: f64) -> ValidationReport {
    validate_with(config, Thresholds::new(tolerance))
}

/// [`validate_analytics`] with explicit pass criteria.
pub fn validate_with(config: &EnsembleConfig, th: Thresholds) -> ValidationReport {
    let mut report = ValidationReport::default();
    let tag = format!("scheme={} c0={} n={} dt={}", config.scheme, config.c0, config.n_traj, config.dt);
    let error_row = |quantity: &str, e: MonteCarloError| ValidationRow {
        quantity: quantity.into(),
        params: format!("{tag} error={e}"),
        analytic: f64::NAN,
        estimate: f64::NAN,
        ci: (f64::NAN, f64::NAN),
        pass: false,
    };

    let mut hits_cfg = config.clone();
    hits_cfg.absorb_below = None;
    hits_cfg.trace_every = hits_cfg.step_config().map(|c| (c.n_steps() / 10).max(1)).unwrap_or(1);
    match run_ensemble(&hits_cfg) {
        Ok(stats) => {
            report.extend(hit_rows(config, &stats, th, &tag));
            report.extend(trace_rows(config, &stats, th, &tag));
        }
        Err(e) => report.rows.push(error_row("ensemble", e)),
    }

    if let Ok(scheme) = Scheme1D::try_from(config.scheme) {
        if config.c0 > 0.0 && config.c0 < 1.0 {
            let mut floor = config.c0 * 0.5;
            for &a in &config.a_grid {
                floor = floor.min(0.5 * a);
            }
            if let Some((a, _)) = config.exit_interval {
                floor = floor.min(0.5 * a);
            }
            let times_cfg = EnsembleConfig {
                u_grid: Vec::new(),
                horizon: config.horizon.max(TIMES_HORIZON),
                absorb_below: Some(floor),
                trace_every: 0,
                ..config.clone()
            };
            match run_ensemble(&times_cfg) {
                Ok(stats) => report.extend(time_rows(config, scheme, &stats, th, &tag)),
                Err(e) => report.rows.push(error_row("time ensemble", e)),
            }
        }
    }
    report
}

fn hit_rows(config: &EnsembleConfig, stats: &EnsembleStats, th: Thresholds, tag: &str) -> ValidationReport {
    let mut report = ValidationReport::default();
    let c0 = config.c0;
    if let Ok(scheme) = Scheme1D::try_from(config.scheme) {
        if c0 > 0.0 {
            for h in &stats.hits {
                if let Ok(p) = excitation_prob(h.level, c0, scheme) {
                    report.rows.push(ValidationRow {
                        quantity: "excitation_prob".into(),
                        params: format!("{tag} u={}", h.level),
                        analytic: p,
                        estimate: h.fraction,
                        ci: h.ci,
                        pass: (h.fraction - p).abs() <= th.probability,
                    });
                }
            }
        }
    }
    if config.scheme == DetectionScheme::PhotonCounting {
        let t = stats.effective_horizon;
        let p = c0 * (1.0 - (-t).exp());
        let n = stats.n_traj as f64;
        let se = (p * (1.0 - p) / n).sqrt();
        let est = stats.jump_fraction.fraction;
        report.rows.push(ValidationRow {
            quantity: "jump_fraction".into(),
            params: format!("{tag} horizon={t}"),
            analytic: p,
            estimate: est,
            ci: stats.jump_fraction.ci,
            pass: (est - p).abs() <= th.trace_sigmas * se.max(f64::MIN_POSITIVE) || (se == 0.0 && est == p),
        });
    }
    report
}

fn trace_rows(config: &EnsembleConfig, stats: &EnsembleStats, th: Thresholds, tag: &str) -> ValidationReport {
    let mut report = ValidationReport::default();
    for p in stats.mean_trace.iter().skip(1) {
        let analytic = config.c0 * (-p.t).exp();
        let est = MeanEstimate { n: stats.n_traj, mean: p.mean, std_err: p.std_err };
        let mut row = mean_row("mean_trace", format!("{tag} t={}", p.t), analytic, &est, th.trace_sigmas);
        if p.std_err == 0.0 {
            row.pass = (p.mean - analytic).abs() <= 1e-12;
        }
        row.pass |= (p.mean - analytic).abs() <= th.trace_abs;
        report.rows.push(row);
    }
    report
}

fn time_rows(
    config: &EnsembleConfig,
    scheme: Scheme1D,
    stats: &EnsembleStats,
    th: Thresholds,
    tag: &str,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let c0 = config.c0;
    if let Ok(t) = mean_excitation_time(c0, scheme) {
        report.rows.push(mean_row(
            "mean_excitation_time",
            tag.to_string(),
            t,
            &stats.occupation_above_start,
            th.time_sigmas,
        ));
    }
    for p in &stats.first_below {
        if let Ok(t) = mean_first_passage_below(p.level, c0, scheme) {
            let mut row = mean_row(
                "mean_first_passage_below",
                format!("{tag} a={} unresolved={}", p.level, p.unresolved),
                t,
                &p.time,
                th.time_sigmas,
            );
            row.pass &= p.unresolved == 0;
            report.rows.push(row);
        }
    }
    if let Some(exit) = &stats.exit {
        let (a, b) = exit.interval;
        if let Ok(itv) = Interval01::new(a, b) {
            let params = format!("{tag} a={a} b={b} unresolved={}", exit.unresolved);
            if let Ok(p) = hit_prob_b_before_a(c0, itv, scheme) {
                report.rows.push(ValidationRow {
                    quantity: "hit_prob_b_before_a".into(),
                    params: params.clone(),
                    analytic: p,
                    estimate: exit.upper_fraction,
                    ci: exit.upper_ci,
                    pass: (exit.upper_fraction - p).abs() <= th.probability,
                });
            }
            if let Ok(t) = mean_exit_time(c0, itv, scheme) {
                let mut row = mean_row("mean_exit_time", params, t, &exit.time, th.time_sigmas);
                row.pass &= exit.unresolved == 0;
                report.rows.push(row);
            }
        }
    }
    report
}
