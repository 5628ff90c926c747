use clap::Args;
use emitrace_core::first_passage::{excitation_prob, mean_excitation_time, mean_first_passage_below};
use emitrace_core::montecarlo::{estimate_excitation_curve, MonteCarloError};
use emitrace_core::{DetectionScheme, EnsembleConfig, Representation, Scheme1D};

use super::simulate::{path_csv, trajectory};
use crate::error::{CliError, Result};
use crate::output::{ensure_dir, file_name, Cell, Csv, RunManifest};
use crate::settings::{CommonArgs, Settings};

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// Figure number, 1 to 6
    #[arg(value_parser = clap::value_parser!(u8).range(1..=6))]
    pub n: u8,
    #[command(flatten)]
    pub common: CommonArgs,
}

const START_LEVELS: [f64; 4] = [0.3, 0.5, 0.7, 0.9];
const PHASE_FRACS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 1.0];
/// Trajectories below this population are stopped: from there the chance of
/// climbing back to 0.3 is below e^-20.
const ABSORB_BELOW: f64 = 0.02;

fn mc_error(e: MonteCarloError) -> CliError {
    match e {
        MonteCarloError::Config(m) => CliError::Usage(m),
        other => CliError::Runtime(other.to_string()),
    }
}

fn analytic(v: std::result::Result<f64, emitrace_core::first_passage::FirstPassageError>) -> Result<f64> {
    v.map_err(|e| CliError::Runtime(e.to_string()))
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| ((lo + i as f64 * step) * 1e9).round() / 1e9).collect()
}

fn ensemble(settings: &Settings, scheme: DetectionScheme, c0: f64, seed_offset: u64) -> EnsembleConfig {
    EnsembleConfig {
        n_traj: settings.n_traj,
        dt: settings.dt,
        horizon: settings.horizon,
        master_seed: settings.seed.wrapping_add(seed_offset),
        absorb_below: (c0 > ABSORB_BELOW).then_some(ABSORB_BELOW),
        ..EnsembleConfig::new(scheme, c0)
    }
}

fn fig2(settings: &Settings) -> Result<Csv> {
    let mut csv = Csv::new(
        "optimal homodyne: fraction of trajectories reaching u within the horizon, with 95% Wilson interval,\n\
         and the probability of ever reaching u from c0",
        &["c0", "u", "fraction", "ci_lo", "ci_hi", "analytic"],
    );
    for (i, c0) in START_LEVELS.into_iter().enumerate() {
        let curve = estimate_excitation_curve(&ensemble(settings, DetectionScheme::OptimalHomodyne, c0, i as u64))
            .map_err(mc_error)?;
        for p in curve.points {
            let exact = analytic(excitation_prob(p.u, c0, Scheme1D::OptimalHomodyne))?;
            csv.row([c0.into(), p.u.into(), p.fraction.into(), p.ci.0.into(), p.ci.1.into(), exact.into()]);
        }
    }
    Ok(csv)
}

fn fig3(settings: &Settings) -> Result<Csv> {
    let c0 = settings.c0;
    let mut csv = Csv::new(
        &format!(
            "homodyne from c0 = {c0} with initial phase phase_frac * pi/2: fraction reaching u (95% Wilson interval);\n\
             phase_frac 0 rows are the analytic optimal-homodyne probability"
        ),
        &["phase_frac", "u", "fraction", "ci_lo", "ci_hi", "source"],
    );
    let scheme = DetectionScheme::Homodyne { phase: 0.0 };
    for (i, f) in PHASE_FRACS.into_iter().enumerate() {
        let cfg = EnsembleConfig {
            phi_tilde0: f * std::f64::consts::FRAC_PI_2,
            representation: Representation::Amplitude,
            ..ensemble(settings, scheme, c0, i as u64)
        };
        for p in estimate_excitation_curve(&cfg).map_err(mc_error)?.points {
            csv.row([f.into(), p.u.into(), p.fraction.into(), p.ci.0.into(), p.ci.1.into(), "mc".into()]);
        }
    }
    for u in emitrace_core::montecarlo::u_grid_above(c0, 0.05) {
        let p = analytic(excitation_prob(u, c0, Scheme1D::OptimalHomodyne))?;
        csv.row([0.0.into(), u.into(), p.into(), Cell::Empty, Cell::Empty, "analytic".into()]);
    }
    Ok(csv)
}

fn fig4() -> Result<Csv> {
    let mut csv = Csv::new(
        "probability of ever reaching u from y",
        &["scheme", "y", "u", "probability"],
    );
    for scheme in Scheme1D::ALL {
        for y in START_LEVELS {
            for u in grid(y, 1.0, 0.005) {
                let p = analytic(excitation_prob(u, y, scheme))?;
                csv.row([scheme.name().into(), y.into(), u.into(), p.into()]);
            }
        }
    }
    Ok(csv)
}

fn fig5() -> Result<Csv> {
    let mut csv = Csv::new(
        "mean time spent above the initial population y, in units of 1/gamma",
        &["y", "heterodyne", "optimal-homodyne"],
    );
    for y in grid(0.0, 1.0, 0.01) {
        let het = analytic(mean_excitation_time(y, Scheme1D::Heterodyne))?;
        let hom = analytic(mean_excitation_time(y, Scheme1D::OptimalHomodyne))?;
        csv.row([y.into(), het.into(), hom.into()]);
    }
    Ok(csv)
}

fn fig6(settings: &Settings) -> Result<Csv> {
    let y = settings.c0;
    if y <= 0.0 {
        return Err(CliError::Usage("figure 6 needs --c0 > 0".into()));
    }
    let mut csv = Csv::new(
        &format!(
            "mean first passage time from y = {y} down to a, in units of 1/gamma;\n\
             exponential = ln(y/a), the time at which y exp(-t) reaches a"
        ),
        &["a", "heterodyne", "optimal-homodyne", "exponential"],
    );
    let steps = (y / 0.01).floor() as usize;
    for i in 1..=steps {
        let a = (i as f64 * 0.01 * 1e9).round() / 1e9;
        let het = analytic(mean_first_passage_below(a, y, Scheme1D::Heterodyne))?;
        let hom = analytic(mean_first_passage_below(a, y, Scheme1D::OptimalHomodyne))?;
        csv.row([a.into(), het.into(), hom.into(), (y / a).ln().into()]);
    }
    Ok(csv)
}

pub fn run(args: &FigureArgs) -> Result<()> {
    let settings = args.common.resolve()?;
    let csv = match args.n {
        1 => {
            let path = trajectory(&settings, Representation::Population, 0)?;
            path_csv(&settings, &path)
        }
        2 => fig2(&settings)?,
        3 => fig3(&settings)?,
        4 => fig4()?,
        5 => fig5()?,
        6 => fig6(&settings)?,
        n => return Err(CliError::Usage(format!("figure must be 1 to 6, got {n}"))),
    };
    ensure_dir(&settings.out)?;
    let stem = format!("fig{}", args.n);
    let path = settings.out_file(&format!("{stem}.csv"));
    csv.write(&path)?;
    let mut manifest = RunManifest::new(format!("figure {}", args.n), &settings);
    if matches!(args.n, 2 | 3) {
        manifest.extra = serde_json::json!({ "absorb_below": ABSORB_BELOW });
    }
    manifest.outputs.push(file_name(&path));
    manifest.write(&settings.out, &stem)?;
    println!("{}", path.display());
    Ok(())
}
