use clap::Args;
use emitrace_core::montecarlo::{validate_with, Thresholds};
use emitrace_core::EnsembleConfig;

use crate::error::{CliError, Result};
use crate::output::{ensure_dir, file_name, json_lines, write_file, RunManifest};
use crate::settings::CommonArgs;

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Allowed absolute error of probability estimates (default 0.02, or 0.04 with --fast)
    #[arg(long)]
    pub tolerance: Option<f64>,
}

const DECAY_LEVELS: [f64; 2] = [0.1, 0.25];

/// All rows share one ensemble, so the sigma multiples are set for the run as a
/// whole rather than per row. Late in the decay the mean population is carried
/// by a few still-excited paths (at t = 5 the top 0.5% hold about a fifth of it),
/// so a 1000-path mean and its standard error both run low from t = 3 on;
/// --fast lets trace rows pass within 0.01 of the exact population.
fn thresholds(fast: bool) -> Thresholds {
    if fast {
        Thresholds { probability: 0.04, time_sigmas: 3.0, trace_sigmas: 3.0, trace_abs: 0.01 }
    } else {
        Thresholds { probability: 0.02, time_sigmas: 3.0, trace_sigmas: 3.0, trace_abs: 0.0 }
    }
}

pub fn run(args: &ValidateArgs) -> Result<()> {
    let settings = args.common.resolve()?;
    let mut th = thresholds(settings.fast);
    if let Some(t) = args.tolerance {
        if t.is_nan() || t < 0.0 {
            return Err(CliError::Usage(format!("--tolerance must be non-negative, got {t}")));
        }
        th.probability = t;
    }
    let c0 = settings.c0;
    let config = EnsembleConfig {
        phi_tilde0: settings.phi_tilde0(),
        n_traj: settings.n_traj,
        dt: settings.dt,
        horizon: settings.horizon,
        master_seed: settings.seed,
        a_grid: DECAY_LEVELS.into_iter().filter(|&a| a <= c0).collect(),
        exit_interval: (c0 > 0.0 && c0 < 1.0).then_some((0.5 * c0, 0.5 * (1.0 + c0))),
        ..EnsembleConfig::new(settings.scheme, c0)
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let report = validate_with(&config, th);

    ensure_dir(&settings.out)?;
    let path = settings.out_file("validate.jsonl");
    write_file(&path, &json_lines(&report.rows)?)?;
    let mut manifest = RunManifest::new("validate", &settings);
    manifest.extra = serde_json::json!({ "thresholds": th, "ensemble": config });
    manifest.outputs.push(file_name(&path));
    manifest.write(&settings.out, "validate")?;

    let failed: Vec<_> = report.failures().collect();
    println!("{}: {} rows, {} failed", path.display(), report.rows.len(), failed.len());
    match failed.first() {
        None => Ok(()),
        Some(first) => Err(CliError::ValidationFailed(format!(
            "{} of {} validation rows failed; first: {} ({}) analytic {} estimate {}",
            failed.len(),
            report.rows.len(),
            first.quantity,
            first.params,
            first.analytic,
            first.estimate
        ))),
    }
}
