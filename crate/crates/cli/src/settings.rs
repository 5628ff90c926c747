//! Resolution of run parameters: flags, then the config file, then defaults.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use clap::Args;
use emitrace_core::DetectionScheme;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "EMITRACE_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "emitrace-out";

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// photon-counting, homodyne, optimal-homodyne or heterodyne
    #[arg(long)]
    pub scheme: Option<String>,
    /// Initial excited-state population
    #[arg(long)]
    pub c0: Option<f64>,
    /// Initial dipole phase relative to the local oscillator, as a fraction of pi/2 (homodyne only)
    #[arg(long)]
    pub phase_frac: Option<f64>,
    /// Time step in units of 1/gamma
    #[arg(long)]
    pub dt: Option<f64>,
    /// Final time in units of 1/gamma
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Number of trajectories per ensemble
    #[arg(long)]
    pub n_traj: Option<usize>,
    /// Master seed; trajectory i uses substream i
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (default: $EMITRACE_OUT_DIR, else ./emitrace-out)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Smaller ensembles (1000 trajectories) and relaxed tolerances
    #[arg(long)]
    pub fast: bool,
    /// Key-value file (TOML) with any of the options above; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    scheme: Option<String>,
    c0: Option<f64>,
    phase_frac: Option<f64>,
    dt: Option<f64>,
    horizon: Option<f64>,
    n_traj: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    fast: Option<bool>,
}

/// Fully resolved parameters, recorded in every manifest.
#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    #[serde(serialize_with = "serialize_scheme")]
    pub scheme: DetectionScheme,
    pub c0: f64,
    pub phase_frac: f64,
    pub dt: f64,
    pub horizon: f64,
    pub n_traj: usize,
    pub seed: u64,
    #[serde(skip)]
    pub out: PathBuf,
    pub fast: bool,
}

fn serialize_scheme<S: serde::Serializer>(s: &DetectionScheme, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(s.name())
}

impl Settings {
    /// Initial relative phase in radians.
    pub fn phi_tilde0(&self) -> f64 {
        self.phase_frac * FRAC_PI_2
    }

    pub fn out_file(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn read_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(format!("reading {}", path.display())))?;
    toml::from_str(&text).map_err(|e| {
        let msg = e.message().replace('\n', " ");
        CliError::Usage(format!("config file {}: {msg}", path.display()))
    })
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Usage(msg()))
    }
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<Settings> {
        let file = match &self.config {
            Some(path) => read_config(path)?,
            None => FileConfig::default(),
        };
        let scheme_name = self.scheme.clone().or(file.scheme).unwrap_or_else(|| "optimal-homodyne".into());
        let scheme: DetectionScheme = scheme_name.parse().map_err(CliError::Usage)?;
        let fast = self.fast || file.fast.unwrap_or(false);
        let out = self
            .out
            .clone()
            .or(file.out)
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
        let s = Settings {
            scheme,
            c0: self.c0.or(file.c0).unwrap_or(0.5),
            phase_frac: self.phase_frac.or(file.phase_frac).unwrap_or(0.0),
            dt: self.dt.or(file.dt).unwrap_or(1e-4),
            horizon: self.horizon.or(file.horizon).unwrap_or(5.0),
            n_traj: self.n_traj.or(file.n_traj).unwrap_or(if fast { 1000 } else { 5000 }),
            seed: self.seed.or(file.seed).unwrap_or(0),
            out,
            fast,
        };
        check((0.0..=1.0).contains(&s.c0), || format!("--c0 must lie in [0, 1], got {}", s.c0))?;
        check((0.0..=1.0).contains(&s.phase_frac), || {
            format!("--phase-frac must lie in [0, 1], got {}", s.phase_frac)
        })?;
        check(s.dt > 0.0 && s.dt.is_finite(), || format!("--dt must be positive, got {}", s.dt))?;
        check(s.horizon >= s.dt && s.horizon.is_finite(), || {
            format!("--horizon must be at least dt, got {}", s.horizon)
        })?;
        check(s.n_traj >= 1, || "--n-traj must be at least 1".into())?;
        if s.phase_frac != 0.0 && !matches!(s.scheme, DetectionScheme::Homodyne { .. }) {
            return Err(CliError::Usage(format!("--phase-frac only applies to --scheme homodyne, not {}", s.scheme)));
        }
        Ok(s)
    }
}
