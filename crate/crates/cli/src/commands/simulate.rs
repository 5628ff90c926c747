use clap::{Args, ValueEnum};
use emitrace_core::emitter::simulate_trajectory;
use emitrace_core::{NoiseStream, PopulationPath, Representation, StepConfig, StepScheme, TrajectorySpec};

use crate::error::{CliError, Result};
use crate::output::{ensure_dir, file_name, Cell, Csv, RunManifest};
use crate::settings::{CommonArgs, Settings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RepresentationArg {
    Population,
    Amplitude,
}

impl From<RepresentationArg> for Representation {
    fn from(r: RepresentationArg) -> Self {
        match r {
            RepresentationArg::Population => Representation::Population,
            RepresentationArg::Amplitude => Representation::Amplitude,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// State that is stepped for the diffusive schemes
    #[arg(long, value_enum, default_value = "population")]
    pub representation: RepresentationArg,
    /// Substream index of the trajectory
    #[arg(long, default_value_t = 0)]
    pub index: u64,
}

pub const PATH_HEADER: [&str; 6] = ["t", "C", "dq_re", "dq_im", "jumped", "rho_ee"];

pub fn trajectory(settings: &Settings, representation: Representation, index: u64) -> Result<PopulationPath> {
    let config = StepConfig::new(settings.dt, settings.horizon, StepScheme::Milstein)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let spec = TrajectorySpec::new(settings.scheme, settings.c0, config)
        .with_phase(settings.phi_tilde0())
        .with_representation(representation);
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    simulate_trajectory(&spec, &mut NoiseStream::new(settings.seed, index))
        .map_err(|e| CliError::Runtime(e.to_string()))
}

/// Path table with the measurement record and the master-equation reference `c0 e^{-t}`.
pub fn path_csv(settings: &Settings, path: &PopulationPath) -> Csv {
    let comment = format!(
        "single trajectory: scheme={} c0={} seed={} stream={} dt={} overshoots={}\n\
         t in units of 1/gamma; dq over the step ending at t (empty where no record is kept); rho_ee = c0 exp(-t)",
        settings.scheme,
        settings.c0,
        path.metadata.master_seed,
        path.metadata.stream_index,
        path.metadata.dt,
        path.metadata.overshoots
    );
    let mut csv = Csv::new(&comment, &PATH_HEADER);
    let complex = settings.scheme.complex_record();
    let mut jumps = path.record.jumps.iter().peekable();
    for (k, (&t, &c)) in path.times.iter().zip(&path.values).enumerate() {
        let dq = match (&path.record.dq, k) {
            (Some(dq), k) if k > 0 => Some(dq[k - 1]),
            _ => None,
        };
        let jumped = jumps.next_if(|&&j| j == t).is_some();
        csv.row([
            Cell::F(t),
            Cell::F(c),
            dq.map(|q| q.re).into(),
            dq.filter(|_| complex).map(|q| q.im).into(),
            Cell::I(jumped as u64),
            Cell::F(settings.c0 * (-t).exp()),
        ]);
    }
    csv
}

pub fn run(args: &SimulateArgs) -> Result<()> {
    let settings = args.common.resolve()?;
    let representation = args.representation.into();
    let path = trajectory(&settings, representation, args.index)?;
    ensure_dir(&settings.out)?;
    let stem = format!("simulate_{}_seed{}_{}", settings.scheme, settings.seed, args.index);
    let csv_path = settings.out_file(&format!("{stem}.csv"));
    path_csv(&settings, &path).write(&csv_path)?;
    let mut manifest = RunManifest::new("simulate", &settings);
    manifest.extra = serde_json::json!({ "representation": representation.name(), "index": args.index });
    manifest.outputs.push(file_name(&csv_path));
    manifest.write(&settings.out, &stem)?;
    println!("{}", csv_path.display());
    Ok(())
}
