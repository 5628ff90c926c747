use clap::Args;
use emitrace_core::first_passage::{
    excitation_prob, hit_prob_b_before_a, mean_excitation_time, mean_exit_time, mean_first_passage_below,
};
use emitrace_core::{Interval01, Scheme1D};

use crate::error::{CliError, Result};
use crate::output::{Cell, Csv};

fn scheme1d(name: &str) -> Result<Scheme1D> {
    match name {
        "heterodyne" => Ok(Scheme1D::Heterodyne),
        "optimal-homodyne" => Ok(Scheme1D::OptimalHomodyne),
        other => Err(CliError::Usage(format!(
            "closed forms exist for heterodyne and optimal-homodyne, not {other}"
        ))),
    }
}

fn analytic(v: std::result::Result<f64, emitrace_core::first_passage::FirstPassageError>) -> Result<f64> {
    v.map_err(|e| CliError::Usage(e.to_string()))
}

#[derive(Debug, Args)]
pub struct HitprobArgs {
    /// heterodyne or optimal-homodyne
    #[arg(long, default_value = "optimal-homodyne")]
    pub scheme: String,
    /// Initial population y
    #[arg(long)]
    pub y: f64,
    /// Upper levels u
    #[arg(long, value_delimiter = ',', required = true)]
    pub u: Vec<f64>,
    /// Lower level a; without it the probability of ever reaching u is reported
    #[arg(long)]
    pub a: Option<f64>,
}

pub fn hitprob(args: &HitprobArgs) -> Result<()> {
    let scheme = scheme1d(&args.scheme)?;
    let mut csv = Csv::new(
        &match args.a {
            Some(a) => format!("{} from y = {}: probability of reaching u before a = {a}", scheme.name(), args.y),
            None => format!("{} from y = {}: probability of ever reaching u", scheme.name(), args.y),
        },
        &["u", "probability"],
    );
    for &u in &args.u {
        let p = match args.a {
            Some(a) => {
                let itv = Interval01::new(a, u).map_err(|e| CliError::Usage(e.to_string()))?;
                analytic(hit_prob_b_before_a(args.y, itv, scheme))?
            }
            None => analytic(excitation_prob(u, args.y, scheme))?,
        };
        csv.row([u.into(), p.into()]);
    }
    print!("{}", csv.as_str());
    Ok(())
}

#[derive(Debug, Args)]
pub struct TimesArgs {
    /// heterodyne or optimal-homodyne
    #[arg(long, default_value = "optimal-homodyne")]
    pub scheme: String,
    /// Initial population y
    #[arg(long)]
    pub y: f64,
    /// Lower levels a for first passage below a
    #[arg(long, value_delimiter = ',')]
    pub a: Vec<f64>,
    /// Upper level b; with a single --a, also reports the mean exit time from (a, b)
    #[arg(long)]
    pub b: Option<f64>,
}

pub fn times(args: &TimesArgs) -> Result<()> {
    let scheme = scheme1d(&args.scheme)?;
    let y = args.y;
    let mut csv = Csv::new(
        &format!("{} from y = {y}: mean times in units of 1/gamma", scheme.name()),
        &["quantity", "a", "b", "value"],
    );
    let t = analytic(mean_excitation_time(y, scheme))?;
    csv.row(["mean_excitation_time".into(), Cell::Empty, Cell::Empty, t.into()]);
    for &a in &args.a {
        let t = analytic(mean_first_passage_below(a, y, scheme))?;
        csv.row(["mean_first_passage_below".into(), a.into(), Cell::Empty, t.into()]);
    }
    if let Some(b) = args.b {
        let [a] = args.a[..] else {
            return Err(CliError::Usage("--b needs exactly one --a".into()));
        };
        let itv = Interval01::new(a, b).map_err(|e| CliError::Usage(e.to_string()))?;
        let t = analytic(mean_exit_time(y, itv, scheme))?;
        csv.row(["mean_exit_time".into(), a.into(), b.into(), t.into()]);
    }
    print!("{}", csv.as_str());
    Ok(())
}
