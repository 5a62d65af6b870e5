//! `ranch`: simulations, exponent fits, drift surveys and plots on top of
//! `ranch_core`.
//!
//! Exit codes: 0 success, 1 usage or malformed input, 2 I/O failure,
//! 3 failed `--validate` check, 4 simulation error.

// `!(x > 0.0)` guards are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub mod commands;
pub mod error;
pub mod manifest;
pub mod svg;
pub mod table;

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "ranch",
    version,
    about = "Hull-avoiding planar walk and extremal investor simulator"
)]
pub struct Cli {
    /// Worker threads for ensembles (0 = one per core). Results do not depend on it.
    #[arg(long, global = true, env = "RANCHER_THREADS", default_value_t = 0)]
    pub threads: usize,

    /// Base seed. Single runs use stream 0; ensembles derive one stream per walk.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one hull-avoiding walk and write checkpoint records as CSV.
    SimulateRancher(SimulateRancherArgs),
    /// Run one extremal investor path and write checkpoint records as CSV.
    SimulateInvestor(SimulateInvestorArgs),
    /// Fit the width exponent over an ensemble of walks.
    EstimateExponent(ExponentArgs),
    /// Terminal speed distribution over an ensemble of walks.
    Speed(SpeedArgs),
    /// Binned drift survey of the potential and the recurrence conditions.
    DriftCheck(DriftArgs),
    /// Render a simulation CSV or an exponent JSON as SVG.
    Plot(PlotArgs),
}

/// Which steps get a record.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Checkpoints {
    All,
    Geometric(u32),
    List(Vec<u64>),
}

impl Checkpoints {
    pub fn resolve(&self, steps: u64) -> Result<Vec<u64>, CliError> {
        match self {
            Checkpoints::All => Ok((0..=steps).collect()),
            Checkpoints::Geometric(k) => Ok(ranch_core::stats::geometric_checkpoints(steps, *k)),
            Checkpoints::List(v) => {
                if v.iter().any(|&c| c > steps) {
                    return Err(CliError::Usage(format!(
                        "checkpoint beyond --steps {steps}"
                    )));
                }
                Ok(v.clone())
            }
        }
    }
}

fn parse_checkpoints(s: &str) -> Result<Checkpoints, String> {
    match s {
        "all" => Ok(Checkpoints::All),
        "geometric" => Ok(Checkpoints::Geometric(25)),
        _ => {
            if let Some(k) = s.strip_prefix("geometric:") {
                let k: u32 = k
                    .parse()
                    .map_err(|_| format!("bad points per decade '{k}'"))?;
                if k == 0 {
                    return Err("points per decade must be positive".into());
                }
                return Ok(Checkpoints::Geometric(k));
            }
            let mut v = parse_counts(s)?;
            v.sort_unstable();
            v.dedup();
            Ok(Checkpoints::List(v))
        }
    }
}

/// Non-negative integer, also in exponent form such as `1e5`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 9.007_199_254_740_992e15 => Ok(v as u64),
        _ => Err(format!("'{s}' is not a non-negative integer")),
    }
}

fn parse_counts(s: &str) -> Result<Vec<u64>, String> {
    s.split(',').map(parse_count).collect()
}

fn parse_length(s: &str) -> Result<u64, String> {
    match parse_count(s)? {
        0 => Err("lengths must be positive".into()),
        v => Ok(v),
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateRancherArgs {
    #[arg(long, value_parser = parse_count)]
    pub steps: u64,
    /// `geometric` (25 per decade), `geometric:K`, `all`, or a comma list.
    #[arg(long, value_parser = parse_checkpoints, default_value = "geometric")]
    pub checkpoints: Checkpoints,
    /// CSV destination (stdout when absent); a manifest is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Cross-check every step against the brute-force oracles.
    #[arg(long)]
    pub validate: bool,
    /// Also write an SVG of the full path and final hull.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Append a `beta` column with the last step angle.
    #[arg(long)]
    pub record_beta: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateInvestorArgs {
    #[arg(long, value_parser = parse_count)]
    pub steps: u64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, value_parser = parse_checkpoints, default_value = "geometric")]
    pub checkpoints: Checkpoints,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub validate: bool,
    /// Also write an SVG of the path with the upper and lower hull chains.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelArg {
    Rancher,
    Investor,
    /// Synthetic model whose width is exactly `n^exponent`.
    PowerLaw,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AggregatorArg {
    PerWalkPoints,
    Median,
    Mean,
}

impl From<AggregatorArg> for ranch_core::Aggregator {
    fn from(a: AggregatorArg) -> Self {
        match a {
            AggregatorArg::PerWalkPoints => ranch_core::Aggregator::PerWalkPoints,
            AggregatorArg::Median => ranch_core::Aggregator::Median,
            AggregatorArg::Mean => ranch_core::Aggregator::Mean,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ExponentArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Investor influence parameter.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Width exponent of the power-law model.
    #[arg(long)]
    pub exponent: Option<f64>,
    /// Comma-separated walk lengths, e.g. `1e3,1e4,1e5`.
    #[arg(long, value_parser = parse_length, value_delimiter = ',', default_value = "1e3,1e4,1e5")]
    pub lengths: Vec<u64>,
    #[arg(long, value_parser = parse_count, default_value = "100")]
    pub reps: u64,
    #[arg(long, value_enum, default_value = "median")]
    pub aggregator: AggregatorArg,
    /// JSON destination (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SpeedArgs {
    #[arg(long, value_enum, default_value = "rancher")]
    pub model: ModelArg,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_parser = parse_count, default_value = "1e5")]
    pub steps: u64,
    #[arg(long, value_parser = parse_count, default_value = "100")]
    pub reps: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DriftArgs {
    #[arg(long, value_parser = parse_count, default_value = "1e5")]
    pub steps: u64,
    #[arg(long, value_parser = parse_count, default_value = "50")]
    pub reps: u64,
    /// Threshold defining the set A = {d < dstar}.
    #[arg(long, default_value_t = 30.0)]
    pub dstar: f64,
    #[arg(long, default_value_t = 1.0 / 6.0)]
    pub c: f64,
    /// Lag of the displacement check on A.
    #[arg(long, value_parser = parse_count, default_value = "64")]
    pub m: u64,
    /// Angle cutoff used to label bins.
    #[arg(long, default_value_t = 0.25)]
    pub epsilon: f64,
    #[arg(long, value_parser = parse_count, default_value = "1000")]
    pub burn_in: u64,
    /// Bins with fewer samples are reported but not judged.
    #[arg(long, value_parser = parse_count, default_value = "10000")]
    pub min_bin_count: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PlotArgs {
    /// A CSV from simulate-rancher / simulate-investor, or an exponent JSON.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    let argv: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match commands::dispatch(cli, &argv, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_accept_exponent_form() {
        assert_eq!(parse_count("1e5"), Ok(100_000));
        assert_eq!(parse_count("300"), Ok(300));
        assert!(parse_count("-1").is_err());
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("x").is_err());
    }

    #[test]
    fn checkpoint_forms() {
        assert_eq!(parse_checkpoints("all"), Ok(Checkpoints::All));
        assert_eq!(
            parse_checkpoints("geometric"),
            Ok(Checkpoints::Geometric(25))
        );
        assert_eq!(
            parse_checkpoints("geometric:10"),
            Ok(Checkpoints::Geometric(10))
        );
        assert_eq!(
            parse_checkpoints("10,5,5,1e2"),
            Ok(Checkpoints::List(vec![5, 10, 100]))
        );
        assert!(parse_checkpoints("geometric:0").is_err());
        assert!(Checkpoints::List(vec![5, 20]).resolve(10).is_err());
        assert_eq!(Checkpoints::All.resolve(2).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn lengths_split_on_commas() {
        let cli = Cli::try_parse_from([
            "ranch",
            "estimate-exponent",
            "--model",
            "rancher",
            "--lengths",
            "1e4,1e3",
        ])
        .unwrap();
        match cli.command {
            Command::EstimateExponent(a) => assert_eq!(a.lengths, vec![10_000, 1000]),
            other => panic!("{other:?}"),
        }
        assert!(parse_length("0").is_err());
    }
}
