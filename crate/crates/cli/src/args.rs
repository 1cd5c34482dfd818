use crate::Failure;
use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::path::PathBuf;

/// Maximum-fidelity estimation, goodness-of-fit and concordance.
#[derive(Debug, Parser)]
#[command(name = "fidelity", version, propagate_version = true)]
pub struct Cli {
    /// Worker threads [default: all cores]; results do not depend on it
    #[arg(long, global = true, value_name = "N", display_order = 100)]
    pub threads: Option<usize>,

    /// File of key=value lines supplying flags not given on the command line
    #[arg(long, global = true, value_name = "FILE", display_order = 101)]
    pub config: Option<PathBuf>,

    /// Write the result here instead of stdout (experiment: output directory)
    #[arg(long, global = true, value_name = "PATH", display_order = 102)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit free parameters of a model family to a sample
    Fit(FitArgs),
    /// Concordance of a fully specified model with a sample
    Gof(GofArgs),
    /// Fidelity and p over a parameter grid (TSV)
    Landscape(LandscapeArgs),
    /// Joint fit of two samples with shared and separate parameters
    Ttest(TtestArgs),
    /// Nonparametric two-sample fidelity test
    Twosample(TwosampleArgs),
    /// Optimal q and interval for k successes in n trials
    Binary(BinaryArgs),
    /// Concordance of a model with binned counts
    Binned(BinnedArgs),
    /// Concordance of a 2D elliptical model with a point set
    Gof2d(Gof2dArgs),
    /// Null moments and gamma coefficients (TSV)
    NullTable(NullTableArgs),
    /// Run a named Monte Carlo experiment
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Data file: one value per line, or CSV with a header
    #[arg(long, value_name = "FILE")]
    pub data: PathBuf,

    /// CSV column to read [default: first]
    #[arg(long, value_name = "NAME")]
    pub column: Option<String>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Family and fixed parameters, e.g. family=gauss or family=vonmises,beta=0
    #[arg(long, value_name = "SPEC")]
    pub model: String,

    /// Comma-separated free parameters, e.g. mu,sigma [default: all]
    #[arg(long, value_name = "NAMES")]
    pub fit: Option<String>,

    /// Search range override name=lo:hi[:points][:log], repeatable
    #[arg(long, value_name = "RANGE")]
    pub range: Vec<String>,

    /// Statistic to optimize
    #[arg(long, default_value = "fidelity")]
    pub statistic: String,

    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug, Args)]
pub struct GofArgs {
    /// Fully specified model, e.g. family=gauss,beta=0,alpha=1
    #[arg(long, value_name = "SPEC")]
    pub model: String,

    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug, Args)]
pub struct LandscapeArgs {
    /// Family and fixed parameters
    #[arg(long, value_name = "SPEC")]
    pub model: String,

    /// Grid axes name=lo:hi:points[:log], comma-separated
    #[arg(long, value_name = "AXES")]
    pub grid: String,

    /// Maximum number of grid cells
    #[arg(long, default_value_t = fidelity::estimation::DEFAULT_LANDSCAPE_CAP)]
    pub cap: usize,

    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug, Args)]
pub struct TtestArgs {
    /// Family and fixed parameters common to both samples
    #[arg(long, value_name = "SPEC")]
    pub model: String,

    /// First sample
    #[arg(long, value_name = "FILE")]
    pub a: PathBuf,

    /// Second sample
    #[arg(long, value_name = "FILE")]
    pub b: PathBuf,

    /// Comma-separated free parameters [default: all]
    #[arg(long, value_name = "NAMES")]
    pub fit: Option<String>,

    /// Comma-separated parameters shared by both samples [default: none]
    #[arg(long, value_name = "NAMES", default_value = "")]
    pub shared: String,
}

#[derive(Debug, Args)]
pub struct TwosampleArgs {
    /// First sample
    #[arg(long, value_name = "FILE")]
    pub a: PathBuf,

    /// Second sample
    #[arg(long, value_name = "FILE")]
    pub b: PathBuf,

    /// Monte Carlo replicates of the null distribution
    #[arg(long, default_value_t = 20_000)]
    pub null_replicates: usize,

    /// Master seed of the null simulation
    #[arg(long, required = true)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BinaryArgs {
    /// Number of trials
    #[arg(long)]
    pub n: u64,

    /// Number of successes
    #[arg(long)]
    pub k: u64,

    /// Interval level
    #[arg(long, default_value_t = 0.9)]
    pub level: f64,

    /// Interval construction: midpoint or exact
    #[arg(long, default_value = "midpoint")]
    pub mode: String,

    /// Evaluate the cumulative triple at this q [default: optimal q]
    #[arg(long)]
    pub q: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BinnedArgs {
    /// Fully specified line model
    #[arg(long, value_name = "SPEC")]
    pub model: String,

    /// CSV with rows edge_lo,edge_hi,count
    #[arg(long, value_name = "FILE")]
    pub data: PathBuf,

    /// Placements drawn to form the median fidelity
    #[arg(long, default_value_t = 999)]
    pub replicates: usize,

    /// Master seed of the placements
    #[arg(long, required = true)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct Gof2dArgs {
    /// e.g. gauss2d:x0=7,y0=3,a=3,b=2,phi=1.0472 or exp2d:...
    #[arg(long, value_name = "SPEC")]
    pub model: String,

    /// r-theta, model-xy or coordinate-xy
    #[arg(long, default_value = "r-theta")]
    pub method: String,

    /// CSV with columns x,y
    #[arg(long, value_name = "FILE")]
    pub data: PathBuf,
}

#[derive(Debug, Args)]
pub struct NullTableArgs {
    /// line or circle
    #[arg(long)]
    pub geometry: String,

    /// Single sample size
    #[arg(long, conflicts_with = "n_list")]
    pub n: Option<usize>,

    /// Sizes and ranges, e.g. 1-40,50,100
    #[arg(long, value_name = "LIST")]
    pub n_list: Option<String>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Experiment name, e.g. gauss_mean_sigma
    #[arg(long)]
    pub name: String,

    /// Master seed
    #[arg(long, required = true)]
    pub seed: u64,

    /// Realizations [default: per experiment]
    #[arg(long)]
    pub realizations: Option<usize>,

    /// Use 200 realizations
    #[arg(long, conflicts_with = "realizations")]
    pub quick: bool,

    /// Experiment override key=value, repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

/// Append `--key value` for each config-file entry whose flag is absent.
pub fn expand_config(mut argv: Vec<OsString>) -> Result<Vec<OsString>, Failure> {
    let strs: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let path = strs.iter().enumerate().find_map(|(i, a)| {
        a.strip_prefix("--config=").map(str::to_string).or_else(|| (a == "--config").then(|| strs.get(i + 1).cloned()).flatten())
    });
    let Some(path) = path else { return Ok(argv) };
    let text = std::fs::read_to_string(&path).map_err(|e| Failure::usage(format!("cannot read config {path}: {e}"), "--config"))?;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("config line {}: expected key=value", i + 1), "--config"))?;
        let flag = format!("--{}", k.trim().replace('_', "-"));
        let given = strs.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if given {
            continue;
        }
        let v = v.trim().trim_matches('"');
        argv.push(flag.into());
        if v != "true" {
            argv.push(v.into());
        }
    }
    Ok(argv)
}
