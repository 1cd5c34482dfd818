//! Scripted Monte Carlo studies: null distributions, estimator comparisons,
//! goodness-of-fit power, joint t-test analogues, two-sample power, binary
//! intervals and 2D calibration. Each run writes `summary.json` plus one TSV
//! per curve.

pub mod comparators;
mod runs;

pub use runs::{best_scale_gauss, LINE_GOF_COMPETITORS};
mod studies;

pub use studies::{
    derive_seed, gof_power, median, null_fidelity_draws, p_sup_distance, rejection_rate, rtheta_null_p_values,
    sigma_estimates, twosample_rates, SigmaEstimates,
};

use crate::error::{param, Result};
use crate::output::num;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentName {
    NullDist,
    EstimatorCircleLocation,
    EstimatorCircleShape,
    EstimatorLineLocation,
    EstimatorLineShape,
    GaussMeanSigma,
    GofCircle,
    GofLine,
    LandscapeDemo,
    TtestGauss,
    TtestExtreme,
    TwosamplePower,
    BinaryDemo,
    Gof2d,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 14] = [
        ExperimentName::NullDist,
        ExperimentName::EstimatorCircleLocation,
        ExperimentName::EstimatorCircleShape,
        ExperimentName::EstimatorLineLocation,
        ExperimentName::EstimatorLineShape,
        ExperimentName::GaussMeanSigma,
        ExperimentName::GofCircle,
        ExperimentName::GofLine,
        ExperimentName::LandscapeDemo,
        ExperimentName::TtestGauss,
        ExperimentName::TtestExtreme,
        ExperimentName::TwosamplePower,
        ExperimentName::BinaryDemo,
        ExperimentName::Gof2d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentName::NullDist => "null_dist",
            ExperimentName::EstimatorCircleLocation => "estimator_circle_location",
            ExperimentName::EstimatorCircleShape => "estimator_circle_shape",
            ExperimentName::EstimatorLineLocation => "estimator_line_location",
            ExperimentName::EstimatorLineShape => "estimator_line_shape",
            ExperimentName::GaussMeanSigma => "gauss_mean_sigma",
            ExperimentName::GofCircle => "gof_circle",
            ExperimentName::GofLine => "gof_line",
            ExperimentName::LandscapeDemo => "landscape_demo",
            ExperimentName::TtestGauss => "ttest_gauss",
            ExperimentName::TtestExtreme => "ttest_extreme",
            ExperimentName::TwosamplePower => "twosample_power",
            ExperimentName::BinaryDemo => "binary_demo",
            ExperimentName::Gof2d => "gof2d",
        }
    }

    pub fn parse(s: &str) -> Result<ExperimentName> {
        let key = s.trim().to_lowercase().replace('-', "_");
        ExperimentName::ALL
            .into_iter()
            .find(|e| e.name() == key)
            .ok_or_else(|| param(format!("unknown experiment '{s}'")))
    }

    /// What the run reproduces.
    pub fn anchor(self) -> &'static str {
        match self {
            ExperimentName::NullDist => "null distribution of the fidelity against its gamma approximation",
            ExperimentName::EstimatorCircleLocation => "location estimates on the circle, n=5, all circle statistics",
            ExperimentName::EstimatorCircleShape => "shape estimates on the circle, n=5, all circle statistics",
            ExperimentName::EstimatorLineLocation => "location estimates on the line, n=5, all line statistics",
            ExperimentName::EstimatorLineShape => "shape estimates on the line, n=5, all line statistics",
            ExperimentName::GaussMeanSigma => "Gaussian sigma estimates from joint (mu, sigma) fits, n=5",
            ExperimentName::GofCircle => "goodness of fit against the uniform circle, n=10",
            ExperimentName::GofLine => "goodness of fit against Gauss(0, 1), n=10",
            ExperimentName::LandscapeDemo => "concordance landscape over (mu, sigma) for n=20 Gaussian data",
            ExperimentName::TtestGauss => "joint fits of two Gaussian datasets under four sharing assumptions",
            ExperimentName::TtestExtreme => "joint fits of two extreme value datasets under four sharing assumptions",
            ExperimentName::TwosamplePower => "two-sample power of fidelity, t, Mann-Whitney and KS tests",
            ExperimentName::BinaryDemo => "binomial cumulative values, optimal q and intervals",
            ExperimentName::Gof2d => "r-theta concordance calibration and 2D exponential vs Gaussian",
        }
    }

    /// Realizations used when none are requested.
    pub fn default_realizations(self) -> usize {
        match self {
            ExperimentName::NullDist => 100_000,
            ExperimentName::Gof2d => 10_000,
            _ => 1000,
        }
    }
}

pub const QUICK_REALIZATIONS: usize = 200;
pub const MIN_REALIZATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: ExperimentName,
    pub seed: u64,
    pub realizations: usize,
    pub overrides: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn new(name: ExperimentName, seed: u64) -> ExperimentConfig {
        ExperimentConfig { name, seed, realizations: name.default_realizations(), overrides: BTreeMap::new() }
    }

    pub fn quick(mut self) -> ExperimentConfig {
        self.realizations = QUICK_REALIZATIONS;
        self
    }

    pub fn with_realizations(mut self, r: usize) -> ExperimentConfig {
        self.realizations = r;
        self
    }

    pub fn with_override(mut self, key: &str, value: &str) -> ExperimentConfig {
        self.overrides.insert(key.to_string(), value.to_string());
        self
    }
}

/// Comparison applied to a metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    AtMost,
    AtLeast,
    Below,
    Above,
}

impl Bound {
    pub fn symbol(self) -> &'static str {
        match self {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
            Bound::Below => "<",
            Bound::Above => ">",
        }
    }

    fn holds(self, v: f64, t: f64) -> bool {
        match self {
            Bound::AtMost => v <= t,
            Bound::AtLeast => v >= t,
            Bound::Below => v < t,
            Bound::Above => v > t,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
    pub threshold: f64,
    pub pass: bool,
}

impl Metric {
    pub fn new(name: impl Into<String>, value: f64, bound: Bound, threshold: f64) -> Metric {
        Metric { name: name.into(), value, bound, threshold, pass: bound.holds(value, threshold) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub experiment: ExperimentName,
    pub seed: u64,
    pub realizations: usize,
    pub metrics: Vec<Metric>,
    pub files: Vec<String>,
    pub details: Value,
}

impl Summary {
    pub fn pass(&self) -> bool {
        self.metrics.iter().all(|m| m.pass)
    }

    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": "fidelity/1",
            "experiment": self.experiment.name(),
            "anchor": self.experiment.anchor(),
            "seed": self.seed,
            "realizations": self.realizations,
            "pass": self.pass(),
            "metrics": self.metrics.iter().map(|m| json!({
                "name": m.name,
                "value": num(m.value),
                "bound": m.bound.symbol(),
                "threshold": num(m.threshold),
                "pass": m.pass,
            })).collect::<Vec<_>>(),
            "files": self.files,
            "details": self.details,
        })
    }
}

/// Validated access to `key=value` overrides.
pub(crate) struct Overrides<'a> {
    map: &'a BTreeMap<String, String>,
}

impl<'a> Overrides<'a> {
    fn new(map: &'a BTreeMap<String, String>, allowed: &[&str]) -> Result<Overrides<'a>> {
        if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(param(format!("unknown override '{k}'; allowed: {}", allowed.join(", "))));
        }
        Ok(Overrides { map })
    }

    pub(crate) fn usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v.trim().parse().map_err(|_| param(format!("override {key}: '{v}' is not a count"))),
        }
    }

    pub(crate) fn str(&self, key: &str, default: &'a str) -> &'a str {
        self.map.get(key).map(|s| s.as_str()).unwrap_or(default)
    }
}

/// Output directory plus the list of files written to it.
pub(crate) struct Out {
    dir: PathBuf,
    files: Vec<String>,
}

impl Out {
    fn new(dir: &Path) -> Result<Out> {
        std::fs::create_dir_all(dir)?;
        Ok(Out { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub(crate) fn tsv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        crate::output::write_tsv(&self.dir.join(name), header, rows)?;
        self.files.push(name.to_string());
        Ok(())
    }
}

/// Run an experiment, writing its files into `out_dir`.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<Summary> {
    if config.realizations < MIN_REALIZATIONS {
        return Err(param(format!("at least {MIN_REALIZATIONS} realizations are required")));
    }
    let mut out = Out::new(out_dir)?;
    let (metrics, details) = runs::dispatch(config, &mut out)?;
    let summary = Summary {
        experiment: config.name,
        seed: config.seed,
        realizations: config.realizations,
        metrics,
        files: out.files.clone(),
        details,
    };
    let mut files = summary.files.clone();
    files.push("summary.json".into());
    let summary = Summary { files, ..summary };
    let text = serde_json::to_string_pretty(&summary.to_json()).expect("json serialization");
    std::fs::write(out_dir.join("summary.json"), text + "\n")?;
    Ok(summary)
}
