//! Nonparametric two-sample fidelity test with a Monte Carlo null.

use crate::distributions::{GeometryKind, Sample};
use crate::error::{domain, Error, Result, Warning};
use crate::fidelity::fidelity_line;
use rand::Rng as _;
use rayon::prelude::*;
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// Directional fidelities and their average.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSampleResult {
    pub f1: f64,
    pub f2: f64,
    pub f: f64,
    pub n1: usize,
    pub n2: usize,
    pub p: Option<f64>,
    pub warnings: Vec<Warning>,
}

// Fidelity of sorted `a` placed within the bins defined by sorted `b`.
// Reference point j of `b` sits at (j − 1/2)/nb; an `a` point equal to a
// `b` point is counted on its left.
fn directional(a: &[f64], b: &[f64]) -> f64 {
    let nb = b.len() as f64;
    let mut c = Vec::with_capacity(a.len());
    let mut i = 0;
    let mut k = 0usize;
    while i < a.len() {
        while k < b.len() && b[k] < a[i] {
            k += 1;
        }
        let mut j = i;
        while j < a.len() && (k == b.len() || a[j] <= b[k]) {
            j += 1;
        }
        let lo = if k == 0 { 0.0 } else { (k as f64 - 0.5) / nb };
        let hi = if k == b.len() { 1.0 } else { (k as f64 + 0.5) / nb };
        let p = (j - i) as f64;
        for m in 0..(j - i) {
            c.push(lo + ((m as f64 + 0.5) / p) * (hi - lo));
        }
        i = j;
    }
    fidelity_line(&c)
}

fn check_line(s: &Sample) -> Result<()> {
    if s.geometry().kind() != GeometryKind::Line {
        return Err(Error::Geometry("the two-sample test is defined on the line".into()));
    }
    Ok(())
}

/// Fidelity of each sample relative to the other, without a p value.
pub fn twosample_fidelity(s1: &Sample, s2: &Sample) -> Result<TwoSampleResult> {
    check_line(s1)?;
    check_line(s2)?;
    let (a, b) = (s1.values(), s2.values());
    let mut warnings = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            if warnings.last() != Some(&Warning::CrossSampleTie { value: a[i] }) {
                warnings.push(Warning::CrossSampleTie { value: a[i] });
            }
            i += 1;
        } else if a[i] < b[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    let f1 = directional(a, b);
    let f2 = directional(b, a);
    Ok(TwoSampleResult { f1, f2, f: 0.5 * (f1 + f2), n1: a.len(), n2: b.len(), p: None, warnings })
}

/// Sorted null draws of the two-sample fidelity for sizes `(n1, n2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalNull {
    pub n1: usize,
    pub n2: usize,
    pub seed: u64,
    sorted_f: Vec<f64>,
}

impl EmpiricalNull {
    pub fn sorted_f(&self) -> &[f64] {
        &self.sorted_f
    }

    pub fn replicates(&self) -> usize {
        self.sorted_f.len()
    }
}

pub const MIN_NULL_REPLICATES: usize = 1000;

/// Null distribution from `replicates` pairs of uniform samples.
pub fn build_null(n1: usize, n2: usize, replicates: usize, seed: u64) -> Result<EmpiricalNull> {
    if n1 == 0 || n2 == 0 {
        return Err(domain("sample sizes must be positive"));
    }
    if replicates < MIN_NULL_REPLICATES {
        return Err(domain(format!("at least {MIN_NULL_REPLICATES} null replicates are required")));
    }
    let mut sorted_f: Vec<f64> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = crate::rng::stream(seed, r);
            let mut a: Vec<f64> = (0..n1).map(|_| rng.random::<f64>()).collect();
            let mut b: Vec<f64> = (0..n2).map(|_| rng.random::<f64>()).collect();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            0.5 * (directional(&a, &b) + directional(&b, &a))
        })
        .collect();
    sorted_f.sort_by(f64::total_cmp);
    Ok(EmpiricalNull { n1, n2, seed, sorted_f })
}

/// Left-tail p value with add-one smoothing.
pub fn twosample_p(result: &TwoSampleResult, null: &EmpiricalNull) -> Result<f64> {
    if (result.n1, result.n2) != (null.n1, null.n2) {
        return Err(Error::Dimension(format!(
            "null built for ({}, {}) but samples have sizes ({}, {})",
            null.n1, null.n2, result.n1, result.n2
        )));
    }
    let below = null.sorted_f.partition_point(|&v| v <= result.f);
    Ok(((1 + below) as f64 / (null.replicates() + 1) as f64).min(1.0))
}

/// Test both samples against each other with a fresh or cached null.
pub fn twosample_test(s1: &Sample, s2: &Sample, replicates: usize, seed: u64) -> Result<TwoSampleResult> {
    let mut r = twosample_fidelity(s1, s2)?;
    let null = cached_null(s1.len(), s2.len(), replicates, seed)?;
    r.p = Some(twosample_p(&r, &null)?);
    Ok(r)
}

const CACHE_VERSION: &str = "fidelity-twosample-null v1";

/// Cache directory from `FIDELITY_CACHE_DIR`, if set.
pub fn cache_dir() -> Option<PathBuf> {
    std::env::var_os("FIDELITY_CACHE_DIR").filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn cache_file(dir: &Path, n1: usize, n2: usize, replicates: usize, seed: u64) -> PathBuf {
    dir.join(format!("twosample-null-v1-{n1}-{n2}-{replicates}-{seed}.tsv"))
}

/// Load the null from `FIDELITY_CACHE_DIR` or build (and store) it.
pub fn cached_null(n1: usize, n2: usize, replicates: usize, seed: u64) -> Result<EmpiricalNull> {
    match cache_dir() {
        Some(dir) => cached_null_in(&dir, n1, n2, replicates, seed),
        None => build_null(n1, n2, replicates, seed),
    }
}

/// As [`cached_null`] with an explicit directory. Unreadable or mismatched
/// cache files are rebuilt.
pub fn cached_null_in(dir: &Path, n1: usize, n2: usize, replicates: usize, seed: u64) -> Result<EmpiricalNull> {
    let path = cache_file(dir, n1, n2, replicates, seed);
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Some(null) = parse_cache(&text, n1, n2, replicates, seed) {
            return Ok(null);
        }
    }
    let null = build_null(n1, n2, replicates, seed)?;
    std::fs::create_dir_all(dir)?;
    let tmp = tempfile_path(&path);
    {
        let mut w = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
        writeln!(w, "# {CACHE_VERSION}")?;
        writeln!(w, "# n1\tn2\treplicates\tseed")?;
        writeln!(w, "# {n1}\t{n2}\t{replicates}\t{seed}")?;
        for v in &null.sorted_f {
            writeln!(w, "{v:?}")?;
        }
        w.flush()?;
    }
    std::fs::rename(&tmp, &path)?;
    Ok(null)
}

fn tempfile_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(format!(".tmp{}", std::process::id()));
    path.with_file_name(name)
}

fn parse_cache(text: &str, n1: usize, n2: usize, replicates: usize, seed: u64) -> Option<EmpiricalNull> {
    let mut lines = text.lines();
    if lines.next()? != format!("# {CACHE_VERSION}") {
        return None;
    }
    lines.next()?;
    let header: Vec<&str> = lines.next()?.trim_start_matches("# ").split('\t').collect();
    if header != [n1.to_string(), n2.to_string(), replicates.to_string(), seed.to_string()] {
        return None;
    }
    let sorted_f: Vec<f64> = lines.map(|l| l.trim().parse::<f64>().ok()).collect::<Option<_>>()?;
    if sorted_f.len() != replicates || sorted_f.windows(2).any(|w| w[0] > w[1]) {
        return None;
    }
    Some(EmpiricalNull { n1, n2, seed, sorted_f })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_pattern() {
        let s1 = Sample::line(vec![0.0, 1.0]).unwrap();
        let s2 = Sample::line(vec![2.0]).unwrap();
        let r = twosample_fidelity(&s1, &s2).unwrap();
        assert!((r.f1 - (-0.290_787_702_451_42)).abs() < 1e-13);
        assert!((r.f2 - (-0.413_339_286_592_23)).abs() < 1e-13);
        assert_eq!(r.f, 0.5 * (r.f1 + r.f2));
    }

    #[test]
    fn ties_go_left_with_warning() {
        let s1 = Sample::line(vec![1.0, 3.0]).unwrap();
        let s2 = Sample::line(vec![1.0, 2.0]).unwrap();
        let r = twosample_fidelity(&s1, &s2).unwrap();
        assert_eq!(r.warnings, vec![Warning::CrossSampleTie { value: 1.0 }]);
        let left = twosample_fidelity(&Sample::line(vec![0.5, 3.0]).unwrap(), &s2).unwrap();
        assert_eq!(r.f1, left.f1);
    }

    #[test]
    fn p_boundaries() {
        let null = build_null(3, 4, 1000, 5).unwrap();
        assert!(null.sorted_f().iter().all(|&v| v <= 0.0));
        let mut r = twosample_fidelity(&Sample::line(vec![1.0, 2.0, 3.0]).unwrap(),
                                       &Sample::line(vec![4.0, 5.0, 6.0, 7.0]).unwrap()).unwrap();
        r.f = f64::NEG_INFINITY;
        assert_eq!(twosample_p(&r, &null).unwrap(), 1.0 / 1001.0);
        r.f = 0.0;
        assert_eq!(twosample_p(&r, &null).unwrap(), 1.0);
        r.n1 = 9;
        assert!(twosample_p(&r, &null).is_err());
        assert!(build_null(3, 4, 999, 5).is_err());
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let a = cached_null_in(dir.path(), 4, 3, 1000, 9).unwrap();
        let b = cached_null_in(dir.path(), 4, 3, 1000, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, build_null(4, 3, 1000, 9).unwrap());
        let file = cache_file(dir.path(), 4, 3, 1000, 9);
        assert!(std::fs::read_to_string(file).unwrap().starts_with("# fidelity-twosample-null v1"));
    }
}
