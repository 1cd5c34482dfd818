//! Fidelity of binned samples on the line.

use crate::distributions::{GeometryKind, ModelDistribution};
use crate::error::{domain, Result, Warning};
use crate::fidelity::{fidelity_line, null_approx, p_value, Composition, FidelityReport};
use rand::Rng as _;
use rayon::prelude::*;

/// Counts over contiguous bins `[edges[i], edges[i+1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedSample {
    edges: Vec<f64>,
    counts: Vec<u64>,
}

impl BinnedSample {
    pub fn new(edges: Vec<f64>, counts: Vec<u64>) -> Result<BinnedSample> {
        if edges.len() != counts.len() + 1 || counts.is_empty() {
            return Err(domain(format!("{} edges do not bound {} bins", edges.len(), counts.len())));
        }
        if edges.iter().any(|e| e.is_nan()) || edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(domain("bin edges must be strictly increasing"));
        }
        if counts.iter().sum::<u64>() == 0 {
            return Err(domain("binned sample has no counts"));
        }
        Ok(BinnedSample { edges, counts })
    }

    /// From `(lo, hi, count)` rows that must be contiguous.
    pub fn from_rows(rows: &[(f64, f64, u64)]) -> Result<BinnedSample> {
        if rows.is_empty() {
            return Err(domain("no bins"));
        }
        let mut edges = vec![rows[0].0];
        for (i, r) in rows.iter().enumerate() {
            if i > 0 && r.0 != rows[i - 1].1 {
                return Err(domain(format!("bin {i} does not start where bin {} ends", i - 1)));
            }
            edges.push(r.1);
        }
        BinnedSample::new(edges, rows.iter().map(|r| r.2).collect())
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum::<u64>() as usize
    }
}

struct Occupied {
    lo: f64,
    hi: f64,
    count: usize,
}

fn occupied_bins(model: &ModelDistribution, data: &BinnedSample) -> Result<(Vec<Occupied>, Vec<Warning>)> {
    if model.geometry().kind() != GeometryKind::Line {
        return Err(crate::Error::Geometry("binned data requires a model on the line".into()));
    }
    let mut bins = Vec::new();
    let mut warnings = Vec::new();
    for (i, &count) in data.counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let lo = model.cdf_clamped(data.edges[i])?;
        let hi = model.cdf_clamped(data.edges[i + 1])?;
        if !(hi > lo) {
            warnings.push(Warning::EmptyMass { bin: i });
        }
        bins.push(Occupied { lo, hi, count: count as usize });
    }
    Ok((bins, warnings))
}

/// Fidelity with each bin's points spread evenly over the bin's cumulative
/// range.
pub fn binned_fidelity_estimate(model: &ModelDistribution, data: &BinnedSample) -> Result<f64> {
    let (bins, warnings) = occupied_bins(model, data)?;
    if !warnings.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }
    let mut c = Vec::with_capacity(data.total());
    for b in &bins {
        let p = b.count as f64;
        for i in 0..b.count {
            c.push(b.lo + ((i as f64 + 0.5) / p) * (b.hi - b.lo));
        }
    }
    Ok(fidelity_line(&c))
}

/// Median fidelity over `replicates` draws that place each bin's points
/// uniformly within its cumulative range. The median is the lower middle
/// order statistic (the 500th of 999).
pub fn binned_fidelity_median(
    model: &ModelDistribution,
    data: &BinnedSample,
    replicates: usize,
    seed: u64,
) -> Result<FidelityReport> {
    if replicates == 0 {
        return Err(domain("at least one replicate is required"));
    }
    let (bins, warnings) = occupied_bins(model, data)?;
    let n = data.total();
    let composition = Composition::Single { n, geometry: GeometryKind::Line };
    if !warnings.is_empty() {
        return Ok(FidelityReport { f: f64::NEG_INFINITY, p: 0.0, composition, warnings });
    }
    let mut fs: Vec<f64> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = crate::rng::stream(seed, r);
            let mut c = Vec::with_capacity(n);
            for b in &bins {
                for _ in 0..b.count {
                    c.push(b.lo + rng.random::<f64>() * (b.hi - b.lo));
                }
            }
            c.sort_by(f64::total_cmp);
            fidelity_line(&c)
        })
        .collect();
    fs.sort_by(f64::total_cmp);
    let f = fs[(replicates - 1) / 2];
    let p = p_value(f, &null_approx(n, GeometryKind::Line)?)?;
    Ok(FidelityReport { f, p, composition, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{Family, Params};

    fn uniform() -> ModelDistribution {
        ModelDistribution::uniform_line(0.0, 1.0).unwrap()
    }

    #[test]
    fn even_placement_examples() {
        let one = BinnedSample::new(vec![0.0, 1.0], vec![5]).unwrap();
        assert!(binned_fidelity_estimate(&uniform(), &one).unwrap().abs() < 1e-15);
        let two = BinnedSample::new(vec![0.0, 0.5, 1.0], vec![1, 1]).unwrap();
        assert!(binned_fidelity_estimate(&uniform(), &two).unwrap().abs() < 1e-15);
        let left = BinnedSample::new(vec![0.0, 0.5, 1.0], vec![2, 0]).unwrap();
        let f = binned_fidelity_estimate(&uniform(), &left).unwrap();
        assert!((f - (-0.290_787_702_451_42)).abs() < 1e-13);
    }

    #[test]
    fn zero_mass_bin() {
        let data = BinnedSample::new(vec![2.0, 3.0], vec![1]).unwrap();
        assert_eq!(binned_fidelity_estimate(&uniform(), &data).unwrap(), f64::NEG_INFINITY);
        let r = binned_fidelity_median(&uniform(), &data, 11, 1).unwrap();
        assert_eq!((r.f, r.p), (f64::NEG_INFINITY, 0.0));
        assert_eq!(r.warnings, vec![Warning::EmptyMass { bin: 0 }]);
    }

    #[test]
    fn median_is_deterministic_and_below_estimate() {
        let g = ModelDistribution::new(Family::Gauss, &Params::new()).unwrap();
        let edges: Vec<f64> = (0..=8).map(|i| -2.0 + 0.5 * i as f64).collect();
        let data = BinnedSample::new(edges, vec![1, 3, 6, 9, 8, 6, 2, 1]).unwrap();
        let a = binned_fidelity_median(&g, &data, 999, 42).unwrap();
        let b = binned_fidelity_median(&g, &data, 999, 42).unwrap();
        assert_eq!(a, b);
        assert!(binned_fidelity_estimate(&g, &data).unwrap() >= a.f);
        assert!(a.p > 0.0 && a.p <= 1.0);
    }

    #[test]
    fn rejects_bad_bins() {
        assert!(BinnedSample::new(vec![0.0, 0.0], vec![1]).is_err());
        assert!(BinnedSample::new(vec![0.0, 1.0], vec![0]).is_err());
        assert!(BinnedSample::from_rows(&[(0.0, 1.0, 1), (1.5, 2.0, 1)]).is_err());
        assert_eq!(BinnedSample::from_rows(&[(0.0, 1.0, 1), (1.0, 2.0, 3)]).unwrap().total(), 4);
    }
}
