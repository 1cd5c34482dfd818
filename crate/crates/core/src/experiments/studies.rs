//! Monte Carlo building blocks shared by the experiment runs.

use super::comparators::{ks_test, mann_whitney, t_test, StatisticNull};
use crate::distributions::{cumulative_map, Family, GeometryKind, ModelDistribution, Params, Sample};
use crate::error::Result;
use crate::estimation::{cumulative_statistic, fit, Axis, FamilySpec, ParamBox, SearchOptions, StatisticId};
use crate::fidelity::{fidelity, null_approx, p_value};
use crate::multidim::{concordance_2d, Elliptical2D, TransformMethod};
use crate::twosample::{cached_null, twosample_fidelity, twosample_p};
use rand::Rng as _;
use rayon::prelude::*;

/// Independent master seed for sub-study `tag`.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Largest distance between the empirical cdf of `p` and the uniform cdf.
pub fn p_sup_distance(p: &[f64]) -> f64 {
    let mut v = p.to_vec();
    v.sort_by(f64::total_cmp);
    let r = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / r).max((i + 1) as f64 / r - x))
        .fold(0.0, f64::max)
}

/// Fraction of p values below `level`.
pub fn rejection_rate(p: &[f64], level: f64) -> f64 {
    p.iter().filter(|&&x| x < level).count() as f64 / p.len() as f64
}

/// Lower median.
pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s[(s.len() - 1) / 2]
}

/// Fidelity of `realizations` sets of `n` uniform points.
pub fn null_fidelity_draws(n: usize, kind: GeometryKind, realizations: usize, seed: u64) -> Vec<f64> {
    (0..realizations as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = crate::rng::stream(seed, r);
            let mut c: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            c.sort_by(f64::total_cmp);
            fidelity(&c, kind)
        })
        .collect()
}

/// Rejection rates at p < 0.05 for data drawn from `alternative` and tested
/// against `hypothesis`: the fidelity through its gamma approximation, each
/// competitor through a Monte Carlo null of `null_replicates` draws.
pub fn gof_power(
    hypothesis: &ModelDistribution,
    alternative: &ModelDistribution,
    n: usize,
    realizations: usize,
    competitors: &[StatisticId],
    null_replicates: usize,
    seed: u64,
) -> Result<Vec<(String, f64)>> {
    let kind = hypothesis.geometry().kind();
    let nulls = competitors
        .iter()
        .enumerate()
        .map(|(k, &id)| StatisticNull::build(id, n, kind, null_replicates, derive_seed(seed, 1000 + k as u64)))
        .collect::<Result<Vec<_>>>()?;
    let approx = null_approx(n, kind)?;
    let data_seed = derive_seed(seed, 1);
    let rows = (0..realizations as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = crate::rng::stream(data_seed, r);
            let s = alternative.sample(n, &mut rng)?;
            let c = cumulative_map(hypothesis, &s)?;
            let mut ps = vec![p_value(fidelity(c.values(), kind), &approx)?];
            for null in &nulls {
                ps.push(null.p_value(cumulative_statistic(null.id, c.values(), kind)?));
            }
            Ok(ps)
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let mut out = vec![("fidelity".to_string(), rate_of(&rows, 0))];
    for (k, id) in competitors.iter().enumerate() {
        out.push((id.name().to_string(), rate_of(&rows, k + 1)));
    }
    Ok(out)
}

fn rate_of(rows: &[Vec<f64>], k: usize) -> f64 {
    rows.iter().filter(|r| r[k] < 0.05).count() as f64 / rows.len() as f64
}

/// Per-realization σ estimates from joint (μ, σ) fits to `n` standard
/// normal points.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaEstimates {
    pub fidelity: Vec<f64>,
    pub likelihood: Vec<f64>,
    pub spacings: Vec<f64>,
    pub sd: Vec<f64>,
}

pub fn sigma_estimates(n: usize, realizations: usize, seed: u64) -> Result<SigmaEstimates> {
    let truth = ModelDistribution::new(Family::Gauss, &Params::new())?;
    let opts = SearchOptions::default();
    let rows = (0..realizations as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = crate::rng::stream(seed, r);
            let s = truth.sample(n, &mut rng)?;
            let spec = FamilySpec::with_default_box(Family::Gauss, Params::new(), &["mu", "sigma"], &s)?;
            let mut out = Vec::with_capacity(4);
            for id in [StatisticId::Fidelity, StatisticId::Likelihood, StatisticId::Spacings] {
                out.push(fit(id, &spec, &s, &opts)?.params.get("alpha").unwrap_or(f64::NAN));
            }
            let m = s.values().iter().sum::<f64>() / n as f64;
            let ss: f64 = s.values().iter().map(|x| (x - m) * (x - m)).sum();
            out.push((ss / (n as f64 - 1.0)).sqrt());
            Ok(out)
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<f64>>();
    Ok(SigmaEstimates { fidelity: col(0), likelihood: col(1), spacings: col(2), sd: col(3) })
}

/// Rejection rates at p < 0.05 of the fidelity two-sample test and the three
/// comparators on identical data.
pub fn twosample_rates(
    a: &ModelDistribution,
    n1: usize,
    b: &ModelDistribution,
    n2: usize,
    realizations: usize,
    null_replicates: usize,
    seed: u64,
) -> Result<Vec<(String, f64)>> {
    let null = cached_null(n1, n2, null_replicates, derive_seed(seed, 77))?;
    let data_seed = derive_seed(seed, 2);
    let rows = (0..realizations as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = crate::rng::stream(data_seed, r);
            let s1 = a.sample(n1, &mut rng)?;
            let s2 = b.sample(n2, &mut rng)?;
            let res = twosample_fidelity(&s1, &s2)?;
            Ok(vec![
                twosample_p(&res, &null)?,
                t_test(s1.values(), s2.values())?,
                mann_whitney(s1.values(), s2.values())?,
                ks_test(s1.values(), s2.values())?,
            ])
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(["fidelity", "t-test", "mann-whitney", "kolmogorov-smirnov"]
        .iter()
        .enumerate()
        .map(|(k, name)| (name.to_string(), rate_of(&rows, k)))
        .collect())
}

/// r-θ concordance p values for data simulated from `model` itself.
pub fn rtheta_null_p_values(model: &Elliptical2D, n: usize, realizations: usize, seed: u64) -> Result<Vec<f64>> {
    (0..realizations as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = crate::rng::stream(seed, r);
            let pts = model.sample(n, &mut rng)?;
            Ok(concordance_2d(model, &pts, TransformMethod::RTheta)?.p)
        })
        .collect()
}

/// Fidelity-fitted parameter of a one-parameter study.
pub(crate) fn fit_one(
    id: StatisticId,
    family: Family,
    fixed: &Params,
    axis: &Axis,
    sample: &Sample,
    opts: &SearchOptions,
) -> Result<f64> {
    let spec = FamilySpec::new(family, fixed.clone(), ParamBox::new(vec![axis.clone()])?)?;
    Ok(fit(id, &spec, sample, opts)?.params.get(&axis.name).unwrap_or(f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sup_distance_of_grid() {
        let p: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        assert!((p_sup_distance(&p) - 0.005).abs() < 1e-12);
        assert_eq!(rejection_rate(&[0.01, 0.2, 0.04, 0.5], 0.05), 0.5);
        assert_eq!(median(&[3.0, 1.0, 2.0, 4.0]), 2.0);
    }

    #[test]
    fn seeds_differ() {
        assert_ne!(derive_seed(1, 1), derive_seed(1, 2));
        assert_ne!(derive_seed(1, 1), derive_seed(2, 1));
    }
}
