//! Reference two-sample tests and Monte Carlo nulls for goodness-of-fit
//! statistics.

use crate::distributions::GeometryKind;
use crate::error::{domain, Result};
use crate::estimation::{cumulative_statistic, Sense, StatisticId};
use crate::special::{erfc, ln_choose, regularized_beta};
use rand::Rng as _;
use rayon::prelude::*;
use std::f64::consts::SQRT_2;

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let ss = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>();
    (m, ss)
}

/// Two-sided Student t test with pooled variance.
pub fn t_test(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() + b.len() < 3 || a.is_empty() || b.is_empty() {
        return Err(domain("t test needs at least three points in two nonempty samples"));
    }
    let (ma, ssa) = mean_var(a);
    let (mb, ssb) = mean_var(b);
    let df = (a.len() + b.len() - 2) as f64;
    let sp2 = (ssa + ssb) / df;
    let se = (sp2 * (1.0 / a.len() as f64 + 1.0 / b.len() as f64)).sqrt();
    if se == 0.0 {
        return Ok(if ma == mb { 1.0 } else { 0.0 });
    }
    let t = (ma - mb) / se;
    regularized_beta(0.5 * df, 0.5, df / (df + t * t))
}

/// Two-sided Wilcoxon–Mann–Whitney test, normal approximation with tie
/// correction and no continuity correction.
pub fn mann_whitney(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(domain("Mann-Whitney test needs two nonempty samples"));
    }
    let mut all: Vec<(f64, bool)> = a.iter().map(|&v| (v, true)).chain(b.iter().map(|&v| (v, false))).collect();
    all.sort_by(|x, y| x.0.total_cmp(&y.0));
    let n = all.len() as f64;
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let mut rank_sum = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        let mid = 0.5 * ((i + 1) + j) as f64;
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        rank_sum += mid * all[i..j].iter().filter(|x| x.1).count() as f64;
        i = j;
    }
    let u = rank_sum - n1 * (n1 + 1.0) / 2.0;
    let var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var <= 0.0 {
        return Ok(1.0);
    }
    let z = (u - n1 * n2 / 2.0) / var.sqrt();
    Ok(erfc(z.abs() / SQRT_2).min(1.0))
}

/// Largest gap between the two empirical cdfs.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as i64, b.len() as i64);
    (ks_integer(a, b) as f64) / (na * nb) as f64
}

// D · n1 · n2 as an integer, for sorted inputs.
fn ks_integer(a: &[f64], b: &[f64]) -> i64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as i64, b.len() as i64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0i64;
    while i < a.len() || j < b.len() {
        let v = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] == v {
            i += 1;
        }
        while j < b.len() && b[j] == v {
            j += 1;
        }
        d = d.max((i as i64 * nb - j as i64 * na).abs());
    }
    d
}

/// Two-sample Kolmogorov–Smirnov test: exact lattice-path null when
/// `n1·n2 ≤ 400`, the asymptotic Kolmogorov distribution otherwise.
pub fn ks_test(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(domain("KS test needs two nonempty samples"));
    }
    let (na, nb) = (a.len(), b.len());
    let d_int = ks_integer(a, b);
    if na * nb <= 400 {
        return Ok(ks_exact_p(na, nb, d_int));
    }
    let d = d_int as f64 / (na * nb) as f64;
    let ne = (na * nb) as f64 / (na + nb) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    Ok(kolmogorov_q(lambda))
}

// P(D·n1·n2 ≥ d) under the null, counting monotone paths that stay
// strictly inside the band.
fn ks_exact_p(na: usize, nb: usize, d: i64) -> f64 {
    let inside = |i: usize, j: usize| ((i * nb) as i64 - (j * na) as i64).abs() < d;
    let mut row = vec![0.0f64; nb + 1];
    for i in 0..=na {
        for j in 0..=nb {
            row[j] = if !inside(i, j) {
                0.0
            } else if i == 0 && j == 0 {
                1.0
            } else {
                let up = if i > 0 { row[j] } else { 0.0 };
                let left = if j > 0 { row[j - 1] } else { 0.0 };
                up + left
            };
        }
    }
    let total = ln_choose((na + nb) as f64, na as f64).exp();
    (1.0 - row[nb] / total).clamp(0.0, 1.0)
}

fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = 2.0 * (-2.0 * kf * kf * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    s.clamp(0.0, 1.0)
}

/// Null distribution of a cumulative statistic for `n` sorted uniforms.
#[derive(Debug, Clone)]
pub struct StatisticNull {
    pub id: StatisticId,
    pub n: usize,
    pub kind: GeometryKind,
    sorted: Vec<f64>,
}

impl StatisticNull {
    pub fn build(id: StatisticId, n: usize, kind: GeometryKind, replicates: usize, seed: u64) -> Result<StatisticNull> {
        if replicates == 0 || n == 0 {
            return Err(domain("null needs positive size and replicate count"));
        }
        let mut sorted = (0..replicates as u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = crate::rng::stream(seed, r);
                let mut c: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
                c.sort_by(f64::total_cmp);
                cumulative_statistic(id, &c, kind)
            })
            .collect::<Result<Vec<f64>>>()?;
        sorted.sort_by(f64::total_cmp);
        Ok(StatisticNull { id, n, kind, sorted })
    }

    /// Fraction (add-one smoothed) of null draws at least as discordant as
    /// `value`.
    pub fn p_value(&self, value: f64) -> f64 {
        let r = self.sorted.len();
        let worse = match self.id.sense() {
            Sense::Maximize => self.sorted.partition_point(|&v| v <= value),
            Sense::Minimize => r - self.sorted.partition_point(|&v| v < value),
        };
        ((1 + worse) as f64 / (r + 1) as f64).min(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_test_value() {
        let p = t_test(&[1.0, 2.0, 3.0, 4.0], &[2.5, 3.5, 4.5, 5.5, 6.5]).unwrap();
        assert!((p - 0.081_106_869_747_385_7).abs() < 1e-10, "{p}");
    }

    #[test]
    fn mann_whitney_value() {
        let p = mann_whitney(&[1.0, 2.0, 3.0, 4.0], &[2.5, 3.5, 4.5, 5.5, 6.5]).unwrap();
        assert!((p - 0.086_410_732_973_7).abs() < 1e-10, "{p}");
        let q = mann_whitney(&[1.0, 2.0, 2.0], &[2.0, 3.0]).unwrap();
        assert!(q > 0.0 && q <= 1.0);
    }

    #[test]
    fn ks_values() {
        let a = [0.1, 0.2, 0.3, 0.4];
        let b = [0.35, 0.5, 0.6];
        assert!((ks_statistic(&a, &b) - 0.75).abs() < 1e-15);
        let p = ks_test(&a, &b).unwrap();
        assert!((p - 0.228_571_428_571_43).abs() < 1e-10, "{p}");
        let far = ks_test(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert!((far - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn null_p_values() {
        let null = StatisticNull::build(StatisticId::KolmogorovSmirnov, 5, GeometryKind::Line, 2000, 1).unwrap();
        assert_eq!(null.p_value(2.0), 1.0 / 2001.0);
        assert_eq!(null.p_value(0.0), 1.0);
        let ad = StatisticNull::build(StatisticId::AndersonDarling, 5, GeometryKind::Line, 2000, 1).unwrap();
        assert_eq!(ad.p_value(f64::NEG_INFINITY), 1.0 / 2001.0);
    }
}
