//! Monte Carlo checks of calibration and power.

use fidelity::discrete::{binned_fidelity_median, BinnedSample};
use fidelity::distributions::{Family, GeometryKind, ModelDistribution, Params, Sample};
use fidelity::experiments::{p_sup_distance, run, ExperimentConfig, ExperimentName};
use fidelity::fidelity::{concordance, fidelity, joint_fidelity, null_approx, p_value, JointComponent};
use fidelity::multidim::{Elliptical2D, PointSet2D};
use fidelity::rng::{open_unit, stream};
use fidelity::twosample::{build_null, twosample_fidelity, twosample_p};
use rayon::prelude::*;

fn gauss(beta: f64, alpha: f64) -> ModelDistribution {
    ModelDistribution::new(Family::Gauss, &Params::new().with("beta", beta).with("alpha", alpha)).unwrap()
}

fn uniforms(n: usize, seed: u64, r: u64) -> Vec<f64> {
    let mut rng = stream(seed, r);
    let mut c: Vec<f64> = (0..n).map(|_| open_unit(&mut rng)).collect();
    c.sort_by(f64::total_cmp);
    c
}

#[test]
fn large_sample_mean() {
    let s = gauss(0.0, 1.0).sample(100_000, &mut stream(11, 0)).unwrap();
    let mean = s.values().iter().sum::<f64>() / s.len() as f64;
    assert!(mean.abs() < 0.02, "mean {mean}");
}

#[test]
fn concordance_is_uniform_under_the_model() {
    let m = gauss(0.0, 1.0);
    let p: Vec<f64> = (0..100_000u64)
        .into_par_iter()
        .map(|r| concordance(&m, &m.sample(20, &mut stream(12, r)).unwrap()).unwrap().p)
        .collect();
    // DKW band at 99.9%.
    let band = ((2.0f64 / 0.001).ln() / (2.0 * 1e5)).sqrt();
    let d = p_sup_distance(&p);
    assert!(d < band, "sup distance {d} vs band {band}");
}

#[test]
fn joint_line_circle_is_uniform() {
    let parts = [(5, GeometryKind::Line), (5, GeometryKind::Circle)];
    let p: Vec<f64> = (0..100_000u64)
        .into_par_iter()
        .map(|r| {
            let comps: Vec<JointComponent> = parts
                .iter()
                .enumerate()
                .map(|(k, &(n, g))| JointComponent::new(fidelity(&uniforms(n, 13 + k as u64, r), g), n, g))
                .collect();
            joint_fidelity(&comps).unwrap().p
        })
        .collect();
    let d = p_sup_distance(&p);
    assert!(d <= 0.01, "sup distance {d}");
}

#[test]
fn single_bin_gives_the_median_uniform_draw() {
    let data = BinnedSample::new(vec![-10.0, 10.0], vec![1]).unwrap();
    let r = binned_fidelity_median(&gauss(0.0, 1.0), &data, 999, 14).unwrap();
    // One point: p = 1 − √(1 − 4c(1−c)) is uniform when c is, so the median
    // replicate sits near p = 1/2.
    assert!((r.p - 0.5).abs() < 0.05, "p {}", r.p);
}

fn binned_normal(seed: u64, r: u64) -> BinnedSample {
    let s = gauss(0.0, 1.0).sample(200, &mut stream(seed, r)).unwrap();
    let edges: Vec<f64> = (0..=20).map(|i| -4.0 + 0.4 * i as f64).collect();
    let mut counts = vec![0u64; 20];
    for &x in s.values() {
        let b = (((x + 4.0) / 0.4).floor() as i64).clamp(0, 19) as usize;
        counts[b] += 1;
    }
    BinnedSample::new(edges, counts).unwrap()
}

#[test]
fn binned_normal_data() {
    let truth = gauss(0.0, 1.0);
    let shifted = gauss(3.0, 1.0);
    let (ok, rejected): (Vec<bool>, Vec<bool>) = (0..200u64)
        .map(|r| {
            let d = binned_normal(15, r);
            let p_true = binned_fidelity_median(&truth, &d, 999, 1000 + r).unwrap().p;
            let p_shift = binned_fidelity_median(&shifted, &d, 999, 1000 + r).unwrap().p;
            (p_true > 0.05, p_shift < 0.01)
        })
        .unzip();
    let ok = ok.iter().filter(|&&b| b).count() as f64 / 200.0;
    let rejected = rejected.iter().filter(|&&b| b).count() as f64 / 200.0;
    assert!(ok >= 0.9, "true model accepted in {ok}");
    assert!(rejected >= 0.99, "shifted model rejected in {rejected}");
}

fn pattern_f(pattern: &[bool]) -> f64 {
    // true = first sample; positions 1..=len on the line.
    let a: Vec<f64> = pattern.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as f64).collect();
    let b: Vec<f64> = pattern.iter().enumerate().filter(|(_, &b)| !b).map(|(i, _)| i as f64).collect();
    twosample_fidelity(&Sample::line(a).unwrap(), &Sample::line(b).unwrap()).unwrap().f
}

#[test]
fn interleaved_pattern_is_near_the_best() {
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..256 {
        if mask.count_ones() == 4 {
            let p: Vec<bool> = (0..8).map(|i| mask >> i & 1 == 1).collect();
            best = best.max(pattern_f(&p));
        }
    }
    let inter = pattern_f(&[true, false, true, false, true, false, true, false]);
    assert!(best - inter <= 0.05, "interleaved {inter}, best {best}");
}

#[test]
fn separated_samples_are_extreme() {
    let a = Sample::line((0..10).map(f64::from).collect()).unwrap();
    let b = Sample::line((10..20).map(f64::from).collect()).unwrap();
    let r = twosample_fidelity(&a, &b).unwrap();
    let null = build_null(10, 10, 20_000, 16).unwrap();
    let q01 = null.sorted_f()[null.replicates() / 100];
    assert!(r.f < q01, "f {} vs 1st percentile {q01}", r.f);
}

#[test]
fn twosample_null_is_stable_and_calibrated() {
    let n1 = build_null(8, 5, 20_000, 17).unwrap();
    let n2 = build_null(8, 5, 20_000, 18).unwrap();
    let med = |n: &fidelity::twosample::EmpiricalNull| n.sorted_f()[n.replicates() / 2];
    assert!((med(&n1) - med(&n2)).abs() <= 0.02);
    let m = gauss(0.0, 1.0);
    let p: Vec<f64> = (0..100_000u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(19, r);
            let a = m.sample(8, &mut rng).unwrap();
            let b = m.sample(5, &mut rng).unwrap();
            twosample_p(&twosample_fidelity(&a, &b).unwrap(), &n1).unwrap()
        })
        .collect();
    let d = p_sup_distance(&p);
    assert!(d <= 0.02, "sup distance {d}");
}

#[test]
fn joint_two_sample_fit_regimes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::new(ExperimentName::TtestGauss, 20).with_realizations(200);
    let s = run(&cfg, dir.path()).unwrap();
    let shared = s.metric("median_p_shared").unwrap();
    let separate = s.metric("median_p_separate").unwrap();
    assert!(shared.value < 0.05, "shared median p {}", shared.value);
    assert!(separate.value > 0.05, "separate median p {}", separate.value);
}

#[test]
fn landscape_grid_agrees_with_fit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::new(ExperimentName::LandscapeDemo, 21).with_realizations(100);
    let s = run(&cfg, dir.path()).unwrap();
    let m = s.metric("grid_vs_fit_max_p").unwrap();
    assert!(m.value <= 0.02, "{}", m.value);
}

#[test]
fn exponential_2d_rejects_best_scale_gauss() {
    let exp = Elliptical2D::exponential(7.0, 3.0, 5.0, 1.0, std::f64::consts::PI / 3.0).unwrap();
    let p: Vec<f64> = (0..100u64)
        .into_par_iter()
        .map(|r| {
            let pts: PointSet2D = exp.sample(500, &mut stream(22, r)).unwrap();
            fidelity::experiments::best_scale_gauss(&exp, &pts).unwrap().1
        })
        .collect();
    let rate = p.iter().filter(|&&v| v < 0.05).count() as f64 / p.len() as f64;
    assert!(rate >= 0.9, "rejection rate {rate}");
}

#[test]
fn null_p_matches_formula_for_one_point() {
    let c = 0.9;
    let f = fidelity(&[c], GeometryKind::Line);
    let p = p_value(f, &null_approx(1, GeometryKind::Line).unwrap()).unwrap();
    assert!((p - 0.2).abs() < 1e-12);
}
