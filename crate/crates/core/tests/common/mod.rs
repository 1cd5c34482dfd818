//! Property checks shared by the property suite and the acceptance run.

use fidelity::discrete::binomial_cumulative;
use fidelity::distributions::{cumulative_map, Family, GeometryKind, ModelDistribution, Params, Sample, UserModel};
use fidelity::fidelity::{concordance, fidelity, joint_fidelity, JointComponent};
use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use std::f64::consts::TAU;

#[allow(dead_code)]
pub type Check = fn(u32) -> Result<(), String>;

#[allow(dead_code)]
pub const ALL: [(&str, Check); 6] = [
    ("fidelity_nonpositive_zero_iff_equal", fidelity_bound),
    ("monotone_transform_invariance", monotone_invariance),
    ("circle_rotation_invariance", rotation_invariance),
    ("quantile_cdf_round_trip", round_trips),
    ("binomial_monotonicity", binomial_monotone),
    ("joint_single_reduces_to_concordance", joint_single),
];

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

fn run<S: Strategy>(cases: u32, s: S, f: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    runner(cases).run(&s, f).map_err(|e| e.to_string())
}

fn distinct_sorted(mut v: Vec<f64>) -> Option<Vec<f64>> {
    v.sort_by(f64::total_cmp);
    v.windows(2).all(|w| w[1] - w[0] > 1e-9).then_some(v)
}

pub fn fidelity_bound(cases: u32) -> Result<(), String> {
    run(cases, (vec(1e-6..1.0 - 1e-6, 1..40), any::<bool>()), |(c, circle)| {
        let Some(c) = distinct_sorted(c) else { return Ok(()) };
        let kind = if circle { GeometryKind::Circle } else { GeometryKind::Line };
        let f = fidelity(&c, kind);
        prop_assert!(f <= 0.0);
        let n = c.len();
        let equal: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        prop_assert!(fidelity(&equal, kind).abs() < 1e-12);
        let spread = c.iter().zip(&equal).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if kind == GeometryKind::Line && spread > 1e-6 {
            prop_assert!(f < 0.0, "unequal spacing gave f = {}", f);
        }
        Ok(())
    })?;
    // On the circle any rotation of equal spacing is still equal spacing.
    run(cases, (2usize..30, 0.0..1.0f64), |(n, shift)| {
        let c: Vec<f64> = (0..n).map(|i| (i as f64 / n as f64 + shift / n as f64).fract()).collect();
        let c = distinct_sorted(c).unwrap();
        prop_assert!(fidelity(&c, GeometryKind::Circle).abs() < 1e-10);
        Ok(())
    })
}

fn gauss(beta: f64, alpha: f64) -> ModelDistribution {
    ModelDistribution::new(Family::Gauss, &Params::new().with("beta", beta).with("alpha", alpha)).unwrap()
}

pub fn monotone_invariance(cases: u32) -> Result<(), String> {
    run(cases, (vec(-3.0..3.0f64, 2..25), 0.1..5.0f64, -5.0..5.0f64), |(x, scale, shift)| {
        let Some(x) = distinct_sorted(x) else { return Ok(()) };
        let base = gauss(0.3, 1.2);
        let s = Sample::line(x.clone()).unwrap();
        let f0 = concordance(&base, &s).unwrap();
        // Affine image under the matching family member.
        let moved = gauss(0.3 * scale + shift, 1.2 * scale);
        let f1 = concordance(&moved, &s.map(|v| v * scale + shift).unwrap()).unwrap();
        prop_assert!((f0.f - f1.f).abs() < 1e-10 && (f0.p - f1.p).abs() < 1e-10);
        // Cubic image under the pushed-forward model.
        let cubic = UserModel::line("cubic", (f64::NEG_INFINITY, f64::INFINITY), |y: f64| {
            let x = y.cbrt();
            (-(x - 0.3).powi(2) / (2.0 * 1.44)).exp() / (1.2 * TAU.sqrt()) / (3.0 * x * x).max(1e-300)
        })
        .with_cdf(|y: f64| fidelity::special::normal_cdf((y.cbrt() - 0.3) / 1.2));
        let m = ModelDistribution::user_defined(cubic).unwrap();
        let f2 = concordance(&m, &s.map(|v| v.powi(3)).unwrap()).unwrap();
        prop_assert!((f0.f - f2.f).abs() < 1e-9, "{} vs {}", f0.f, f2.f);
        Ok(())
    })
}

pub fn rotation_invariance(cases: u32) -> Result<(), String> {
    run(cases, (vec(0.0..TAU, 2..25), -10.0..10.0f64, 0.0..TAU), |(x, delta, beta)| {
        let Some(x) = distinct_sorted(x) else { return Ok(()) };
        let p = |b: f64| Params::new().with("beta", b).with("alpha", 2.0);
        let m0 = ModelDistribution::new(Family::VonMises, &p(beta)).unwrap();
        let m1 = ModelDistribution::new(Family::VonMises, &p(beta + delta)).unwrap();
        let s0 = Sample::circle(x.clone(), TAU).unwrap();
        let s1 = Sample::circle(x.iter().map(|v| v + delta).collect(), TAU).unwrap();
        let r0 = concordance(&m0, &s0).unwrap();
        let r1 = concordance(&m1, &s1).unwrap();
        if r0.f.is_finite() {
            prop_assert!((r0.f - r1.f).abs() < 1e-8, "{} vs {}", r0.f, r1.f);
        }
        Ok(())
    })
}

pub fn round_trips(cases: u32) -> Result<(), String> {
    let families: Vec<Family> = Family::LINE.iter().chain(Family::CIRCLE.iter()).copied().collect();
    run(cases, (0..families.len(), 1e-6..1.0 - 1e-6), |(k, c)| {
        let fam = families[k];
        let m = ModelDistribution::new(fam, &fam.default_params()).unwrap();
        let x = m.quantile(c).unwrap();
        let back = m.cumulative_value(x).unwrap();
        prop_assert!((back - c).abs() < 1e-8, "{}: c={} x={} back={}", fam.name(), c, x, back);
        let mut c2 = cumulative_map(&m, &Sample::new(vec![x], m.geometry()).unwrap()).unwrap().values()[0];
        if m.geometry().is_circle() && c2 > 1.0 - 1e-9 && c < 1e-9 {
            c2 -= 1.0;
        }
        prop_assert!((c2 - c).abs() < 1e-8);
        Ok(())
    })
}

pub fn binomial_monotone(cases: u32) -> Result<(), String> {
    run(cases, (1u64..300, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64), |(n, u, q1, q2)| {
        let k = ((n + 1) as f64 * u) as u64;
        let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
        let a = binomial_cumulative(n, lo, k);
        let b = binomial_cumulative(n, hi, k);
        prop_assert!(b.1 <= a.1 + 1e-12, "c_m not decreasing in q");
        prop_assert!(a.0 <= a.1 + 1e-15 && a.1 <= a.2 + 1e-15);
        if k < n {
            let up = binomial_cumulative(n, lo, k + 1);
            prop_assert!(up.1 >= a.1 - 1e-12, "c_m not increasing in k0");
        }
        Ok(())
    })
}

pub fn joint_single(cases: u32) -> Result<(), String> {
    run(cases, (vec(-4.0..4.0f64, 1..60), any::<bool>()), |(x, circle)| {
        let Some(x) = distinct_sorted(x) else { return Ok(()) };
        let (m, s) = if circle {
            let m = ModelDistribution::uniform_circle(TAU).unwrap();
            (m, Sample::circle(x.iter().map(|v| v + 4.0).collect(), TAU).unwrap())
        } else {
            (gauss(0.0, 1.0), Sample::line(x).unwrap())
        };
        let single = concordance(&m, &s).unwrap();
        let kind = m.geometry().kind();
        let joint = joint_fidelity(&[JointComponent::new(single.f, s.len(), kind)]).unwrap();
        prop_assert!((joint.p - single.p).abs() < 1e-12 && (joint.f - single.f).abs() < 1e-15);
        Ok(())
    })
}
