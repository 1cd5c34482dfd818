//! The named experiments.

use super::comparators::{ks_statistic, t_test};
use super::studies::*;
use super::{Bound, ExperimentConfig, ExperimentName, Metric, Out, Overrides};
use crate::discrete::{binary_interval, binomial_cumulative, solve_binary_q, IntervalMode};
use crate::distributions::{Family, GeometryKind, ModelDistribution, Params, UserModel};
use crate::error::{param, Result};
use crate::estimation::{
    fit, landscape, optimize, two_sample_fit, Axis, FamilySpec, ParamBox, SearchOptions, Sense, Sharing,
    SharingSpec, StatisticId, DEFAULT_LANDSCAPE_CAP,
};
use crate::fidelity::{null_approx, p_value};
use crate::multidim::{concordance_2d, Elliptical2D, TransformMethod};
use crate::output::{cell, num};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::f64::consts::{PI, TAU};

type Outcome = (Vec<Metric>, Value);

pub(super) fn dispatch(cfg: &ExperimentConfig, out: &mut Out) -> Result<Outcome> {
    match cfg.name {
        ExperimentName::NullDist => null_dist(cfg, out),
        ExperimentName::EstimatorCircleLocation => estimator(cfg, out, GeometryKind::Circle, Role::Location),
        ExperimentName::EstimatorCircleShape => estimator(cfg, out, GeometryKind::Circle, Role::Shape),
        ExperimentName::EstimatorLineLocation => estimator(cfg, out, GeometryKind::Line, Role::Location),
        ExperimentName::EstimatorLineShape => estimator(cfg, out, GeometryKind::Line, Role::Shape),
        ExperimentName::GaussMeanSigma => gauss_mean_sigma(cfg, out),
        ExperimentName::GofCircle => gof_circle(cfg, out),
        ExperimentName::GofLine => gof_line(cfg, out),
        ExperimentName::LandscapeDemo => landscape_demo(cfg, out),
        ExperimentName::TtestGauss => ttest(cfg, out, Family::Gauss, (0.0, 1.0), (2.0, 1.5)),
        ExperimentName::TtestExtreme => ttest(cfg, out, Family::ExtremeValue, (0.0, 1.0), (2.0, 2.0)),
        ExperimentName::TwosamplePower => twosample_power(cfg, out),
        ExperimentName::BinaryDemo => binary_demo(cfg, out),
        ExperimentName::Gof2d => gof2d(cfg, out),
    }
}

fn model(family: Family, beta: Option<f64>, alpha: f64) -> Result<ModelDistribution> {
    let mut p = Params::new().with("alpha", alpha);
    if let Some(b) = beta {
        p.set("beta", b);
    }
    ModelDistribution::new(family, &p)
}

fn null_dist(cfg: &ExperimentConfig, out: &mut Out) -> Result<Outcome> {
    let o = Overrides::new(&cfg.overrides, &["n", "geometry"])?;
    let n = o.usize("n", 5)?;
    let kind = GeometryKind::parse(o.str("geometry", "line"))?;
    let approx = null_approx(n, kind)?;
    let mut f = null_fidelity_draws(n, kind, cfg.realizations, cfg.seed);
    f.sort_by(f64::total_cmp);
    let p: Vec<f64> = f.iter().map(|&v| p_value(v, &approx)).collect::<Result<_>>()?;
    let d = p_sup_distance(&p);
    let r = f.len();
    let rows: Vec<Vec<String>> = (0..=200)
        .map(|k| {
            let i = ((k * (r - 1)) / 200).min(r - 1);
            vec![cell(f[i]), cell((i + 1) as f64 / r as f64), cell(p[i])]
        })
        .collect();
    out.tsv("null_cdf.tsv", &["f", "empirical_cdf", "gamma_cdf"], &rows)?;
    let metrics = if approx.rule.name() == "trivial" {
        let spread = f.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        vec![Metric::new("max_abs_f", spread, Bound::AtMost, 1e-12)]
    } else {
        let limit = if approx.rule.name() == "exponential" { 0.02 } else { 0.01 };
        vec![Metric::new("sup_distance_p_uniform", d, Bound::AtMost, limit)]
    };
    let details = json!({
        "n": n, "geometry": kind.name(), "rule": approx.rule.name(),
        "mu": num(approx.mu), "sigma2": num(approx.sigma2),
    });
    Ok((metrics, details))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    Location,
    Shape,
}

// (family, beta, alpha) of each estimator study.
fn estimator_cases(kind: GeometryKind, role: Role) -> Vec<(Family, Option<f64>, f64)> {
    match (kind, role) {
        (GeometryKind::Circle, Role::Location) => {
            vec![(Family::VonMises, Some(PI), 1.0), (Family::Theta, Some(PI), 4.0)]
        }
        (GeometryKind::Line, Role::Location) => [
            Family::Cauchy,
            Family::ExtremeValue,
            Family::Gauss,
            Family::Laplace,
            Family::Levy,
            Family::Logistic,
        ]
        .iter()
        .map(|&f| (f, f.reference().0, f.reference().1))
        .collect(),
        (GeometryKind::Circle, Role::Shape) => {
            Family::CIRCLE.iter().map(|&f| (f, f.reference().0, f.reference().1)).collect()
        }
        (GeometryKind::Line, Role::Shape) => {
            Family::LINE.iter().map(|&f| (f, f.reference().0, f.reference().1)).collect()
        }
    }
}

fn estimator(cfg: &ExperimentConfig, out: &mut Out, kind: GeometryKind, role: Role) -> Result<Outcome> {
    let o = Overrides::new(&cfg.overrides, &["n"])?;
    let n = o.usize("n", 5)?;
    let stats: &[StatisticId] = match kind {
        GeometryKind::Circle => &StatisticId::CIRCLE,
        GeometryKind::Line => &StatisticId::LINE,
    };
    let opts = SearchOptions::default();
    let mut summary_rows = Vec::new();
    let mut raw_rows = Vec::new();
    let mut worst_low = f64::INFINITY;
    let mut worst_high: f64 = 0.0;
    let mut worst_offset: f64 = 0.0;
    let mut details = Vec::new();
    for (fi, &(family, beta, alpha)) in estimator_cases(kind, role).iter().enumerate() {
        let truth = model(family, beta, alpha)?;
        let (axis, fixed, true_value) = match role {
            Role::Location => {
                let b = beta.unwrap_or(0.0);
                let axis = match kind {
                    GeometryKind::Circle => Axis::linear("beta", b - PI, b + PI)?,
                    GeometryKind::Line => Axis::linear("beta", b - 5.0 * alpha, b + 5.0 * alpha)?,
                };
                (axis, Params::new().with("alpha", alpha), b)
            }
            Role::Shape => {
                let k = 10f64.powf(1.5);
                let mut fixed = Params::new();
                if let Some(b) = beta {
                    fixed.set("beta", b);
                }
                (Axis::log("alpha", alpha / k, alpha * k)?, fixed, alpha)
            }
        };
        let seed = derive_seed(cfg.seed, fi as u64);
        let est: Vec<Vec<f64>> = (0..cfg.realizations as u64)
            .into_par_iter()
            .map(|r| {
                let mut rng = crate::rng::stream(seed, r);
                let s = truth.sample(n, &mut rng)?;
                stats
                    .iter()
                    .map(|&id| fit_one(id, family, &fixed, &axis, &s, &opts).or(Ok(f64::NAN)))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        let mut fam_detail = serde_json::Map::new();
        for (k, id) in stats.iter().enumerate() {
            let mut col: Vec<f64> = est.iter().map(|r| r[k]).filter(|v| v.is_finite()).collect();
            col.sort_by(f64::total_cmp);
            for (r, row) in est.iter().enumerate() {
                raw_rows.push(vec![family.name().into(), id.name().into(), r.to_string(), cell(row[k])]);
            }
            if col.is_empty() {
                continue;
            }
            let q = |t: f64| col[((col.len() - 1) as f64 * t).round() as usize];
            let med = col[(col.len() - 1) / 2];
            summary_rows.push(vec![
                family.name().into(),
                id.name().into(),
                cell(true_value),
                cell(q(0.25)),
                cell(med),
                cell(q(0.75)),
                col.len().to_string(),
            ]);
            fam_detail.insert(id.name().into(), num(med));
            if *id == StatisticId::Fidelity {
                match role {
                    Role::Shape => {
                        worst_low = worst_low.min(med / true_value);
                        worst_high = worst_high.max(med / true_value);
                    }
                    Role::Location => worst_offset = worst_offset.max((med - true_value).abs() / alpha),
                }
            }
        }
        details.push(json!({"family": family.name(), "truth": num(true_value), "median": fam_detail}));
    }
    let header = ["family", "statistic", "truth", "q25", "median", "q75", "fits"];
    out.tsv("estimates_summary.tsv", &header, &summary_rows)?;
    out.tsv("estimates.tsv", &["family", "statistic", "realization", "estimate"], &raw_rows)?;
    let metrics = match role {
        Role::Shape => vec![
            Metric::new("fidelity_min_median_ratio", worst_low, Bound::AtLeast, 0.7),
            Metric::new("fidelity_max_median_ratio", worst_high, Bound::AtMost, 1.4),
        ],
        Role::Location => vec![Metric::new("fidelity_max_median_offset_in_scales", worst_offset, Bound::AtMost, 0.25)],
    };
    Ok((metrics, json!({"n": n, "families": details})))
}

fn gauss_mean_sigma(cfg: &ExperimentConfig, out: &mut Out) -> Result<Outcome> {
    let o = Overrides::new(&cfg.overrides, &["n"])?;
    let n = o.usize("n", 5)?;
    let e = sigma_estimates(n, cfg.realizations, cfg.seed)?;
    let rows: Vec<Vec<String>> = (0..e.sd.len())
        .map(|r| vec![r.to_string(), cell(e.fidelity[r]), cell(e.likelihood[r]), cell(e.spacings[r]), cell(e.sd[r])])
        .collect();
    out.tsv("sigma_estimates.tsv", &["realization", "fidelity", "likelihood", "spacings", "sd"], &rows)?;
    let ks_fid = ks_statistic(&e.fidelity, &e.sd);
    let ks_lik = ks_statistic(&e.likelihood, &e.sd);
    let ks_spc = ks_statistic(&e.spacings, &e.sd);
    let metrics = vec![
        Metric::new("ks_fidelity_vs_sd", ks_fid, Bound::AtMost, 0.06),
        Metric::new("ks_likelihood_vs_sd", ks_lik, Bound::Above, 0.10),
    ];
    let details = json!({
        "n": n,
        "ks_spacings_vs_sd": num(ks_spc),
        "median": {
            "fidelity": num(median(&e.fidelity)), "likelihood": num(median(&e.likelihood)),
            "spacings": num(median(&e.spacings)), "sd": num(median(&e.sd)),
        }
    });
    Ok((metrics, details))
}

/// Competitors whose rates the fidelity is compared with on the line.
pub const LINE_GOF_COMPETITORS: [StatisticId; 7] = [
    StatisticId::AndersonDarling,
    StatisticId::CramerVonMises,
    StatisticId::KolmogorovSmirnov,
    StatisticId::EqualIntervals,
    StatisticId::Gini,
    StatisticId::Spacings,
    StatisticId::OrderStatistics,
];

fn power_table(
    out: &mut Out,
    file: &str,
    cases: &[(&str, Vec<(String, f64)>)],
) -> Result<Value> {
    let mut rows = Vec::new();
    let mut detail = serde_json::Map::new();
    for (case, rates) in cases {
        let mut m = serde_json::Map::new();
        for (name, rate) in rates {
            rows.push(vec![case.to_string(), name.clone(), cell(*rate)]);
            m.insert(name.clone(), num(*rate));
        }
        detail.insert(case.to_string(), Value::Object(m));
    }
    out.tsv(file, &["case", "test", "rejection_rate"], &rows)?;
    Ok(Value::Object(detail))
}

fn rate(rates: &[(String, f64)], name: &str) -> f64 {
    rates.iter().find(|r| r.0 == name).map(|r| r.1).unwrap_or(f64::NAN)
}

fn gof_line(cfg: &ExperimentConfig, out: &mut Out) -> Result<Outcome> {
    let o = Overrides::new(&cfg.overrides, &["n", "null_replicates"])?;
    let n = o.usize("n", 10)?;
    let null_reps = o.usize("null_replicates", 20_000)?;
    let hyp = model(Family::Gauss, Some(0.0), 1.0)?;
    let alternatives = [
        ("shift", model(Family::Gauss, Some(1.0), 1.0)?),
        ("wide", model(Family::Gauss, Some(0.0), 2.0)?),
        ("narrow", model(Family::Gauss, Some(0.0), 0.5)?),
        ("cauchy", model(Family::Cauchy, Some(0.0), 0.1)?),
    ];
    let mut cases = Vec::new();
    for (k, (name, alt)) in alternatives.iter().enumerate() {
        let rates = gof_power(&hyp, alt, n, cfg.realizations, &LINE_GOF_COMPETITORS, null_reps, derive_seed(cfg.seed, k as u64))?;
        cases.push((*name, rates));
    }
    let details = power_table(out, "gof_line_rates.tsv", &cases)?;
    let best = |rates: &[(String, f64)]| {
        LINE_GOF_COMPETITORS.iter().map(|id| rate(rates, id.name())).fold(f64::NEG_INFINITY, f64::max)
    };
    let mut metrics = Vec::new();
    for (name, rates) in &cases {
        let margin = rate(rates, "fidelity") - best(rates);
        if *name == "shift" {
            metrics.push(Metric::new("shift_fidelity_deficit", -margin, Bound::AtMost, 0.25));
        } else {
            metrics.push(Metric::new(format!("{name}_fidelity_margin"), margin, Bound::AtLeast, 0.0));
        }
    }
    Ok((metrics, json!({"n": n, "hypothesis": "gauss beta=0 alpha=1", "rates": details})))
}

fn cosine_circle(k: f64) -> Result<ModelDistribution> {
    let um = UserModel::circle(&format!("cos{k}"), TAU, move |t: f64| (1.0 + (k * t).cos()) / TAU)?
        .with_cdf(move |t: f64| (t + (k * t).sin() / k) / TAU);
    ModelDistribution::user_defined(um)
}

fn gof_circle(cfg: &ExperimentConfig, out: &mut Out) -> Result<Outcome> {
    let o = Overrides::new(&cfg.overrides, &["n", "null_replicates"])?;
    let n = o.usize("n", 10)?;
    let null_reps = o.usize("null_replicates", 20_000)?;
    let hyp = ModelDistribution::uniform_circle(TAU)?;
    let competitors = [
        StatisticId::Ajne,
        StatisticId::Gini,
        StatisticId::Kuiper,
        StatisticId::Rao,
        StatisticId::Rayleigh,
        StatisticId::Watson,
    ];
    let alternatives = [
        ("uniform", ModelDistribution::uniform_circle(TAU)?),
        ("vonmises", model(Family::VonMises, Some(0.0), 1.0)?),
        ("wrappedlaplace", model(Family::WrappedLaplace, Some(2.0), 0.5)?),
        ("cos2", cosine_circle(2.0)?),
        ("cos10", cosine_circle(10.0)?),
    ];
    let mut cases = Vec::new();
    for (k, (name, alt)) in alternatives.iter().enumerate() {
        let rates = gof_power(&hyp, alt, n, cfg.realizations, &competitors, null_reps, derive_seed(cfg.seed, k as u64))?;
        cases.push((*name, rates));
    }
    let details = power_table(out, "gof_circle_rates.tsv", &cases)?;
    let null_dev = cases[0].1.iter().map(|(_, r)| (r - 0.05).abs()).fold(0.0, f64::max);
    let metrics = vec![Metric::new("null_max_rate_deviation", null_dev, Bound::AtMost, 0.03)];
    Ok((metrics, json!({"n": n, "hypothesis": "uniform circle", "rates": details})))
}

fn landscape_demo(cfg: &ExperimentConfig, out: &mut Out) -> Result<Outcome> {
    let o = Overrides::new(&cfg.overrides, &["n", "points"])?;
    let n = o.usize("n", 20)?;
    let pts = o.usize("points", 101)?;
    let truth = model(Family::Gauss, Some(0.0), 1.0)?;
    let s = truth.sample(n, &mut crate::rng::stream(cfg.seed, 0))?;
    let bx = ParamBox::new(vec![
        Axis::linear("mu", -2.0, 2.0)?.with_points(pts)?,
        Axis::linear("sigma", 0.2, 3.0)?.with_points(pts)?,
    ])?;
    let spec = FamilySpec::new(Family::Gauss, Params::new(), bx)?;
    let l = landscape(&spec, &s, DEFAULT_LANDSCAPE_CAP)?;
    let rows: Vec<Vec<String>> = (0..l.len())
        .map(|i| {
            let x = l.point(i);
            vec![cell(x[0]), cell(x[1]), cell(l.f[i]), cell(l.p[i])]
        })
        .collect();
    out.tsv("landscape.tsv", &["mu", "sigma", "f", "p"], &rows)?;
    let grid_max = l.p.iter().cloned().fold(0.0, f64::max);
    let fitted = fit(StatisticId::Fidelity, &spec, &s, &SearchOptions::default())?;
    let metrics = vec![Metric::new("grid_vs_fit_max_p", (fitted.p - grid_max).abs(), Bound::AtMost, 0.02)];
    let details = json!({
        "n": n, "grid_max_p": num(grid_max), "fit_p": num(fitted.p),
        "fit": {"mu": num(fitted.params.get("beta").unwrap_or(f64::NAN)),
                "sigma": num(fitted.params.get("alpha").unwrap_or(f64::NAN))},
    });
    Ok((metrics, details))
}

fn ttest(
    cfg: &ExperimentConfig,
    out: &mut Out,
    family: Family,
    (b1, a1): (f64, f64),
    (b2, a2): (f64, f64),
) -> Result<Outcome> {
    let o = Overrides::new(&cfg.overrides, &["n1", "n2"])?;
    let (n1, n2) = (o.usize("n1", 25)?, o.usize("n2", 50)?);
    let m1 = model(family, Some(b1), a1)?;
    let m2 = model(family, Some(b2), a2)?;
    let opts = SearchOptions { grid_cap: 2000, ..SearchOptions::default() };
    let configs: [(&str, Sharing, Sharing); 4] = [
        ("separate", Sharing::Separate, Sharing::Separate),
        ("shared_beta", Sharing::Shared, Sharing::Separate),
        ("shared_alpha", Sharing::Separate, Sharing::Shared),
        ("shared", Sharing::Shared, Sharing::Shared),
    ];
    let rows: Vec<Vec<f64>> = (0..cfg.realizations as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = crate::rng::stream(cfg.seed, r);
            let s1 = m1.sample(n1, &mut rng)?;
            let s2 = m2.sample(n2, &mut rng)?;
            let mut pooled = s1.values().to_vec();
            pooled.extend_from_slice(s2.values());
            let pooled = crate::distributions::Sample::line(pooled)?;
            let spec = FamilySpec::with_default_box(family, Params::new(), &["beta", "alpha"], &pooled)?;
            let mut row = Vec::new();
            for (_, sb, sa) in &configs {
                let sharing = SharingSpec::new(&[("beta", *sb), ("alpha", *sa)])?;
                let p = match two_sample_fit(&spec, &spec, &sharing, &s1, &s2, &opts) {
                    Ok(f) => f.joint.p,
                    Err(crate::Error::NoFit(_)) => 0.0,
                    Err(e) => return Err(e),
                };
                row.push(p);
            }
            row.push(t_test(s1.values(), s2.values())?);
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let header = ["realization", "separate", "shared_beta", "shared_alpha", "shared", "t_test"];
    let table: Vec<Vec<String>> = rows
        .iter()
        .enumerate()
        .map(|(r, row)| std::iter::once(r.to_string()).chain(row.iter().map(|&v| cell(v))).collect())
        .collect();
    out.tsv("joint_p.tsv", &header, &table)?;
    let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<f64>>();
    let mut med = serde_json::Map::new();
    for (k, name) in header[1..].iter().enumerate() {
        med.insert(name.to_string(), num(median(&col(k))));
    }
    let metrics = vec![
        Metric::new("median_p_shared", median(&col(3)), Bound::Below, 0.05),
        Metric::new("median_p_separate", median(&col(0)), Bound::Above, 0.05),
    ];
    Ok((metrics, json!({"family": family.name(), "n1": n1, "n2": n2, "median_p": med})))
}

fn twosample_power(cfg: &ExperimentConfig, out: &mut Out) -> Result<Outcome> {
    let o = Overrides::new(&cfg.overrides, &["null_replicates"])?;
    let reps = o.usize("null_replicates", 20_000)?;
    let cases = [
        ("location", model(Family::Gauss, Some(0.0), 1.0)?, 8, model(Family::Gauss, Some(1.5), 1.0)?, 5),
        ("width", model(Family::Gauss, Some(0.0), 1.0)?, 8, model(Family::Gauss, Some(0.0), 5.0)?, 5),
        ("ev_cauchy", model(Family::ExtremeValue, Some(0.0), 1.0)?, 20, model(Family::Cauchy, Some(0.0), 1.5)?, 10),
    ];
    let mut results = Vec::new();
    for (k, (name, a, n1, b, n2)) in cases.iter().enumerate() {
        let rates = twosample_rates(a, *n1, b, *n2, cfg.realizations, reps, derive_seed(cfg.seed, k as u64))?;
        results.push((*name, rates));
    }
    let details = power_table(out, "twosample_rates.tsv", &results)?;
    let w = &results[1].1;
    let e = &results[2].1;
    let best_other = ["t-test", "mann-whitney", "kolmogorov-smirnov"].iter().map(|m| rate(e, m)).fold(0.0, f64::max);
    let metrics = vec![
        Metric::new("width_fidelity_minus_ks", rate(w, "fidelity") - rate(w, "kolmogorov-smirnov"), Bound::Above, 0.0),
        Metric::new("ev_cauchy_fidelity_minus_best_other", rate(e, "fidelity") - best_other, Bound::Above, 0.0),
    ];
    Ok((metrics, json!({"null_replicates": reps, "rates": details})))
}

fn binary_demo(cfg: &ExperimentConfig, out: &mut Out) -> Result<Outcome> {
    Overrides::new(&cfg.overrides, &[])?;
    let mut rows = Vec::new();
    for q in [0.1, 0.306089, 0.55] {
        for k in 0..=10u64 {
            let (l, m, h) = binomial_cumulative(10, q, k);
            rows.push(vec![cell(q), k.to_string(), cell(l), cell(m), cell(h)]);
        }
    }
    out.tsv("binomial_cumulative.tsv", &["q", "k", "c_l", "c_m", "c_h"], &rows)?;
    let q10 = solve_binary_q(10, 3);
    let cm = binomial_cumulative(1000, 0.5, 489).1;
    let mid = binary_interval(10, 3, 0.9, IntervalMode::Midpoint)?;
    let exact = binary_interval(10, 3, 0.9, IntervalMode::Exact)?;
    let big = binary_interval(1000, 489, 0.9, IntervalMode::Midpoint)?;
    let dev = |a: f64, b: f64| (a - b).abs();
    let metrics = vec![
        Metric::new("q_star_10_3_error", dev(q10, 0.306089), Bound::AtMost, 1e-5),
        Metric::new("c_m_1000_489_error", dev(cm, 0.243), Bound::AtMost, 5e-4),
        Metric::new("midpoint_10_3_error", dev(mid.q_lo, 0.107).max(dev(mid.q_hi, 0.571)), Bound::AtMost, 1e-3),
        Metric::new("exact_10_3_error", dev(exact.q_lo, 0.150).max(dev(exact.q_hi, 0.507)), Bound::AtMost, 1e-3),
        Metric::new("midpoint_1000_489_error", dev(big.q_lo, 0.463).max(dev(big.q_hi, 0.515)), Bound::AtMost, 1e-3),
    ];
    let details = json!({
        "q_star_10_3": num(q10), "q_star_1000_489": num(solve_binary_q(1000, 489)), "c_m_1000_05_489": num(cm),
        "midpoint_10_3": [num(mid.q_lo), num(mid.q_hi)], "exact_10_3": [num(exact.q_lo), num(exact.q_hi)],
        "midpoint_1000_489": [num(big.q_lo), num(big.q_hi)],
    });
    Ok((metrics, details))
}

/// Best overall scale `s` of a Gaussian sharing the shape and orientation of
/// `shape`, by r-θ joint fidelity.
pub fn best_scale_gauss(shape: &Elliptical2D, pts: &crate::multidim::PointSet2D) -> Result<(f64, f64)> {
    let bx = ParamBox::new(vec![Axis::log("s", 0.05, 20.0)?])?;
    let build = |s: f64| Elliptical2D::gauss(shape.x0, shape.y0, s * shape.a, s * shape.b, shape.phi);
    let o = optimize(
        |x: &[f64]| build(x[0]).and_then(|m| concordance_2d(&m, pts, TransformMethod::RTheta)).map(|r| r.f).unwrap_or(f64::NAN),
        Sense::Maximize,
        &bx,
        &SearchOptions::default(),
    )?;
    let p = concordance_2d(&build(o.x[0])?, pts, TransformMethod::RTheta)?.p;
    Ok((o.x[0], p))
}

fn gof2d(cfg: &ExperimentConfig, out: &mut Out) -> Result<Outcome> {
    let o = Overrides::new(&cfg.overrides, &["n", "exp_n", "exp_realizations"])?;
    let n = o.usize("n", 100)?;
    let exp_n = o.usize("exp_n", 500)?;
    let exp_reps = o.usize("exp_realizations", 100)?;
    if exp_reps == 0 {
        return Err(param("exp_realizations must be positive"));
    }
    let mut metrics = Vec::new();
    let mut rows = Vec::new();
    let mut dists = serde_json::Map::new();
    for (k, ratio) in [1.0, 1.5, 3.0].into_iter().enumerate() {
        let m = Elliptical2D::gauss(7.0, 3.0, 2.0 * ratio, 2.0, PI / 3.0)?;
        let p = rtheta_null_p_values(&m, n, cfg.realizations, derive_seed(cfg.seed, k as u64))?;
        let d = p_sup_distance(&p);
        rows.push(vec![cell(ratio), cell(d), cell(rejection_rate(&p, 0.05))]);
        dists.insert(format!("{ratio}"), num(d));
        metrics.push(Metric::new(format!("sup_distance_aspect_{ratio}"), d, Bound::AtMost, 0.02));
    }
    out.tsv("rtheta_calibration.tsv", &["aspect_ratio", "sup_distance", "rejection_rate"], &rows)?;
    let exp = Elliptical2D::exponential(7.0, 3.0, 5.0, 1.0, PI / 3.0)?;
    let seed = derive_seed(cfg.seed, 99);
    let fits: Vec<(f64, f64)> = (0..exp_reps as u64)
        .into_par_iter()
        .map(|r| {
            let pts = exp.sample(exp_n, &mut crate::rng::stream(seed, r))?;
            best_scale_gauss(&exp, &pts)
        })
        .collect::<Result<_>>()?;
    let p: Vec<f64> = fits.iter().map(|f| f.1).collect();
    out.tsv(
        "exp_vs_gauss.tsv",
        &["realization", "scale", "p"],
        &fits.iter().enumerate().map(|(r, f)| vec![r.to_string(), cell(f.0), cell(f.1)]).collect::<Vec<_>>(),
    )?;
    let rej = rejection_rate(&p, 0.05);
    metrics.push(Metric::new("exp_vs_best_gauss_rejection_rate", rej, Bound::AtLeast, 0.9));
    Ok((metrics, json!({"n": n, "sup_distance": dists, "exp_n": exp_n, "exp_realizations": exp_reps})))
}
