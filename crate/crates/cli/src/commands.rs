use crate::args::*;
use crate::Failure;
use fidelity::discrete::{binary_interval, binomial_cumulative, binned_fidelity_estimate, binned_fidelity_median};
use fidelity::discrete::{BinnedSample, IntervalMode};
use fidelity::distributions::io::{parse_binned, parse_pairs, parse_points, read_values};
use fidelity::distributions::{Family, GeometryKind, ModelDistribution, Params, Sample};
use fidelity::estimation::{
    fit, landscape, two_sample_fit, Axis, FamilySpec, ParamBox, Scale, SearchOptions, Sharing, SharingSpec,
    StatisticId,
};
use fidelity::experiments::{run, ExperimentConfig, ExperimentName};
use fidelity::fidelity::{concordance, null_approx, table_row, FidelityReport};
use fidelity::multidim::{concordance_2d, Elliptical2D, PointSet2D, TransformMethod};
use fidelity::output::{cell, num};
use fidelity::twosample::{cached_null, twosample_fidelity, twosample_p};
use fidelity::{Error, Warning};
use serde_json::{json, Map, Value};
use std::path::{Path, PathBuf};

pub const SCHEMA: &str = "fidelity/1";

type Outcome = Result<(), Failure>;

trait Ctx<T> {
    fn ctx(self, context: &str) -> Result<T, Failure>;
    fn usage(self, context: &str) -> Result<T, Failure>;
}

impl<T> Ctx<T> for fidelity::Result<T> {
    fn ctx(self, context: &str) -> Result<T, Failure> {
        self.map_err(|e| Failure::from_core(e, context))
    }

    // Errors in flag values are usage errors whatever their kind.
    fn usage(self, context: &str) -> Result<T, Failure> {
        self.map_err(|e| Failure::usage(e.to_string(), context))
    }
}

pub fn dispatch(cli: &Cli) -> Outcome {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Fit(a) => cmd_fit(a, out),
        Command::Gof(a) => cmd_gof(a, out),
        Command::Landscape(a) => cmd_landscape(a, out),
        Command::Ttest(a) => cmd_ttest(a, out),
        Command::Twosample(a) => cmd_twosample(a, out),
        Command::Binary(a) => cmd_binary(a, out),
        Command::Binned(a) => cmd_binned(a, out),
        Command::Gof2d(a) => cmd_gof2d(a, out),
        Command::NullTable(a) => cmd_null_table(a, out),
        Command::Experiment(a) => cmd_experiment(a, out),
    }
}

fn emit_text(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::from_core(Error::from(e), &path.display().to_string())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(mut body: Map<String, Value>, out: Option<&Path>) -> Outcome {
    body.insert("schema".into(), json!(SCHEMA));
    let text = serde_json::to_string_pretty(&Value::Object(body)).expect("json") + "\n";
    emit_text(&text, out)
}

fn obj(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("object literal"),
    }
}

fn warnings_json(w: &[Warning]) -> Value {
    Value::Array(w.iter().map(|w| json!({"kind": w.kind(), "message": w.to_string()})).collect())
}

fn params_json(p: &Params) -> Value {
    Value::Object(p.iter().map(|(k, v)| (k.to_string(), num(v))).collect())
}

fn report_json(r: &FidelityReport) -> Map<String, Value> {
    obj(json!({
        "n": r.n(),
        "geometry": r.geometry_label(),
        "f": num(r.f),
        "p": num(r.p),
        "warnings": warnings_json(&r.warnings),
    }))
}

fn read_sample(path: &Path, column: Option<&str>, geometry: fidelity::distributions::Geometry) -> Result<Sample, Failure> {
    let ctx = path.display().to_string();
    let values = read_values(path, column).ctx(&ctx)?;
    Sample::new(values, geometry).ctx(&ctx)
}

fn model_arg(spec: &str) -> Result<ModelDistribution, Failure> {
    ModelDistribution::from_spec(spec).usage("--model")
}

/// Family plus fixed parameters from `family=...,name=value,...`.
fn family_arg(spec: &str) -> Result<(Family, Params), Failure> {
    let pairs = parse_pairs(spec).usage("--model")?;
    let mut family = None;
    let mut fixed = Params::new();
    for (k, v) in &pairs {
        if k == "family" {
            family = Some(Family::parse(v).usage("--model")?);
        } else {
            let v: f64 = v.parse().map_err(|_| Failure::usage(format!("bad value for {k}: '{v}'"), "--model"))?;
            fixed.set(k, v);
        }
    }
    let family = family.ok_or_else(|| Failure::usage("model spec lacks family=", "--model"))?;
    let mut canon = Params::new();
    for (k, v) in fixed.iter() {
        canon.set(family.canonical_param(k).usage("--model")?, v);
    }
    Ok((family, canon))
}

fn family_geometry(family: Family) -> fidelity::distributions::Geometry {
    if family.is_circular() {
        fidelity::distributions::Geometry::angles()
    } else {
        fidelity::distributions::Geometry::line()
    }
}

fn free_names(family: Family, fixed: &Params, list: Option<&str>) -> Result<Vec<&'static str>, Failure> {
    match list {
        Some(l) => l
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| family.canonical_param(s).usage("--fit"))
            .collect(),
        None => Ok(family.param_names().iter().copied().filter(|n| fixed.get(n).is_none()).collect()),
    }
}

/// `name=lo:hi[:points][:log]`.
fn parse_axis(family: Family, text: &str, context: &str) -> Result<Axis, Failure> {
    let bad = || Failure::usage(format!("expected name=lo:hi[:points][:log], got '{text}'"), context);
    let (name, rest) = text.split_once('=').ok_or_else(bad)?;
    let parts: Vec<&str> = rest.split(':').map(str::trim).collect();
    if parts.len() < 2 || parts.len() > 4 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let mut points = 101;
    let mut scale = Scale::Linear;
    for p in &parts[2..] {
        if p.eq_ignore_ascii_case("log") {
            scale = Scale::Log;
        } else {
            points = p.parse().map_err(|_| bad())?;
        }
    }
    let canon = family.canonical_param(name.trim()).usage(context)?;
    Axis::new(canon, lo, hi, scale, points).usage(context)
}

fn cmd_fit(a: &FitArgs, out: Option<&Path>) -> Outcome {
    let (family, fixed) = family_arg(&a.model)?;
    let statistic = StatisticId::parse(&a.statistic).usage("--statistic")?;
    let sample = read_sample(&a.data.data, a.data.column.as_deref(), family_geometry(family))?;
    let names = free_names(family, &fixed, a.fit.as_deref())?;
    let mut spec = FamilySpec::with_default_box(family, fixed.clone(), &names, &sample).usage("--fit")?;
    if !a.range.is_empty() {
        let mut axes = spec.free.axes.clone();
        for r in &a.range {
            let ax = parse_axis(family, r, "--range")?;
            let slot = axes
                .iter_mut()
                .find(|x| x.name == ax.name)
                .ok_or_else(|| Failure::usage(format!("'{}' is not a free parameter", ax.name), "--range"))?;
            *slot = ax;
        }
        spec = FamilySpec::new(family, fixed, ParamBox::new(axes).usage("--range")?).usage("--range")?;
    }
    let r = fit(statistic, &spec, &sample, &SearchOptions::default()).ctx("fit")?;
    emit(
        obj(json!({
            "family": family.name(),
            "statistic": statistic.name(),
            "n": sample.len(),
            "params": params_json(&r.params),
            "value": num(r.value),
            "f": num(r.f),
            "p": num(r.p),
            "evaluations": r.evaluations,
            "warnings": warnings_json(&r.warnings),
        })),
        out,
    )
}

fn cmd_gof(a: &GofArgs, out: Option<&Path>) -> Outcome {
    let model = model_arg(&a.model)?;
    let sample = read_sample(&a.data.data, a.data.column.as_deref(), model.geometry())?;
    let r = concordance(&model, &sample).ctx("gof")?;
    let mut body = report_json(&r);
    body.insert("family".into(), json!(model.family().name()));
    emit(body, out)
}

fn cmd_landscape(a: &LandscapeArgs, out: Option<&Path>) -> Outcome {
    let (family, fixed) = family_arg(&a.model)?;
    let sample = read_sample(&a.data.data, a.data.column.as_deref(), family_geometry(family))?;
    // Keep the user's axis labels for the header.
    let mut labels = Vec::new();
    let mut axes = Vec::new();
    for item in a.grid.split(',').filter(|s| !s.trim().is_empty()) {
        labels.push(item.split_once('=').map(|x| x.0.trim().to_string()).unwrap_or_default());
        axes.push(parse_axis(family, item, "--grid")?);
    }
    let bx = ParamBox::new(axes).usage("--grid")?;
    let spec = FamilySpec::new(family, fixed, bx).usage("--grid")?;
    let l = landscape(&spec, &sample, a.cap).ctx("landscape")?;
    let mut text = labels.join("\t") + "\tf\tp\n";
    for i in 0..l.len() {
        let row: Vec<String> = l.point(i).into_iter().chain([l.f[i], l.p[i]]).map(cell).collect();
        text += &row.join("\t");
        text.push('\n');
    }
    emit_text(&text, out)
}

fn cmd_ttest(a: &TtestArgs, out: Option<&Path>) -> Outcome {
    let (family, fixed) = family_arg(&a.model)?;
    let g = family_geometry(family);
    let s1 = read_sample(&a.a, None, g)?;
    let s2 = read_sample(&a.b, None, g)?;
    let names = free_names(family, &fixed, a.fit.as_deref())?;
    let shared: Vec<&str> = a
        .shared
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| family.canonical_param(s).usage("--shared"))
        .collect::<Result<_, _>>()?;
    if let Some(s) = shared.iter().find(|s| !names.contains(s)) {
        return Err(Failure::usage(format!("shared parameter '{s}' is not free"), "--shared"));
    }
    let mut pooled = s1.values().to_vec();
    pooled.extend_from_slice(s2.values());
    let pooled = Sample::new(pooled, g).ctx("samples")?;
    let spec = FamilySpec::with_default_box(family, fixed, &names, &pooled).usage("--fit")?;
    let entries: Vec<(&str, Sharing)> = names
        .iter()
        .map(|n| (*n, if shared.contains(n) { Sharing::Shared } else { Sharing::Separate }))
        .collect();
    let sharing = SharingSpec::new(&entries).usage("--shared")?;
    let r = two_sample_fit(&spec, &spec, &sharing, &s1, &s2, &SearchOptions::default()).ctx("ttest")?;
    emit(
        obj(json!({
            "family": family.name(),
            "shared": shared,
            "params_a": params_json(&r.params1),
            "params_b": params_json(&r.params2),
            "a": Value::Object(report_json(&r.report1)),
            "b": Value::Object(report_json(&r.report2)),
            "joint": Value::Object(report_json(&r.joint)),
            "evaluations": r.evaluations,
        })),
        out,
    )
}

fn cmd_twosample(a: &TwosampleArgs, out: Option<&Path>) -> Outcome {
    let s1 = read_sample(&a.a, None, fidelity::distributions::Geometry::line())?;
    let s2 = read_sample(&a.b, None, fidelity::distributions::Geometry::line())?;
    let mut r = twosample_fidelity(&s1, &s2).ctx("twosample")?;
    let null = cached_null(r.n1, r.n2, a.null_replicates, a.seed).usage("--null-replicates")?;
    let p = twosample_p(&r, &null).ctx("twosample")?;
    r.p = Some(p);
    emit(
        obj(json!({
            "n1": r.n1, "n2": r.n2,
            "f1": num(r.f1), "f2": num(r.f2), "f": num(r.f), "p": num(p),
            "null_replicates": a.null_replicates, "seed": a.seed,
            "warnings": warnings_json(&r.warnings),
        })),
        out,
    )
}

fn cmd_binary(a: &BinaryArgs, out: Option<&Path>) -> Outcome {
    let mode = match a.mode.to_lowercase().as_str() {
        "midpoint" => IntervalMode::Midpoint,
        "exact" => IntervalMode::Exact,
        other => return Err(Failure::usage(format!("unknown mode '{other}'"), "--mode")),
    };
    fidelity::discrete::BinaryOutcome::new(a.n, a.k).usage("--k")?;
    let q_star = fidelity::discrete::solve_binary_q(a.n, a.k);
    let q = a.q.unwrap_or(q_star);
    if !(0.0..=1.0).contains(&q) {
        return Err(Failure::usage(format!("q must lie in [0, 1], got {q}"), "--q"));
    }
    let (c_l, c_m, c_h) = binomial_cumulative(a.n, q, a.k);
    let iv = binary_interval(a.n, a.k, a.level, mode).usage("--level")?;
    emit(
        obj(json!({
            "n": a.n, "k": a.k,
            "q_star": num(q_star),
            "c_m_at": {"q": num(q), "c_l": num(c_l), "c_m": num(c_m), "c_h": num(c_h)},
            "interval": {
                "level": num(a.level), "mode": mode.name(),
                "q_lo": num(iv.q_lo), "q_hi": num(iv.q_hi),
                "one_sided": iv.one_sided.map(|s| format!("{s:?}").to_lowercase()),
            },
        })),
        out,
    )
}

fn cmd_binned(a: &BinnedArgs, out: Option<&Path>) -> Outcome {
    let model = model_arg(&a.model)?;
    let ctx = a.data.display().to_string();
    let text = std::fs::read_to_string(&a.data).map_err(|e| Failure::from_core(e.into(), &ctx))?;
    let (edges, counts) = parse_binned(&text).ctx(&ctx)?;
    let data = BinnedSample::new(edges, counts).ctx(&ctx)?;
    let estimate = binned_fidelity_estimate(&model, &data).ctx("binned")?;
    let r = binned_fidelity_median(&model, &data, a.replicates, a.seed).usage("--replicates")?;
    let mut body = report_json(&r);
    body.insert("f_estimate".into(), num(estimate));
    body.insert("replicates".into(), json!(a.replicates));
    body.insert("seed".into(), json!(a.seed));
    emit(body, out)
}

fn cmd_gof2d(a: &Gof2dArgs, out: Option<&Path>) -> Outcome {
    let model = Elliptical2D::parse(&a.model).usage("--model")?;
    let method = TransformMethod::parse(&a.method).usage("--method")?;
    let ctx = a.data.display().to_string();
    let text = std::fs::read_to_string(&a.data).map_err(|e| Failure::from_core(e.into(), &ctx))?;
    let pts = PointSet2D::new(parse_points(&text).ctx(&ctx)?).ctx(&ctx)?;
    let r = concordance_2d(&model, &pts, method).ctx("gof2d")?;
    let mut body = report_json(&r);
    body.insert("method".into(), json!(method.name()));
    emit(body, out)
}

fn parse_n_list(s: &str) -> Result<Vec<usize>, Failure> {
    let bad = |p: &str| Failure::usage(format!("bad size '{p}'"), "--n-list");
    let mut v = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: usize = lo.trim().parse().map_err(|_| bad(part))?;
                let hi: usize = hi.trim().parse().map_err(|_| bad(part))?;
                if lo > hi {
                    return Err(bad(part));
                }
                v.extend(lo..=hi);
            }
            None => v.push(part.parse().map_err(|_| bad(part))?),
        }
    }
    Ok(v)
}

fn cmd_null_table(a: &NullTableArgs, out: Option<&Path>) -> Outcome {
    let kind = GeometryKind::parse(&a.geometry).usage("--geometry")?;
    let sizes = match (a.n, &a.n_list) {
        (Some(n), _) => vec![n],
        (None, Some(l)) => parse_n_list(l)?,
        (None, None) => return Err(Failure::usage("give --n or --n-list", "null-table")),
    };
    let mut text = String::from("n\tmu\tsigma\talpha\tbeta\n");
    for n in sizes {
        let row = table_row(&null_approx(n, kind).usage("--n")?);
        text += &format!("{n}\t{}\n", row.join("\t"));
    }
    emit_text(&text, out)
}

fn cmd_experiment(a: &ExperimentArgs, out: Option<&Path>) -> Outcome {
    let name = ExperimentName::parse(&a.name).usage("--name")?;
    let dir: PathBuf = out.ok_or_else(|| Failure::usage("experiment needs --out DIR", "--out"))?.to_path_buf();
    let mut cfg = ExperimentConfig::new(name, a.seed);
    if a.quick {
        cfg = cfg.quick();
    }
    if let Some(r) = a.realizations {
        cfg = cfg.with_realizations(r);
    }
    for kv in &a.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| Failure::usage(format!("expected key=value, got '{kv}'"), "--set"))?;
        cfg = cfg.with_override(k.trim(), v.trim());
    }
    let summary = run(&cfg, &dir).ctx(&dir.display().to_string())?;
    let text = serde_json::to_string_pretty(&summary.to_json()).expect("json") + "\n";
    emit_text(&text, None)
}
