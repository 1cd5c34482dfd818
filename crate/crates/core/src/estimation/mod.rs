//! Fidelity-maximizing estimation, concordance landscapes and joint fits of
//! two datasets.

mod search;
mod statistics;

pub use search::{optimize, Axis, Optimum, ParamBox, Scale, SearchOptions};
pub use statistics::{cumulative_statistic, statistic_value, Sense, StatisticId};

use crate::distributions::{Family, ModelDistribution, Params, Sample};
use crate::error::{domain, param, Error, Result, Warning};
use crate::fidelity::{concordance, joint_fidelity, FidelityReport, JointComponent};
use rayon::prelude::*;
use std::f64::consts::TAU;

/// A family with some parameters fixed and the rest searched over a box.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub family: Family,
    pub fixed: Params,
    pub free: ParamBox,
}

impl FamilySpec {
    /// Parameter names may be aliases (`mu`, `sigma`); they are stored in
    /// canonical form.
    pub fn new(family: Family, fixed: Params, free: ParamBox) -> Result<FamilySpec> {
        let mut canon_fixed = Params::new();
        for (n, v) in fixed.iter() {
            canon_fixed.set(family.canonical_param(n)?, v);
        }
        let mut axes = Vec::new();
        for a in free.axes {
            let name = family.canonical_param(&a.name)?;
            if canon_fixed.get(name).is_some() {
                return Err(param(format!("parameter {name} is both fixed and free")));
            }
            axes.push(Axis { name: name.to_string(), ..a });
        }
        Ok(FamilySpec { family, fixed: canon_fixed, free: ParamBox::new(axes)? })
    }

    /// Free parameters `names` with default boxes derived from the sample;
    /// everything else fixed at `fixed` or the reference values.
    pub fn with_default_box(family: Family, fixed: Params, names: &[&str], sample: &Sample) -> Result<FamilySpec> {
        let axes = names
            .iter()
            .map(|n| default_axis(family, family.canonical_param(n)?, sample))
            .collect::<Result<Vec<_>>>()?;
        FamilySpec::new(family, fixed, ParamBox::new(axes)?)
    }

    /// Model at free-parameter values `x` (in box order).
    pub fn build(&self, x: &[f64]) -> Result<ModelDistribution> {
        let mut p = self.fixed.clone();
        for (a, &v) in self.free.axes.iter().zip(x) {
            p.set(&a.name, v);
        }
        ModelDistribution::new(self.family, &p)
    }
}

/// Default search axis: log-spaced over ±1.5 decades around the reference
/// value for positive parameters, the data range widened on both sides for
/// locations, the full turn for circular locations.
pub fn default_axis(family: Family, name: &str, sample: &Sample) -> Result<Axis> {
    let (beta_ref, alpha_ref) = family.reference();
    if family.is_positive_param(name) {
        let centre = if name == "alpha" { alpha_ref } else { beta_ref.unwrap_or(1.0) };
        let k = 10f64.powf(1.5);
        return Axis::log(name, centre / k, centre * k);
    }
    if family.is_circular() {
        return Axis::linear(name, 0.0, TAU);
    }
    let v = sample.values();
    let (lo, hi) = (v[0], v[v.len() - 1]);
    let pad = (hi - lo).max(alpha_ref);
    Axis::linear(name, lo - pad, hi + pad)
}

/// Outcome of a fit. `f` and `p` are the concordance of the fitted model,
/// whatever statistic drove the fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: Params,
    pub statistic: StatisticId,
    /// Statistic value at the optimum.
    pub value: f64,
    pub f: f64,
    pub p: f64,
    pub evaluations: usize,
    pub trace: Option<Vec<(Vec<f64>, f64)>>,
    pub warnings: Vec<Warning>,
}

fn full_params(spec: &FamilySpec, x: &[f64]) -> Params {
    let mut p = spec.fixed.clone();
    for (a, &v) in spec.free.axes.iter().zip(x) {
        p.set(&a.name, v);
    }
    p
}

/// Extremize `statistic` over the free parameters of `spec`.
pub fn fit(statistic: StatisticId, spec: &FamilySpec, sample: &Sample, opts: &SearchOptions) -> Result<FitResult> {
    if spec.free.dim() == 0 {
        return Err(domain("no free parameters"));
    }
    let objective = |x: &[f64]| {
        spec.build(x).and_then(|m| statistic_value(statistic, &m, sample)).unwrap_or(f64::NAN)
    };
    // Surface geometry errors rather than reporting them as no-fit.
    let probe = spec.build(&spec.free.values(&vec![0.5; spec.free.dim()]));
    if let Ok(m) = &probe {
        if !statistic.applies_to(m.geometry().kind()) || !m.geometry().compatible(&sample.geometry()) {
            statistic_value(statistic, m, sample)?;
        }
    }
    let o = optimize(objective, statistic.sense(), &spec.free, opts)?;
    let model = spec.build(&o.x)?;
    let report = concordance(&model, sample)?;
    Ok(FitResult {
        params: full_params(spec, &o.x),
        statistic,
        value: o.value,
        f: report.f,
        p: report.p,
        evaluations: o.evaluations,
        trace: o.trace,
        warnings: report.warnings,
    })
}

/// Concordance over a dense grid, last axis varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Landscape {
    pub axes: Vec<(String, Vec<f64>)>,
    pub f: Vec<f64>,
    pub p: Vec<f64>,
}

impl Landscape {
    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    /// Axis values of cell `i`.
    pub fn point(&self, mut i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.axes.len()];
        for (k, (_, vals)) in self.axes.iter().enumerate().rev() {
            out[k] = vals[i % vals.len()];
            i /= vals.len();
        }
        out
    }
}

pub const DEFAULT_LANDSCAPE_CAP: usize = 1_000_000;

/// Fidelity and p at every node of the grid spanned by `spec.free`.
/// Invalid parameter combinations give f = −∞, p = 0.
pub fn landscape(spec: &FamilySpec, sample: &Sample, cap: usize) -> Result<Landscape> {
    let cells = spec.free.cells();
    if cells > cap {
        return Err(Error::CapExceeded(format!("{cells} grid cells exceed the cap of {cap}")));
    }
    let axes: Vec<(String, Vec<f64>)> = spec.free.axes.iter().map(|a| (a.name.clone(), a.grid())).collect();
    let shape = Landscape { axes, f: Vec::new(), p: Vec::new() };
    let values: Vec<(f64, f64)> = (0..cells)
        .into_par_iter()
        .map(|i| {
            let x = shape.point(i);
            match spec.build(&x).and_then(|m| concordance(&m, sample)) {
                Ok(r) => (r.f, r.p),
                Err(_) => (f64::NEG_INFINITY, 0.0),
            }
        })
        .collect();
    let (f, p) = values.into_iter().unzip();
    Ok(Landscape { f, p, ..shape })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sharing {
    Shared,
    Separate,
}

/// Which free parameters the two datasets share. Unlisted parameters are
/// separate.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SharingSpec(pub Vec<(String, Sharing)>);

impl SharingSpec {
    pub fn new(entries: &[(&str, Sharing)]) -> Result<SharingSpec> {
        if entries.is_empty() {
            return Err(domain("sharing spec declares no parameters"));
        }
        Ok(SharingSpec(entries.iter().map(|(n, s)| (n.to_string(), *s)).collect()))
    }

    pub fn all(names: &[&str], sharing: Sharing) -> Result<SharingSpec> {
        SharingSpec::new(&names.iter().map(|n| (*n, sharing)).collect::<Vec<_>>())
    }
}

/// Joint fit of two datasets.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSampleFit {
    pub params1: Params,
    pub params2: Params,
    pub report1: FidelityReport,
    pub report2: FidelityReport,
    pub joint: FidelityReport,
    pub evaluations: usize,
}

enum Slot {
    Shared(usize),
    Own(usize),
}

/// Maximize the joint fidelity of two datasets over shared and separate
/// parameters. Fits with nothing shared split into two independent fits.
pub fn two_sample_fit(
    spec1: &FamilySpec,
    spec2: &FamilySpec,
    sharing: &SharingSpec,
    s1: &Sample,
    s2: &Sample,
    opts: &SearchOptions,
) -> Result<TwoSampleFit> {
    let mut shared: Vec<String> = Vec::new();
    for (name, s) in &sharing.0 {
        let c1 = spec1.family.canonical_param(name)?;
        let c2 = spec2.family.canonical_param(name)?;
        let in1 = spec1.free.axes.iter().any(|a| a.name == c1);
        let in2 = spec2.free.axes.iter().any(|a| a.name == c2);
        if !in1 && !in2 {
            return Err(param(format!("parameter {name} is not free in either model")));
        }
        if *s == Sharing::Shared {
            if !(in1 && in2) || c1 != c2 {
                return Err(param(format!("shared parameter {name} must be free in both models")));
            }
            shared.push(c1.to_string());
        }
    }

    let (n1, n2) = (s1.len() as f64, s2.len() as f64);
    if shared.is_empty() {
        let a = fit(StatisticId::Fidelity, spec1, s1, opts)?;
        let b = fit(StatisticId::Fidelity, spec2, s2, opts)?;
        return finish(spec1, spec2, a.params, b.params, s1, s2, a.evaluations + b.evaluations);
    }

    let mut axes: Vec<Axis> = Vec::new();
    for name in &shared {
        axes.push(spec1.free.axes.iter().find(|a| &a.name == name).unwrap().clone());
    }
    let mut slots = |spec: &FamilySpec, tag: &str| -> Vec<Slot> {
        spec.free
            .axes
            .iter()
            .map(|a| match shared.iter().position(|s| s == &a.name) {
                Some(k) => Slot::Shared(k),
                None => {
                    axes.push(Axis { name: format!("{}_{tag}", a.name), ..a.clone() });
                    Slot::Own(axes.len() - 1)
                }
            })
            .collect()
    };
    let slots1 = slots(spec1, "1");
    let slots2 = slots(spec2, "2");
    let bx = ParamBox::new(axes)?;
    let pick = |slots: &[Slot], x: &[f64]| -> Vec<f64> {
        slots.iter().map(|s| match s {
            Slot::Shared(k) | Slot::Own(k) => x[*k],
        }).collect()
    };
    let objective = |x: &[f64]| -> f64 {
        let f1 = spec1.build(&pick(&slots1, x)).and_then(|m| concordance_f(&m, s1));
        let f2 = spec2.build(&pick(&slots2, x)).and_then(|m| concordance_f(&m, s2));
        match (f1, f2) {
            (Ok(a), Ok(b)) => (n1 * a + n2 * b) / (n1 + n2),
            _ => f64::NAN,
        }
    };
    let o = optimize(objective, Sense::Maximize, &bx, opts)?;
    let p1 = full_params(spec1, &pick(&slots1, &o.x));
    let p2 = full_params(spec2, &pick(&slots2, &o.x));
    finish(spec1, spec2, p1, p2, s1, s2, o.evaluations)
}

fn concordance_f(m: &ModelDistribution, s: &Sample) -> Result<f64> {
    let c = crate::distributions::cumulative_map(m, s)?;
    Ok(crate::fidelity::fidelity(c.values(), c.kind()))
}

fn finish(
    spec1: &FamilySpec,
    spec2: &FamilySpec,
    params1: Params,
    params2: Params,
    s1: &Sample,
    s2: &Sample,
    evaluations: usize,
) -> Result<TwoSampleFit> {
    let report1 = concordance(&ModelDistribution::new(spec1.family, &params1)?, s1)?;
    let report2 = concordance(&ModelDistribution::new(spec2.family, &params2)?, s2)?;
    let mut joint = joint_fidelity(&[
        JointComponent::new(report1.f, s1.len(), s1.geometry().kind()),
        JointComponent::new(report2.f, s2.len(), s2.geometry().kind()),
    ])?;
    joint.warnings = report1.warnings.iter().chain(&report2.warnings).cloned().collect();
    Ok(TwoSampleFit { params1, params2, report1, report2, joint, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss_mu(sample: &Sample) -> FamilySpec {
        FamilySpec::with_default_box(Family::Gauss, Params::new().with("sigma", 1.0), &["mu"], sample).unwrap()
    }

    #[test]
    fn single_point_is_centred() {
        let s = Sample::line(vec![2.5]).unwrap();
        let r = fit(StatisticId::Fidelity, &gauss_mu(&s), &s, &SearchOptions::default()).unwrap();
        assert!((r.params.get("beta").unwrap() - 2.5).abs() < 1e-5);
        assert!(r.f > -1e-9 && r.p > 1.0 - 1e-6);
    }

    #[test]
    fn three_points_fit_symmetrically() {
        let s = Sample::line(vec![3.0, 5.0, 9.0]).unwrap();
        let r = fit(StatisticId::Fidelity, &gauss_mu(&s), &s, &SearchOptions::default()).unwrap();
        let m = ModelDistribution::new(Family::Gauss, &r.params).unwrap();
        let c = crate::distributions::cumulative_map(&m, &s).unwrap();
        assert!(r.f <= 0.0 && r.p > 0.0);
        assert!(c.values()[0] < 0.5 && c.values()[2] > 0.5);
    }

    #[test]
    fn ties_are_no_fit() {
        let s = Sample::line(vec![1.0, 1.0]).unwrap();
        let r = fit(StatisticId::Fidelity, &gauss_mu(&s), &s, &SearchOptions::default());
        assert!(matches!(r, Err(Error::NoFit(_))));
    }

    #[test]
    fn geometry_mismatch_is_reported() {
        let s = Sample::line(vec![1.0, 2.0]).unwrap();
        let r = fit(StatisticId::Watson, &gauss_mu(&s), &s, &SearchOptions::default());
        assert!(matches!(r, Err(Error::Geometry(_))));
    }

    #[test]
    fn single_cell_landscape_matches_concordance() {
        let s = Sample::line(vec![-0.3, 0.4, 1.1]).unwrap();
        let bx = ParamBox::new(vec![Axis::linear("mu", 0.0, 1.0).unwrap().with_points(1).unwrap()]).unwrap();
        let spec = FamilySpec::new(Family::Gauss, Params::new().with("sigma", 1.0), bx).unwrap();
        let l = landscape(&spec, &s, DEFAULT_LANDSCAPE_CAP).unwrap();
        let m = ModelDistribution::new(Family::Gauss, &Params::new().with("beta", 0.5)).unwrap();
        let r = concordance(&m, &s).unwrap();
        assert_eq!((l.f[0], l.p[0]), (r.f, r.p));
        assert!(matches!(landscape(&spec, &s, 0), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn separate_fit_decomposes() {
        let a = Sample::line(vec![-1.0, 0.2, 0.9]).unwrap();
        let b = Sample::line(vec![3.0, 4.5]).unwrap();
        let spec = FamilySpec::new(
            Family::Gauss,
            Params::new().with("sigma", 1.0),
            ParamBox::new(vec![Axis::linear("mu", -5.0, 8.0).unwrap()]).unwrap(),
        )
        .unwrap();
        let sep = SharingSpec::all(&["mu"], Sharing::Separate).unwrap();
        let r = two_sample_fit(&spec, &spec, &sep, &a, &b, &SearchOptions::default()).unwrap();
        let fa = fit(StatisticId::Fidelity, &spec, &a, &SearchOptions::default()).unwrap();
        assert_eq!(r.params1, fa.params);
        let shared = SharingSpec::all(&["mu"], Sharing::Shared).unwrap();
        let j = two_sample_fit(&spec, &spec, &shared, &a, &b, &SearchOptions::default()).unwrap();
        assert_eq!(j.params1.get("beta"), j.params2.get("beta"));
        assert!(j.joint.p < r.joint.p);
    }
}
