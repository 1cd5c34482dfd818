//! Parametrized models: pdf, cdf, quantile and sampling.

use super::circle_table::CircleTable;
use super::family::{Family, Params};
use super::sample::{reduce, Geometry, Sample};
use crate::error::{domain, param, Error, Result};
use crate::quadrature::integrate_any;
use crate::roots::solve_increasing;
use crate::special::{
    bessel_i0_scaled, erfc, ln_gamma, normal_cdf, normal_quantile, regularized_beta,
    regularized_gamma_p, regularized_gamma_q,
};
use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A density supplied by the caller, with an optional closed-form cdf.
#[derive(Clone)]
pub struct UserModel {
    pub name: String,
    pub pdf: RealFn,
    pub cdf: Option<RealFn>,
    /// Support `(lo, hi)` on the line; ignored on the circle.
    pub support: (f64, f64),
    pub geometry: Geometry,
}

impl UserModel {
    pub fn line(
        name: &str,
        support: (f64, f64),
        pdf: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> UserModel {
        UserModel {
            name: name.to_string(),
            pdf: Arc::new(pdf),
            cdf: None,
            support,
            geometry: Geometry::line(),
        }
    }

    /// Density on `[0, period)`, cdf measured from 0.
    pub fn circle(
        name: &str,
        period: f64,
        pdf: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<UserModel> {
        Ok(UserModel {
            name: name.to_string(),
            pdf: Arc::new(pdf),
            cdf: None,
            support: (0.0, period),
            geometry: Geometry::circle(period)?,
        })
    }

    pub fn with_cdf(mut self, cdf: impl Fn(f64) -> f64 + Send + Sync + 'static) -> UserModel {
        self.cdf = Some(Arc::new(cdf));
        self
    }
}

#[derive(Clone)]
enum Kernel {
    Theta { s: f64, alpha: f64 },
    VonMises { kappa: f64, norm: f64, table: Arc<CircleTable> },
    WrappedLaplace { alpha: f64, a: f64, b: f64, scale: f64 },
    UniformCircle,
    Beta { a: f64, b: f64, ln_norm: f64 },
    Cauchy { loc: f64, scale: f64 },
    Exponential { rate: f64 },
    ExtremeValue { loc: f64, scale: f64 },
    FRatio { d1: f64, d2: f64, ln_norm: f64 },
    Gamma { shape: f64, scale: f64 },
    Gauss { mean: f64, sd: f64 },
    InverseGamma { shape: f64, scale: f64 },
    Laplace { loc: f64, scale: f64 },
    Levy { loc: f64, scale: f64 },
    Logistic { loc: f64, scale: f64 },
    Pareto { shape: f64, scale: f64 },
    Rayleigh { scale: f64 },
    Student { nu: f64, ln_norm: f64 },
    Weibull { shape: f64, scale: f64 },
    UniformLine { lo: f64, hi: f64 },
    Binomial { n: u64, q: f64 },
    User { model: UserModel, total: f64, table: Option<Arc<CircleTable>> },
}

/// A fully specified probability model on the line or the circle.
#[derive(Clone)]
pub struct ModelDistribution {
    family: Family,
    params: Params,
    geometry: Geometry,
    origin: f64,
    support: (f64, f64),
    kernel: Kernel,
}

impl fmt::Debug for ModelDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelDistribution")
            .field("family", &self.family)
            .field("params", &self.params)
            .field("geometry", &self.geometry)
            .field("origin", &self.origin)
            .finish()
    }
}

fn positive(family: Family, name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(param(format!("{family} requires {name} > 0, got {v}")))
    }
}

fn finite(family: Family, name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(param(format!("{family} requires finite {name}, got {v}")))
    }
}

// x^e with 0^0 := 1, in log space.
fn xlogy(e: f64, x: f64) -> f64 {
    if e == 0.0 {
        0.0
    } else {
        e * x.ln()
    }
}

fn von_mises_table(kappa: f64) -> Arc<CircleTable> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<CircleTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = kappa.to_bits();
    if let Some(t) = cache.lock().unwrap().get(&key) {
        return t.clone();
    }
    let t = Arc::new(CircleTable::build(|u| (kappa * (u.cos() - 1.0)).exp(), TAU));
    let mut guard = cache.lock().unwrap();
    if guard.len() > 20_000 {
        guard.clear();
    }
    guard.insert(key, t.clone());
    t
}

impl ModelDistribution {
    /// Build a catalogue family. Missing parameters take the reference values.
    pub fn new(family: Family, params: &Params) -> Result<ModelDistribution> {
        let mut full = family.default_params();
        for (name, v) in params.iter() {
            let canon = family.canonical_param(name)?;
            full.set(canon, v);
        }
        let get = |n: &str| full.get(n).unwrap_or(f64::NAN);
        let beta = get("beta");
        let alpha = get("alpha");
        let line = Geometry::line();
        let inf = f64::INFINITY;
        let (kernel, geometry, support, origin) = match family {
            Family::Theta => {
                finite(family, "beta", beta)?;
                positive(family, "alpha", alpha)?;
                (Kernel::Theta { s: (1.0 + alpha).sqrt(), alpha }, Geometry::angles(), (0.0, TAU), beta)
            }
            Family::VonMises => {
                finite(family, "beta", beta)?;
                positive(family, "alpha", alpha)?;
                let norm = 1.0 / (TAU * bessel_i0_scaled(alpha));
                let table = von_mises_table(alpha);
                (Kernel::VonMises { kappa: alpha, norm, table }, Geometry::angles(), (0.0, TAU), beta)
            }
            Family::WrappedLaplace => {
                positive(family, "beta", beta)?;
                positive(family, "alpha", alpha)?;
                let kernel = Kernel::WrappedLaplace {
                    alpha,
                    a: beta * alpha,
                    b: beta / alpha,
                    scale: beta * alpha / (1.0 + alpha * alpha),
                };
                (kernel, Geometry::angles(), (0.0, TAU), 0.0)
            }
            Family::Beta => {
                positive(family, "beta", beta)?;
                positive(family, "alpha", alpha)?;
                let ln_norm = ln_gamma(alpha + beta) - ln_gamma(alpha) - ln_gamma(beta);
                (Kernel::Beta { a: alpha, b: beta, ln_norm }, line, (0.0, 1.0), 0.0)
            }
            Family::Cauchy => {
                finite(family, "beta", beta)?;
                positive(family, "alpha", alpha)?;
                (Kernel::Cauchy { loc: beta, scale: alpha }, line, (-inf, inf), 0.0)
            }
            Family::Exponential => {
                positive(family, "alpha", alpha)?;
                (Kernel::Exponential { rate: alpha }, line, (0.0, inf), 0.0)
            }
            Family::ExtremeValue => {
                finite(family, "beta", beta)?;
                positive(family, "alpha", alpha)?;
                (Kernel::ExtremeValue { loc: beta, scale: alpha }, line, (-inf, inf), 0.0)
            }
            Family::FRatio => {
                positive(family, "beta", beta)?;
                positive(family, "alpha", alpha)?;
                let (d1, d2) = (alpha, beta);
                let ln_norm = ln_gamma(0.5 * (d1 + d2)) - ln_gamma(0.5 * d1) - ln_gamma(0.5 * d2)
                    + 0.5 * d1 * d1.ln()
                    + 0.5 * d2 * d2.ln();
                (Kernel::FRatio { d1, d2, ln_norm }, line, (0.0, inf), 0.0)
            }
            Family::Gamma => {
                positive(family, "beta", beta)?;
                positive(family, "alpha", alpha)?;
                (Kernel::Gamma { shape: beta, scale: alpha }, line, (0.0, inf), 0.0)
            }
            Family::Gauss => {
                finite(family, "beta", beta)?;
                positive(family, "alpha", alpha)?;
                (Kernel::Gauss { mean: beta, sd: alpha }, line, (-inf, inf), 0.0)
            }
            Family::InverseGamma => {
                positive(family, "beta", beta)?;
                positive(family, "alpha", alpha)?;
                (Kernel::InverseGamma { shape: beta, scale: alpha }, line, (0.0, inf), 0.0)
            }
            Family::Laplace => {
                finite(family, "beta", beta)?;
                positive(family, "alpha", alpha)?;
                (Kernel::Laplace { loc: beta, scale: alpha }, line, (-inf, inf), 0.0)
            }
            Family::Levy => {
                finite(family, "beta", beta)?;
                positive(family, "alpha", alpha)?;
                (Kernel::Levy { loc: beta, scale: alpha }, line, (beta, inf), 0.0)
            }
            Family::Logistic => {
                finite(family, "beta", beta)?;
                positive(family, "alpha", alpha)?;
                (Kernel::Logistic { loc: beta, scale: alpha }, line, (-inf, inf), 0.0)
            }
            Family::Pareto => {
                positive(family, "beta", beta)?;
                positive(family, "alpha", alpha)?;
                (Kernel::Pareto { shape: beta, scale: alpha }, line, (alpha, inf), 0.0)
            }
            Family::Rayleigh => {
                positive(family, "alpha", alpha)?;
                (Kernel::Rayleigh { scale: alpha }, line, (0.0, inf), 0.0)
            }
            Family::Student => {
                positive(family, "alpha", alpha)?;
                let nu = alpha;
                let ln_norm = ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * PI).ln();
                (Kernel::Student { nu, ln_norm }, line, (-inf, inf), 0.0)
            }
            Family::Weibull => {
                positive(family, "beta", beta)?;
                positive(family, "alpha", alpha)?;
                (Kernel::Weibull { shape: alpha, scale: beta }, line, (0.0, inf), 0.0)
            }
            Family::Uniform => {
                let lo = finite(family, "lo", get("lo"))?;
                let hi = finite(family, "hi", get("hi"))?;
                if !(lo < hi) {
                    return Err(param(format!("uniform requires lo < hi, got [{lo}, {hi}]")));
                }
                (Kernel::UniformLine { lo, hi }, line, (lo, hi), 0.0)
            }
            Family::Binomial => {
                let n = get("n");
                let q = get("q");
                if !(n >= 0.0 && n.fract() == 0.0 && n.is_finite()) {
                    return Err(param(format!("binomial n must be a nonnegative integer, got {n}")));
                }
                if !(0.0..=1.0).contains(&q) {
                    return Err(param(format!("binomial q must lie in [0, 1], got {q}")));
                }
                (Kernel::Binomial { n: n as u64, q }, line, (0.0, n), 0.0)
            }
            Family::UserDefined => {
                return Err(param("user-defined models are built with ModelDistribution::user_defined"))
            }
        };
        Ok(ModelDistribution { family, params: full, geometry, origin, support, kernel })
    }

    /// Uniform distribution on `[lo, hi]`.
    pub fn uniform_line(lo: f64, hi: f64) -> Result<ModelDistribution> {
        ModelDistribution::new(Family::Uniform, &Params::new().with("lo", lo).with("hi", hi))
    }

    /// Uniform distribution on a circle of the given period, origin 0.
    pub fn uniform_circle(period: f64) -> Result<ModelDistribution> {
        let geometry = Geometry::circle(period)?;
        Ok(ModelDistribution {
            family: Family::Uniform,
            params: Params::new(),
            geometry,
            origin: 0.0,
            support: (0.0, period),
            kernel: Kernel::UniformCircle,
        })
    }

    pub fn binomial(n: u64, q: f64) -> Result<ModelDistribution> {
        ModelDistribution::new(Family::Binomial, &Params::new().with("n", n as f64).with("q", q))
    }

    pub fn user_defined(model: UserModel) -> Result<ModelDistribution> {
        let geometry = model.geometry;
        let (lo, hi) = match geometry.period() {
            Some(p) => (0.0, p),
            None => model.support,
        };
        if !(lo < hi) {
            return Err(param("user-defined support must satisfy lo < hi"));
        }
        let (total, table) = match (geometry.period(), &model.cdf) {
            (Some(p), None) => {
                let pdf = model.pdf.clone();
                (1.0, Some(Arc::new(CircleTable::build(move |u| pdf(u), p))))
            }
            (None, None) => {
                let pdf = model.pdf.clone();
                let t = integrate_any(move |x| pdf(x), lo, hi, 1e-13);
                if !(t > 0.0) || !t.is_finite() {
                    return Err(param("user-defined density does not integrate to a positive value"));
                }
                (t, None)
            }
            _ => (1.0, None),
        };
        Ok(ModelDistribution {
            family: Family::UserDefined,
            params: Params::new(),
            geometry,
            origin: 0.0,
            support: (lo, hi),
            kernel: Kernel::User { model, total, table },
        })
    }

    /// Parse a key=value model specification, e.g. `family=gauss beta=0 alpha=1`.
    pub fn from_spec(spec: &str) -> Result<ModelDistribution> {
        super::io::parse_model_spec(spec)
    }

    /// Move the circle origin (where c = 0).
    pub fn with_origin(mut self, origin: f64) -> Result<ModelDistribution> {
        if !self.geometry.is_circle() {
            return Err(domain("an origin can only be set on the circle"));
        }
        if !origin.is_finite() {
            return Err(domain("origin must be finite"));
        }
        self.origin = origin;
        Ok(self)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    /// Circle origin; 0 on the line.
    pub fn origin(&self) -> f64 {
        self.origin
    }

    /// Support `(lo, hi)` on the line, `(0, period)` on the circle.
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.kernel, Kernel::Binomial { .. })
    }

    // Position relative to the origin in [0, period).
    fn phase(&self, x: f64) -> f64 {
        reduce(x - self.origin, self.support.1)
    }

    fn check_line(&self, x: f64) -> Result<()> {
        if x.is_nan() || x < self.support.0 || x > self.support.1 {
            return Err(Error::OutsideSupport { value: x });
        }
        Ok(())
    }

    /// Probability density (or mass, for the binomial) at `x`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        if self.geometry.is_circle() {
            if !x.is_finite() {
                return Err(Error::OutsideSupport { value: x });
            }
            return Ok(self.circle_pdf(self.phase(x)));
        }
        self.check_line(x)?;
        if x.is_infinite() {
            return Ok(0.0);
        }
        Ok(self.line_pdf(x))
    }

    fn circle_pdf(&self, u: f64) -> f64 {
        match &self.kernel {
            Kernel::Theta { s, alpha } => {
                let sn = u.sin();
                s / (TAU * (1.0 + alpha * sn * sn))
            }
            Kernel::VonMises { kappa, norm, .. } => norm * (kappa * (u.cos() - 1.0)).exp(),
            Kernel::WrappedLaplace { a, b, scale, .. } => {
                // e^{b u}/(e^{2πb} − 1) written as e^{b(u−2π)}/(1 − e^{−2πb}).
                scale
                    * ((-a * u).exp() / -(-TAU * a).exp_m1()
                        + (b * (u - TAU)).exp() / -(-TAU * b).exp_m1())
            }
            Kernel::UniformCircle => 1.0 / self.support.1,
            Kernel::User { model, .. } => (model.pdf)(u),
            _ => unreachable!("line kernel on circle"),
        }
    }

    fn line_pdf(&self, x: f64) -> f64 {
        match &self.kernel {
            Kernel::Beta { a, b, ln_norm } => {
                (ln_norm + xlogy(a - 1.0, x) + xlogy(b - 1.0, 1.0 - x)).exp()
            }
            Kernel::Cauchy { loc, scale } => {
                let z = (x - loc) / scale;
                1.0 / (PI * scale * (1.0 + z * z))
            }
            Kernel::Exponential { rate } => rate * (-rate * x).exp(),
            Kernel::ExtremeValue { loc, scale } => {
                let z = (x - loc) / scale;
                (-z - (-z).exp()).exp() / scale
            }
            Kernel::FRatio { d1, d2, ln_norm } => {
                if x == 0.0 {
                    return if *d1 < 2.0 {
                        f64::INFINITY
                    } else if *d1 == 2.0 {
                        ln_norm.exp() / d2
                    } else {
                        0.0
                    };
                }
                (ln_norm + (0.5 * d1 - 1.0) * x.ln() - 0.5 * (d1 + d2) * (d2 + d1 * x).ln()).exp()
            }
            Kernel::Gamma { shape, scale } => {
                let y = x / scale;
                (xlogy(shape - 1.0, y) - y - ln_gamma(*shape)).exp() / scale
            }
            Kernel::Gauss { mean, sd } => {
                let z = (x - mean) / sd;
                (-0.5 * z * z).exp() / ((TAU).sqrt() * sd)
            }
            Kernel::InverseGamma { shape, scale } => {
                if x == 0.0 {
                    return 0.0;
                }
                let y = scale / x;
                (shape * y.ln() - y - ln_gamma(*shape)).exp() / x
            }
            Kernel::Laplace { loc, scale } => (-(x - loc).abs() / scale).exp() / (2.0 * scale),
            Kernel::Levy { loc, scale } => {
                let d = x - loc;
                if d <= 0.0 {
                    return 0.0;
                }
                (scale / TAU).sqrt() * (-scale / (2.0 * d)).exp() / d.powf(1.5)
            }
            Kernel::Logistic { loc, scale } => {
                let z = -((x - loc) / scale).abs();
                let e = z.exp();
                e / (scale * (1.0 + e) * (1.0 + e))
            }
            Kernel::Pareto { shape, scale } => shape * (shape * scale.ln() - (shape + 1.0) * x.ln()).exp(),
            Kernel::Rayleigh { scale } => {
                let s2 = scale * scale;
                x / s2 * (-x * x / (2.0 * s2)).exp()
            }
            Kernel::Student { nu, ln_norm } => {
                (ln_norm - 0.5 * (nu + 1.0) * (x * x / nu).ln_1p()).exp()
            }
            Kernel::Weibull { shape, scale } => {
                let y = x / scale;
                if y == 0.0 {
                    return if *shape < 1.0 {
                        f64::INFINITY
                    } else if *shape == 1.0 {
                        1.0 / scale
                    } else {
                        0.0
                    };
                }
                shape / scale * y.powf(shape - 1.0) * (-y.powf(*shape)).exp()
            }
            Kernel::UniformLine { lo, hi } => 1.0 / (hi - lo),
            Kernel::Binomial { n, q } => {
                if x.fract() != 0.0 {
                    return 0.0;
                }
                binomial_pmf(*n, *q, x as u64)
            }
            Kernel::User { model, total, .. } => (model.pdf)(x) / total,
            _ => unreachable!("circle kernel on line"),
        }
    }

    /// Cumulative probability. On the circle it is measured from the origin.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if self.geometry.is_circle() {
            if !x.is_finite() {
                return Err(Error::OutsideSupport { value: x });
            }
            let c = self.circle_cdf(self.phase(x));
            return Ok(if c >= 1.0 { 0.0 } else { c });
        }
        self.check_line(x)?;
        if x == f64::INFINITY {
            return Ok(1.0);
        }
        if x == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        Ok(self.line_cdf(x).clamp(0.0, 1.0))
    }

    fn circle_cdf(&self, u: f64) -> f64 {
        match &self.kernel {
            Kernel::Theta { s, .. } => {
                let v = (s * u.sin()).atan2(u.cos());
                let v = if v < 0.0 { v + TAU } else { v };
                v / TAU
            }
            Kernel::VonMises { table, .. } => table.cdf(u),
            Kernel::WrappedLaplace { alpha, a, b, .. } => {
                let w = 1.0 / (1.0 + alpha * alpha);
                let left = (-a * u).exp_m1() / (-TAU * a).exp_m1();
                let right = (b * (u - TAU)).exp() * (-b * u).exp_m1() / (-TAU * b).exp_m1();
                w * left + (1.0 - w) * right
            }
            Kernel::UniformCircle => u / self.support.1,
            Kernel::User { model, table, .. } => match (&model.cdf, table) {
                (Some(cdf), _) => cdf(u),
                (None, Some(t)) => t.cdf(u),
                _ => unreachable!(),
            },
            _ => unreachable!("line kernel on circle"),
        }
    }

    fn line_cdf(&self, x: f64) -> f64 {
        match &self.kernel {
            Kernel::Beta { a, b, .. } => regularized_beta(*a, *b, x).unwrap_or(f64::NAN),
            Kernel::Cauchy { loc, scale } => {
                let z = (x - loc) / scale;
                if z < 0.0 {
                    (-1.0 / z).atan() / PI
                } else {
                    0.5 + z.atan() / PI
                }
            }
            Kernel::Exponential { rate } => -(-rate * x).exp_m1(),
            Kernel::ExtremeValue { loc, scale } => (-(-(x - loc) / scale).exp()).exp(),
            Kernel::FRatio { d1, d2, .. } => {
                let y = d1 * x;
                regularized_beta(0.5 * d1, 0.5 * d2, y / (y + d2)).unwrap_or(f64::NAN)
            }
            Kernel::Gamma { shape, scale } => regularized_gamma_p(*shape, x / scale).unwrap_or(f64::NAN),
            Kernel::Gauss { mean, sd } => normal_cdf((x - mean) / sd),
            Kernel::InverseGamma { shape, scale } => {
                if x == 0.0 {
                    0.0
                } else {
                    regularized_gamma_q(*shape, scale / x).unwrap_or(f64::NAN)
                }
            }
            Kernel::Laplace { loc, scale } => {
                let z = (x - loc) / scale;
                if z < 0.0 {
                    0.5 * z.exp()
                } else {
                    1.0 - 0.5 * (-z).exp()
                }
            }
            Kernel::Levy { loc, scale } => {
                let d = x - loc;
                if d <= 0.0 {
                    0.0
                } else {
                    erfc((scale / (2.0 * d)).sqrt())
                }
            }
            Kernel::Logistic { loc, scale } => {
                let z = (x - loc) / scale;
                if z >= 0.0 {
                    1.0 / (1.0 + (-z).exp())
                } else {
                    let e = z.exp();
                    e / (1.0 + e)
                }
            }
            Kernel::Pareto { shape, scale } => -(shape * (scale / x).ln()).exp_m1(),
            Kernel::Rayleigh { scale } => -(-x * x / (2.0 * scale * scale)).exp_m1(),
            Kernel::Student { nu, .. } => {
                let tail = 0.5 * regularized_beta(0.5 * nu, 0.5, nu / (nu + x * x)).unwrap_or(f64::NAN);
                if x < 0.0 {
                    tail
                } else {
                    1.0 - tail
                }
            }
            Kernel::Weibull { shape, scale } => -(-(x / scale).powf(*shape)).exp_m1(),
            Kernel::UniformLine { lo, hi } => (x - lo) / (hi - lo),
            Kernel::Binomial { n, q } => {
                let k = x.floor();
                if k >= *n as f64 {
                    1.0
                } else {
                    crate::discrete::binomial_cumulative(*n, *q, k as u64).2
                }
            }
            Kernel::User { model, total, .. } => match &model.cdf {
                Some(cdf) => cdf(x),
                None => {
                    let pdf = model.pdf.clone();
                    integrate_any(move |t| pdf(t), self.support.0, x, 1e-13) / total
                }
            },
            _ => unreachable!("circle kernel on line"),
        }
    }

    /// Cdf on the line extended by 0 below and 1 above the support.
    pub fn cdf_clamped(&self, x: f64) -> Result<f64> {
        if !self.geometry.is_circle() {
            if x <= self.support.0 {
                return Ok(0.0);
            }
            if x >= self.support.1 {
                return Ok(1.0);
            }
        }
        self.cdf(x)
    }

    /// Value used by the cumulative mapping: the cdf, except for discrete
    /// models where the midpoint of the jump is used.
    pub fn cumulative_value(&self, x: f64) -> Result<f64> {
        if let Kernel::Binomial { n, q } = self.kernel {
            self.check_line(x)?;
            if x.fract() != 0.0 {
                return Err(Error::OutsideSupport { value: x });
            }
            return Ok(crate::discrete::binomial_cumulative(n, q, x as u64).1);
        }
        self.cdf(x)
    }

    /// Inverse cdf for `c` in (0, 1). On the circle the result lies in
    /// `[origin, origin + period)`.
    pub fn quantile(&self, c: f64) -> Result<f64> {
        if !(c > 0.0 && c < 1.0) {
            return Err(domain(format!("quantile requires 0 < c < 1, got {c}")));
        }
        if self.geometry.is_circle() {
            return Ok(self.origin + self.circle_quantile(c)?);
        }
        self.line_quantile(c)
    }

    fn circle_quantile(&self, c: f64) -> Result<f64> {
        let period = self.support.1;
        let u = match &self.kernel {
            Kernel::Theta { s, .. } => {
                let phi = TAU * c;
                let u = phi.sin().atan2(s * phi.cos());
                if u < 0.0 {
                    u + TAU
                } else {
                    u
                }
            }
            Kernel::VonMises { table, .. } => table.quantile(c),
            Kernel::UniformCircle => c * period,
            Kernel::User { model: UserModel { cdf: None, .. }, table: Some(t), .. } => t.quantile(c),
            _ => solve_increasing(|u| self.circle_cdf(u), c, 0.0, period, 0.5 * period)?,
        };
        Ok(u)
    }

    fn line_quantile(&self, c: f64) -> Result<f64> {
        let x = match &self.kernel {
            Kernel::Cauchy { loc, scale } => loc + scale * (PI * (c - 0.5)).tan(),
            Kernel::Exponential { rate } => -(-c).ln_1p() / rate,
            Kernel::ExtremeValue { loc, scale } => loc - scale * (-c.ln()).ln(),
            Kernel::Gauss { mean, sd } => mean + sd * normal_quantile(c)?,
            Kernel::Laplace { loc, scale } => {
                if c < 0.5 {
                    loc + scale * (2.0 * c).ln()
                } else {
                    loc - scale * (2.0 * (1.0 - c)).ln()
                }
            }
            Kernel::Levy { loc, scale } => {
                let z = normal_quantile(0.5 * c)?;
                loc + scale / (z * z)
            }
            Kernel::Logistic { loc, scale } => loc + scale * (c / (1.0 - c)).ln(),
            Kernel::Pareto { shape, scale } => scale * (-(-c).ln_1p() / shape).exp(),
            Kernel::Rayleigh { scale } => scale * (-2.0 * (-c).ln_1p()).sqrt(),
            Kernel::Weibull { shape, scale } => scale * (-(-c).ln_1p()).powf(1.0 / shape),
            Kernel::UniformLine { lo, hi } => lo + c * (hi - lo),
            Kernel::Binomial { n, .. } => {
                // Smallest k with cdf(k) >= c.
                let (mut a, mut b) = (0u64, *n);
                while a < b {
                    let m = a + (b - a) / 2;
                    if self.line_cdf(m as f64) >= c {
                        b = m;
                    } else {
                        a = m + 1;
                    }
                }
                a as f64
            }
            _ => {
                let start = match &self.kernel {
                    Kernel::Gamma { shape, scale } => shape * scale,
                    Kernel::InverseGamma { shape, scale } => scale / shape,
                    Kernel::Beta { a, b, .. } => a / (a + b),
                    Kernel::FRatio { .. } => 1.0,
                    Kernel::Student { .. } => 0.0,
                    _ => match self.support {
                        (lo, hi) if lo.is_finite() && hi.is_finite() => 0.5 * (lo + hi),
                        (lo, _) if lo.is_finite() => lo + 1.0,
                        (_, hi) if hi.is_finite() => hi - 1.0,
                        _ => 0.0,
                    },
                };
                let (lo, hi) = self.support;
                solve_increasing(|x| self.line_cdf(x), c, lo, hi, start)?
            }
        };
        Ok(x)
    }

    /// `n` independent draws by inverse-transform sampling.
    pub fn sample<R: rand::Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Sample> {
        if n == 0 {
            return Err(domain("cannot draw an empty sample"));
        }
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            values.push(self.quantile(crate::rng::open_unit(rng))?);
        }
        Sample::new(values, self.geometry)
    }
}

fn binomial_pmf(n: u64, q: f64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let (lo, _, hi) = crate::discrete::binomial_cumulative(n, q, k);
    hi - lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    fn model(f: Family) -> ModelDistribution {
        ModelDistribution::new(f, &f.default_params()).unwrap()
    }

    #[test]
    fn pdf_examples() {
        let g = model(Family::Gauss);
        assert!((g.pdf(0.0).unwrap() - 0.398_942_280_401_432_7).abs() < 1e-15);
        let e = model(Family::Exponential);
        assert_eq!(e.pdf(0.0).unwrap(), 1.0);
        let vm = ModelDistribution::new(Family::VonMises, &Params::new().with("beta", 0.0).with("alpha", 0.25))
            .unwrap();
        assert!((vm.pdf(0.0).unwrap() - 0.201_202_895_094_43).abs() < 1e-13);
        assert!(e.pdf(-1.0).is_err());
    }

    #[test]
    fn cdf_examples() {
        let g = model(Family::Gauss);
        assert!((g.cdf(0.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(model(Family::Exponential).cdf(f64::INFINITY).unwrap(), 1.0);
        let c = ModelDistribution::new(Family::Cauchy, &Params::new().with("beta", 0.0).with("alpha", 0.5))
            .unwrap();
        assert!((c.cdf(0.5).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(model(Family::Gauss).quantile(0.5).unwrap(), 0.0);
        let e = model(Family::Exponential);
        assert!((e.quantile(0.5).unwrap() - 2f64.ln()).abs() < 1e-15);
        let w = ModelDistribution::new(Family::Weibull, &Params::new().with("beta", 1.0).with("alpha", 2.0))
            .unwrap();
        assert!((w.quantile(0.5).unwrap() - 2f64.ln().sqrt()).abs() < 1e-12);
        assert!(e.quantile(0.0).is_err());
        assert!(e.quantile(1.0).is_err());
    }

    #[test]
    fn every_family_normalizes_and_inverts() {
        for f in Family::LINE.iter().chain(Family::CIRCLE.iter()) {
            let m = model(*f);
            let (lo, hi) = m.support();
            let total = integrate_any(|x| m.pdf(x).unwrap(), lo, hi, 1e-10);
            assert!((total - 1.0).abs() < 1e-6, "{f}: {total}");
            for i in 1..20 {
                let c = i as f64 / 20.0;
                let x = m.quantile(c).unwrap();
                assert!((m.cdf(x).unwrap() - c).abs() < 1e-10, "{f} at {c}");
            }
        }
    }

    #[test]
    fn closed_form_circle_cdfs_match_quadrature() {
        for f in Family::CIRCLE {
            let m = model(f);
            for i in 1..10 {
                let u = TAU * i as f64 / 10.0;
                let num = integrate(|t| m.pdf(m.origin() + t).unwrap(), 0.0, u, 1e-13);
                assert!((m.cdf(m.origin() + u).unwrap() - num).abs() < 1e-10, "{f} at {u}");
            }
        }
    }

    #[test]
    fn user_defined_matches_builtin() {
        let u = UserModel::line("gauss", (f64::NEG_INFINITY, f64::INFINITY), |x: f64| {
            (-0.5 * x * x).exp() / TAU.sqrt()
        });
        let m = ModelDistribution::user_defined(u).unwrap();
        let g = model(Family::Gauss);
        for &x in &[-2.0, -0.3, 0.0, 1.7] {
            assert!((m.cdf(x).unwrap() - g.cdf(x).unwrap()).abs() < 1e-10);
        }
        assert!((m.quantile(0.9).unwrap() - g.quantile(0.9).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn binomial_model() {
        let b = ModelDistribution::binomial(10, 0.3).unwrap();
        assert!((b.cdf(10.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(b.quantile(0.5).unwrap(), 3.0);
        let c = b.cumulative_value(3.0).unwrap();
        let lo = b.cdf(2.0).unwrap();
        let hi = b.cdf(3.0).unwrap();
        assert!((c - 0.5 * (lo + hi)).abs() < 1e-14);
        assert!(b.cumulative_value(2.5).is_err());
    }

    #[test]
    fn invalid_parameters() {
        assert!(ModelDistribution::new(Family::Gauss, &Params::new().with("alpha", -1.0)).is_err());
        assert!(ModelDistribution::new(Family::Gauss, &Params::new().with("nu", 1.0)).is_err());
        assert!(ModelDistribution::uniform_line(1.0, 1.0).is_err());
    }
}
