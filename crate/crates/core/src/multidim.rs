//! Two-dimensional concordance by inverse Monte Carlo: points are mapped back
//! to the uniform seeds of a forward simulation of the model and scored with
//! joint fidelity.

use crate::distributions::{CumulativeVector, GeometryKind};
use crate::error::{domain, param, Result, Warning};
use crate::fidelity::{collision_warnings, fidelity, joint_fidelity, FidelityReport, JointComponent};
use crate::quadrature::integrate_any;
use crate::roots::solve_increasing;
use crate::special::normal_cdf;
use std::f64::consts::{PI, TAU};

/// Radial profile of an elliptically symmetric model in standardized
/// coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialProfile {
    /// Density ∝ e^{−r²/2}.
    Gauss,
    /// Density ∝ e^{−r}.
    Exponential,
}

impl RadialProfile {
    pub fn name(self) -> &'static str {
        match self {
            RadialProfile::Gauss => "gauss2d",
            RadialProfile::Exponential => "exp2d",
        }
    }

    /// Probability that the standardized radius is at most `r`.
    pub fn radial_cdf(self, r: f64) -> f64 {
        match self {
            RadialProfile::Gauss => -(-0.5 * r * r).exp_m1(),
            RadialProfile::Exponential => 1.0 - (1.0 + r) * (-r).exp(),
        }
    }

    fn radial_pdf(self, r: f64) -> f64 {
        match self {
            RadialProfile::Gauss => r * (-0.5 * r * r).exp(),
            RadialProfile::Exponential => r * (-r).exp(),
        }
    }

    pub fn radial_quantile(self, c: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&c) {
            return Err(domain(format!("radial quantile needs 0 <= c < 1, got {c}")));
        }
        match self {
            RadialProfile::Gauss => Ok((-2.0 * (-c).ln_1p()).sqrt()),
            RadialProfile::Exponential => {
                if c == 0.0 {
                    return Ok(0.0);
                }
                solve_increasing(|r| self.radial_cdf(r), c, 0.0, f64::INFINITY, 1.0 + c)
            }
        }
    }

    /// Cdf of one standardized coordinate.
    pub fn marginal_cdf(self, u: f64) -> f64 {
        match self {
            RadialProfile::Gauss => normal_cdf(u),
            RadialProfile::Exponential => {
                let a = u.abs();
                // P(U > a) = (1/π) ∫_a^∞ f_R(r) arccos(a/r) dr
                let tail = if a == 0.0 {
                    0.5
                } else {
                    integrate_any(|r| self.radial_pdf(r) * (a / r).min(1.0).acos(), a, f64::INFINITY, 1e-13) / PI
                };
                if u >= 0.0 {
                    1.0 - tail
                } else {
                    tail
                }
            }
        }
    }
}

/// Elliptically symmetric 2D model: center, major and minor scales `a ≥ b`,
/// and major-axis angle `phi ∈ [0, π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Elliptical2D {
    pub profile: RadialProfile,
    pub x0: f64,
    pub y0: f64,
    pub a: f64,
    pub b: f64,
    pub phi: f64,
}

impl Elliptical2D {
    /// Scales are reordered so that `a ≥ b` (turning the axes by π/2) and
    /// `phi` is reduced into `[0, π)`; an isotropic model gets `phi = 0`.
    pub fn new(profile: RadialProfile, x0: f64, y0: f64, a: f64, b: f64, phi: f64) -> Result<Elliptical2D> {
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(param(format!("2D model needs positive finite scales, got a={a}, b={b}")));
        }
        if !(x0.is_finite() && y0.is_finite() && phi.is_finite()) {
            return Err(param("2D model needs a finite center and angle"));
        }
        let (a, b, phi) = if a >= b { (a, b, phi) } else { (b, a, phi + 0.5 * PI) };
        let phi = if a == b { 0.0 } else { phi.rem_euclid(PI) };
        let phi = if phi >= PI { 0.0 } else { phi };
        Ok(Elliptical2D { profile, x0, y0, a, b, phi })
    }

    pub fn gauss(x0: f64, y0: f64, a: f64, b: f64, phi: f64) -> Result<Elliptical2D> {
        Elliptical2D::new(RadialProfile::Gauss, x0, y0, a, b, phi)
    }

    pub fn exponential(x0: f64, y0: f64, a: f64, b: f64, phi: f64) -> Result<Elliptical2D> {
        Elliptical2D::new(RadialProfile::Exponential, x0, y0, a, b, phi)
    }

    /// Parse `gauss2d:x0=7,y0=3,a=3,b=2,phi=1.0472` (or `exp2d:…`).
    pub fn parse(spec: &str) -> Result<Elliptical2D> {
        let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let profile = match kind.trim().to_lowercase().as_str() {
            "gauss2d" | "gauss" => RadialProfile::Gauss,
            "exp2d" | "exponential2d" | "exponential" => RadialProfile::Exponential,
            other => return Err(param(format!("unknown 2D model '{other}'"))),
        };
        let (mut x0, mut y0, mut a, mut b, mut phi) = (0.0, 0.0, 1.0, 1.0, 0.0);
        for item in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| param(format!("expected key=value, got '{item}'")))?;
            let v: f64 = v.trim().parse().map_err(|_| param(format!("bad number in '{item}'")))?;
            match k.trim() {
                "x0" => x0 = v,
                "y0" => y0 = v,
                "a" => a = v,
                "b" => b = v,
                "phi" => phi = v,
                other => return Err(param(format!("unknown 2D parameter '{other}'"))),
            }
        }
        Elliptical2D::new(profile, x0, y0, a, b, phi)
    }

    /// Standardized coordinates: translated, rotated onto the axes, scaled.
    pub fn standardize(&self, (x, y): (f64, f64)) -> (f64, f64) {
        let (dx, dy) = (x - self.x0, y - self.y0);
        let (s, c) = self.phi.sin_cos();
        ((dx * c + dy * s) / self.a, (-dx * s + dy * c) / self.b)
    }

    /// Forward map from seeds `(u_r, u_θ)` in [0, 1)² to a point.
    pub fn forward(&self, u_r: f64, u_theta: f64) -> Result<(f64, f64)> {
        let r = self.profile.radial_quantile(u_r)?;
        let (st, ct) = (TAU * u_theta).sin_cos();
        let (u, v) = (self.a * r * ct, self.b * r * st);
        let (s, c) = self.phi.sin_cos();
        Ok((self.x0 + u * c - v * s, self.y0 + u * s + v * c))
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<PointSet2D> {
        let mut pts = Vec::with_capacity(n);
        for _ in 0..n {
            let u_r = rng.random::<f64>();
            let u_t = rng.random::<f64>();
            pts.push(self.forward(u_r, u_t)?);
        }
        PointSet2D::new(pts)
    }

    // Scales of the raw x and y marginals in standardized units.
    fn coordinate_scales(&self) -> (f64, f64) {
        let (s, c) = self.phi.sin_cos();
        ((self.a * c).hypot(self.b * s), (self.a * s).hypot(self.b * c))
    }
}

/// Observed points in the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet2D(Vec<(f64, f64)>);

impl PointSet2D {
    pub fn new(points: Vec<(f64, f64)>) -> Result<PointSet2D> {
        if points.is_empty() {
            return Err(domain("point set is empty"));
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(domain("point coordinates must be finite"));
        }
        Ok(PointSet2D(points))
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformMethod {
    /// Radius on the line, angle on the circle.
    RTheta,
    /// Independent cdfs along the model's own axes.
    ModelXy,
    /// Marginal cdfs of the raw x and y coordinates.
    CoordinateXy,
}

impl TransformMethod {
    pub fn name(self) -> &'static str {
        match self {
            TransformMethod::RTheta => "r-theta",
            TransformMethod::ModelXy => "model-xy",
            TransformMethod::CoordinateXy => "coordinate-xy",
        }
    }

    pub fn parse(s: &str) -> Result<TransformMethod> {
        match s.trim().to_lowercase().replace('_', "-").as_str() {
            "r-theta" | "rtheta" => Ok(TransformMethod::RTheta),
            "model-xy" => Ok(TransformMethod::ModelXy),
            "coordinate-xy" | "coord-xy" => Ok(TransformMethod::CoordinateXy),
            _ => Err(param(format!("unknown transform method '{s}'"))),
        }
    }

    /// Geometries on which the two cumulative coordinates are scored.
    pub fn geometries(self) -> (GeometryKind, GeometryKind) {
        match self {
            TransformMethod::RTheta => (GeometryKind::Line, GeometryKind::Circle),
            _ => (GeometryKind::Line, GeometryKind::Line),
        }
    }
}

/// Any map from the plane to a pair of cumulative coordinates.
pub trait InverseMap2D: Sync {
    fn inverse(&self, point: (f64, f64)) -> Result<(f64, f64)>;
    fn geometries(&self) -> (GeometryKind, GeometryKind);
}

/// An elliptical model paired with a transform method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticalMap {
    pub model: Elliptical2D,
    pub method: TransformMethod,
}

impl InverseMap2D for EllipticalMap {
    fn inverse(&self, point: (f64, f64)) -> Result<(f64, f64)> {
        let m = &self.model;
        Ok(match self.method {
            TransformMethod::RTheta => {
                let (u, v) = m.standardize(point);
                let c_r = m.profile.radial_cdf(u.hypot(v));
                let th = v.atan2(u);
                let c_t = if th < 0.0 { th / TAU + 1.0 } else { th / TAU };
                (c_r, if c_t >= 1.0 { 0.0 } else { c_t })
            }
            TransformMethod::ModelXy => {
                let (u, v) = m.standardize(point);
                (m.profile.marginal_cdf(u), m.profile.marginal_cdf(v))
            }
            TransformMethod::CoordinateXy => {
                let (sx, sy) = m.coordinate_scales();
                (m.profile.marginal_cdf((point.0 - m.x0) / sx), m.profile.marginal_cdf((point.1 - m.y0) / sy))
            }
        })
    }

    fn geometries(&self) -> (GeometryKind, GeometryKind) {
        self.method.geometries()
    }
}

/// Cumulative coordinates of every point, in input order.
pub fn inverse_points(map: &dyn InverseMap2D, pts: &PointSet2D) -> Result<Vec<(f64, f64)>> {
    pts.points().iter().map(|&p| map.inverse(p)).collect()
}

/// The two sorted cumulative vectors.
pub fn inverse_map_2d(
    model: &Elliptical2D,
    pts: &PointSet2D,
    method: TransformMethod,
) -> Result<(CumulativeVector, CumulativeVector)> {
    let map = EllipticalMap { model: *model, method };
    let pairs = inverse_points(&map, pts)?;
    let (k1, k2) = method.geometries();
    Ok((
        CumulativeVector::new(pairs.iter().map(|p| p.0).collect(), k1)?,
        CumulativeVector::new(pairs.iter().map(|p| p.1).collect(), k2)?,
    ))
}

/// Joint concordance of both cumulative coordinates under any inverse map.
pub fn concordance_map(map: &dyn InverseMap2D, pts: &PointSet2D) -> Result<FidelityReport> {
    let pairs = inverse_points(map, pts)?;
    let (k1, k2) = map.geometries();
    let n = pairs.len();
    let mut warnings: Vec<Warning> = Vec::new();
    let mut parts = Vec::with_capacity(2);
    for (k, kind) in [(0usize, k1), (1, k2)] {
        let mut c: Vec<(f64, f64)> =
            pairs.iter().map(|p| if k == 0 { p.0 } else { p.1 }).map(|v| (v, v)).collect();
        c.sort_by(|a, b| a.0.total_cmp(&b.0));
        warnings.extend(collision_warnings(&c, kind));
        let values: Vec<f64> = c.iter().map(|p| p.0).collect();
        parts.push(JointComponent::new(fidelity(&values, kind), n, kind));
    }
    let mut report = joint_fidelity(&parts)?;
    report.warnings = warnings;
    Ok(report)
}

/// Joint concordance of a point set with an elliptical model.
pub fn concordance_2d(model: &Elliptical2D, pts: &PointSet2D, method: TransformMethod) -> Result<FidelityReport> {
    concordance_map(&EllipticalMap { model: *model, method }, pts)
}
