//! Geometries, samples and cumulative vectors.

use crate::error::{domain, Error, Result};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeometryKind {
    Line,
    Circle,
}

impl GeometryKind {
    pub fn name(self) -> &'static str {
        match self {
            GeometryKind::Line => "line",
            GeometryKind::Circle => "circle",
        }
    }

    pub fn parse(s: &str) -> Result<GeometryKind> {
        match s.trim().to_lowercase().as_str() {
            "line" => Ok(GeometryKind::Line),
            "circle" => Ok(GeometryKind::Circle),
            _ => Err(domain(format!("unknown geometry '{s}'"))),
        }
    }
}

/// The line, or a circle of given period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    kind: GeometryKind,
    period: f64,
}

impl Geometry {
    pub fn line() -> Geometry {
        Geometry { kind: GeometryKind::Line, period: f64::INFINITY }
    }

    pub fn circle(period: f64) -> Result<Geometry> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(domain(format!("circle period must be positive, got {period}")));
        }
        Ok(Geometry { kind: GeometryKind::Circle, period })
    }

    /// Circle of period 2π.
    pub fn angles() -> Geometry {
        Geometry { kind: GeometryKind::Circle, period: TAU }
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    /// Period of a circle; `None` on the line.
    pub fn period(&self) -> Option<f64> {
        match self.kind {
            GeometryKind::Line => None,
            GeometryKind::Circle => Some(self.period),
        }
    }

    pub fn is_circle(&self) -> bool {
        self.kind == GeometryKind::Circle
    }

    pub(crate) fn compatible(&self, other: &Geometry) -> bool {
        match (self.kind, other.kind) {
            (GeometryKind::Line, GeometryKind::Line) => true,
            (GeometryKind::Circle, GeometryKind::Circle) => {
                (self.period - other.period).abs() <= 1e-12 * self.period.max(other.period)
            }
            _ => false,
        }
    }
}

/// Observations on a geometry, kept sorted (circle values reduced into
/// `[0, period)` first).
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    geometry: Geometry,
}

impl Sample {
    pub fn new(values: Vec<f64>, geometry: Geometry) -> Result<Sample> {
        if values.is_empty() {
            return Err(domain("sample is empty"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(domain(format!("sample value {bad} is not finite")));
        }
        let mut values = values;
        if let Some(period) = geometry.period() {
            for v in values.iter_mut() {
                *v = reduce(*v, period);
            }
        }
        values.sort_by(f64::total_cmp);
        Ok(Sample { values, geometry })
    }

    pub fn line(values: Vec<f64>) -> Result<Sample> {
        Sample::new(values, Geometry::line())
    }

    pub fn circle(values: Vec<f64>, period: f64) -> Result<Sample> {
        Sample::new(values, Geometry::circle(period)?)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    /// Apply `t` to every value (e.g. a monotone transform).
    pub fn map(&self, t: impl Fn(f64) -> f64) -> Result<Sample> {
        Sample::new(self.values.iter().map(|&v| t(v)).collect(), self.geometry)
    }

    /// Add independent uniform jitter in `[-width/2, width/2]` to every value.
    /// Never applied implicitly; use it to break ties from coarse measurement.
    pub fn jittered<R: rand::Rng + ?Sized>(&self, width: f64, rng: &mut R) -> Result<Sample> {
        if !(width > 0.0) {
            return Err(domain("jitter width must be positive"));
        }
        let values = self.values.iter().map(|&v| v + width * (rng.random::<f64>() - 0.5)).collect();
        Sample::new(values, self.geometry)
    }
}

pub(crate) fn reduce(v: f64, period: f64) -> f64 {
    let r = v.rem_euclid(period);
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Sorted cumulative values in `[0, 1]`, tagged with the geometry on which
/// the fidelity is to be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeVector {
    c: Vec<f64>,
    kind: GeometryKind,
}

impl CumulativeVector {
    pub fn new(mut c: Vec<f64>, kind: GeometryKind) -> Result<CumulativeVector> {
        if c.is_empty() {
            return Err(domain("cumulative vector is empty"));
        }
        if let Some(bad) = c.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain(format!("cumulative value {bad} outside [0, 1]")));
        }
        c.sort_by(f64::total_cmp);
        Ok(CumulativeVector { c, kind })
    }

    pub(crate) fn from_sorted(c: Vec<f64>, kind: GeometryKind) -> CumulativeVector {
        debug_assert!(c.windows(2).all(|w| w[0] <= w[1]));
        CumulativeVector { c, kind }
    }

    pub fn values(&self) -> &[f64] {
        &self.c
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_values_are_reduced_and_sorted() {
        let s = Sample::circle(vec![7.0, -1.0, 0.5], TAU).unwrap();
        let v = s.values();
        assert!(v.windows(2).all(|w| w[0] <= w[1]));
        assert!(v.iter().all(|&x| (0.0..TAU).contains(&x)));
        assert!((v[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Sample::line(vec![]).is_err());
        assert!(Sample::line(vec![f64::NAN]).is_err());
        assert!(Geometry::circle(0.0).is_err());
        assert!(CumulativeVector::new(vec![1.5], GeometryKind::Line).is_err());
    }
}
