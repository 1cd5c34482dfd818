//! Fidelity reports and joint analysis.

use super::null::{null_approx, p_value};
use crate::distributions::GeometryKind;
use crate::error::{domain, Result, Warning};
use crate::special::regularized_gamma_q;

/// Sample size(s) behind a report.
#[derive(Debug, Clone, PartialEq)]
pub enum Composition {
    Single { n: usize, geometry: GeometryKind },
    Joint(Vec<(usize, GeometryKind)>),
}

/// Fidelity (nats per point) and its concordance p value.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityReport {
    pub f: f64,
    pub p: f64,
    pub composition: Composition,
    pub warnings: Vec<Warning>,
}

impl FidelityReport {
    /// Total number of points.
    pub fn n(&self) -> usize {
        match &self.composition {
            Composition::Single { n, .. } => *n,
            Composition::Joint(parts) => parts.iter().map(|p| p.0).sum(),
        }
    }

    /// `"line"`, `"circle"` or `"joint"`.
    pub fn geometry_label(&self) -> &'static str {
        match &self.composition {
            Composition::Single { geometry, .. } => geometry.name(),
            Composition::Joint(_) => "joint",
        }
    }
}

/// One dataset's contribution to a joint analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointComponent {
    pub f: f64,
    pub n: usize,
    pub geometry: GeometryKind,
}

impl JointComponent {
    pub fn new(f: f64, n: usize, geometry: GeometryKind) -> Self {
        JointComponent { f, n, geometry }
    }
}

fn is_exponential_pair(a: &JointComponent, b: &JointComponent) -> bool {
    use GeometryKind::*;
    let key = |c: &JointComponent| (c.n, c.geometry);
    let mut pair = [key(a), key(b)];
    pair.sort_by_key(|k| (k.0, k.1 == Circle));
    matches!(pair, [(1, Line), (1, Line)] | [(1, Line), (2, Circle)] | [(2, Circle), (2, Circle)])
}

/// Combine independent datasets into one fidelity and p value.
pub fn joint_fidelity(parts: &[JointComponent]) -> Result<FidelityReport> {
    if parts.is_empty() {
        return Err(domain("joint analysis needs at least one component"));
    }
    for c in parts {
        if c.n == 0 {
            return Err(domain("joint component with n = 0"));
        }
        if c.f.is_nan() || c.f > 0.0 {
            return Err(domain(format!("component fidelity must be <= 0, got {}", c.f)));
        }
    }
    let composition = Composition::Joint(parts.iter().map(|c| (c.n, c.geometry)).collect());
    if parts.len() == 1 {
        let c = parts[0];
        let p = p_value(c.f, &null_approx(c.n, c.geometry)?)?;
        return Ok(FidelityReport { f: c.f, p, composition, warnings: vec![] });
    }
    let n: f64 = parts.iter().map(|c| c.n as f64).sum();
    let mut f = 0.0;
    let mut mu = 0.0;
    let mut s2 = 0.0;
    for c in parts {
        let a = null_approx(c.n, c.geometry)?;
        let w = c.n as f64;
        f += w * c.f;
        mu += w * a.mu;
        s2 += w * w * a.sigma2;
    }
    f /= n;
    mu /= n;
    s2 /= n * n;
    let p = if f == f64::NEG_INFINITY {
        0.0
    } else if parts.len() == 2 && is_exponential_pair(&parts[0], &parts[1]) {
        (-f / mu).exp()
    } else if s2 == 0.0 {
        1.0
    } else {
        regularized_gamma_q(mu * mu / s2, mu * f / s2)?
    };
    Ok(FidelityReport { f: f.min(0.0), p: p.clamp(0.0, 1.0), composition, warnings: vec![] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use GeometryKind::*;

    #[test]
    fn single_component_reduces() {
        for (n, g, f) in [(3, Line, -0.159), (7, Circle, -0.2), (2, Line, -0.4)] {
            let r = joint_fidelity(&[JointComponent::new(f, n, g)]).unwrap();
            assert_eq!(r.p, p_value(f, &null_approx(n, g).unwrap()).unwrap());
        }
    }

    #[test]
    fn exponential_pairs() {
        let r = joint_fidelity(&[JointComponent::new(0.0, 1, Line), JointComponent::new(0.0, 1, Line)]).unwrap();
        assert_eq!(r.p, 1.0);
        let parts = [JointComponent::new(-0.3, 2, Circle), JointComponent::new(-0.1, 1, Line)];
        let r = joint_fidelity(&parts).unwrap();
        let mu = (2.0 * null_approx(2, Circle).unwrap().mu + null_approx(1, Line).unwrap().mu) / 3.0;
        let f = (2.0 * -0.3 + -0.1) / 3.0;
        assert!((r.p - (-f / mu).exp()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(joint_fidelity(&[]).is_err());
        assert!(joint_fidelity(&[JointComponent::new(0.1, 3, Line)]).is_err());
        let r = joint_fidelity(&[JointComponent::new(f64::NEG_INFINITY, 3, Line), JointComponent::new(-0.1, 4, Circle)])
            .unwrap();
        assert_eq!(r.p, 0.0);
    }
}
