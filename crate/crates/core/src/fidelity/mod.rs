//! Fidelity statistics, null approximations and concordance.

mod null;
mod report;
mod statistics;

pub use null::{null_approx, null_moments, p_value, table_row, NullApprox, NullStatistic, PRule};
pub use report::{joint_fidelity, Composition, FidelityReport, JointComponent};
pub use statistics::{discrete_fidelity, fidelity, fidelity_circle, fidelity_line, spacings_line};

use crate::distributions::{cumulative_pairs, CumulativeVector, GeometryKind, ModelDistribution, Sample};
use crate::error::{Result, Warning};

/// Zero intervals among sorted `(c, x)` pairs, and points on the line
/// boundaries.
pub(crate) fn collision_warnings(pairs: &[(f64, f64)], kind: GeometryKind) -> Vec<Warning> {
    let mut out = Vec::new();
    if kind == GeometryKind::Line {
        for &(c, x) in pairs {
            if c == 0.0 || c == 1.0 {
                out.push(Warning::Boundary { value: x });
            }
        }
    }
    for (i, w) in pairs.windows(2).enumerate() {
        if w[0].0 == w[1].0 {
            out.push(Warning::Tie { index: i + 1, value: w[1].1 });
        }
    }
    if kind == GeometryKind::Circle && pairs.len() > 1 {
        let (first, last) = (pairs[0].0, pairs[pairs.len() - 1].0);
        if last - first == 1.0 {
            out.push(Warning::Tie { index: 0, value: pairs[0].1 });
        }
    }
    out
}

/// Fidelity and p value of cumulative values already mapped through a model.
pub fn concordance_cumulative(c: &CumulativeVector) -> Result<FidelityReport> {
    let kind = c.kind();
    let values = c.values();
    let f = fidelity(values, kind);
    let p = p_value(f, &null_approx(values.len(), kind)?)?;
    let pairs: Vec<(f64, f64)> = values.iter().map(|&v| (v, v)).collect();
    Ok(FidelityReport {
        f,
        p,
        composition: Composition::Single { n: values.len(), geometry: kind },
        warnings: collision_warnings(&pairs, kind),
    })
}

/// Concordance of a sample with a model.
pub fn concordance(model: &ModelDistribution, sample: &Sample) -> Result<FidelityReport> {
    let pairs = cumulative_pairs(model, sample)?;
    let kind = model.geometry().kind();
    let c: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let f = fidelity(&c, kind);
    let p = p_value(f, &null_approx(c.len(), kind)?)?;
    Ok(FidelityReport {
        f,
        p,
        composition: Composition::Single { n: c.len(), geometry: kind },
        warnings: collision_warnings(&pairs, kind),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{Family, Params};

    #[test]
    fn single_point_at_center() {
        let g = ModelDistribution::new(Family::Gauss, &Params::new()).unwrap();
        let r = concordance(&g, &Sample::line(vec![0.0]).unwrap()).unwrap();
        assert_eq!((r.f, r.p), (0.0, 1.0));
    }

    #[test]
    fn uniform_line_example() {
        let u = ModelDistribution::uniform_line(0.0, 1.0).unwrap();
        let r = concordance(&u, &Sample::line(vec![0.2, 0.5, 0.9]).unwrap()).unwrap();
        assert!((r.f - (-0.029_096_997_449_963)).abs() < 1e-14);
        assert!((r.p - 0.980_342_231_909_12).abs() < 1e-11);
        let a = null_approx(3, GeometryKind::Line).unwrap();
        assert!((a.alpha.unwrap() - 1.465_515_982_0).abs() < 1e-9);
        assert!((a.beta.unwrap() - 2.909_663_485_7).abs() < 1e-9);
    }

    #[test]
    fn ties_warn() {
        let u = ModelDistribution::uniform_line(0.0, 1.0).unwrap();
        let r = concordance(&u, &Sample::line(vec![0.2, 0.2, 0.9]).unwrap()).unwrap();
        assert_eq!(r.f, f64::NEG_INFINITY);
        assert_eq!(r.p, 0.0);
        assert_eq!(r.warnings, vec![Warning::Tie { index: 1, value: 0.2 }]);
        let r = concordance(&u, &Sample::line(vec![0.0, 0.5]).unwrap()).unwrap();
        assert_eq!(r.warnings, vec![Warning::Boundary { value: 0.0 }]);
    }
}
