//! Fidelity, spacings and discrete fidelity.

use crate::distributions::GeometryKind;
use crate::error::{Error, Result};

/// Fidelity on the line for sorted cumulative values: half-weight boundary
/// intervals, weight 1/n on the interior ones. `-inf` on any zero interval.
pub fn fidelity_line(c: &[f64]) -> f64 {
    assert!(!c.is_empty(), "fidelity of an empty vector");
    let n = c.len() as f64;
    let mut interior = 0.0;
    for w in c.windows(2) {
        interior += (n * (w[1] - w[0])).ln();
    }
    let ends = (2.0 * n * (1.0 - c[c.len() - 1])).ln() + (2.0 * n * c[0]).ln();
    (0.5 * ends / n + interior / n).min(0.0)
}

/// Fidelity on the circle: n intervals of weight 1/n, one of which wraps.
pub fn fidelity_circle(c: &[f64]) -> f64 {
    assert!(!c.is_empty(), "fidelity of an empty vector");
    let n = c.len() as f64;
    let mut sum = (n * ((1.0 - c[c.len() - 1]) + c[0])).ln();
    for w in c.windows(2) {
        sum += (n * (w[1] - w[0])).ln();
    }
    (sum / n).min(0.0)
}

/// Maximum-spacings statistic on the line: weight 1/(n+1) on all intervals.
pub fn spacings_line(c: &[f64]) -> f64 {
    assert!(!c.is_empty(), "spacings of an empty vector");
    let m = c.len() as f64 + 1.0;
    let mut sum = (m * c[0]).ln() + (m * (1.0 - c[c.len() - 1])).ln();
    for w in c.windows(2) {
        sum += (m * (w[1] - w[0])).ln();
    }
    (sum / m).min(0.0)
}

/// Fidelity for the given geometry.
pub fn fidelity(c: &[f64], kind: GeometryKind) -> f64 {
    match kind {
        GeometryKind::Line => fidelity_line(c),
        GeometryKind::Circle => fidelity_circle(c),
    }
}

/// Σ R ln(Q/R), with 0·ln(Q/0) = 0.
pub fn discrete_fidelity(r: &[f64], q: &[f64]) -> Result<f64> {
    if r.len() != q.len() {
        return Err(Error::Dimension(format!("R has {} entries, Q has {}", r.len(), q.len())));
    }
    let mut f = 0.0;
    for (&rb, &qb) in r.iter().zip(q) {
        if rb < 0.0 || qb < 0.0 {
            return Err(Error::Domain("probabilities must be nonnegative".into()));
        }
        if rb > 0.0 {
            f += rb * (qb / rb).ln();
        }
    }
    Ok(f.min(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_examples() {
        assert_eq!(fidelity_line(&[0.5]), 0.0);
        let even: Vec<f64> = (1..=7).map(|k| (k as f64 - 0.5) / 7.0).collect();
        assert!(fidelity_line(&even).abs() < 1e-15);
        assert!((fidelity_line(&[0.2, 0.5, 0.9]) - (-0.029_096_997_449_963)).abs() < 1e-14);
        assert_eq!(fidelity_line(&[0.2, 0.2]), f64::NEG_INFINITY);
        assert_eq!(fidelity_line(&[0.0, 0.4]), f64::NEG_INFINITY);
    }

    #[test]
    fn circle_examples() {
        assert_eq!(fidelity_circle(&[0.37]), 0.0);
        let even: Vec<f64> = (0..5).map(|k| 0.1 + k as f64 / 5.0).collect();
        assert!(fidelity_circle(&even).abs() < 1e-15);
        let expect = 0.5 * (1.2f64.ln() + 0.8f64.ln());
        assert!((fidelity_circle(&[0.1, 0.5]) - expect).abs() < 1e-15);
        assert!((expect - (-0.020_410_997_260_128)).abs() < 1e-14);
    }

    #[test]
    fn spacings_examples() {
        let even: Vec<f64> = (1..=4).map(|k| k as f64 / 5.0).collect();
        assert!(spacings_line(&even).abs() < 1e-15);
        assert_eq!(spacings_line(&[0.5]), 0.0);
        assert!((spacings_line(&[0.2, 0.5, 0.9]) - (-0.121_777_274_287_169)).abs() < 1e-14);
    }

    #[test]
    fn discrete_examples() {
        assert_eq!(discrete_fidelity(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        let f = discrete_fidelity(&[0.5, 0.5], &[0.25, 0.75]).unwrap();
        assert!((f - (-0.143_841_036_225_890)).abs() < 1e-14);
        let f = discrete_fidelity(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((f - 0.5f64.ln()).abs() < 1e-15);
        assert_eq!(discrete_fidelity(&[0.5, 0.5], &[1.0, 0.0]).unwrap(), f64::NEG_INFINITY);
        assert!(discrete_fidelity(&[1.0], &[0.5, 0.5]).is_err());
    }
}
