//! Exact null moments, the gamma approximation and p values.

use crate::distributions::GeometryKind;
use crate::error::{domain, Result};
use crate::special::{digamma, regularized_gamma_q, trigamma, EULER_GAMMA};
use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};
use std::sync::{OnceLock, RwLock};

/// Statistic whose null moments are requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullStatistic {
    Fidelity,
    Spacings,
}

/// Rule converting f to p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PRule {
    /// p = 1 − √(1 − e^{2f})
    ExactSqrt,
    /// p = exp(−f/μ)
    Exponential,
    /// p = Q(α, −βf)
    Gamma,
    /// p = 1
    Trivial,
}

impl PRule {
    pub fn name(self) -> &'static str {
        match self {
            PRule::ExactSqrt => "exact_sqrt",
            PRule::Exponential => "exponential",
            PRule::Gamma => "gamma",
            PRule::Trivial => "trivial",
        }
    }
}

/// Null mean and variance of the fidelity for n points, with the gamma
/// parameters α = μ²/σ², β = −μ/σ² (undefined when σ² = 0, i.e. one point
/// on the circle).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullApprox {
    pub n: usize,
    pub geometry: GeometryKind,
    pub mu: f64,
    pub sigma2: f64,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub rule: PRule,
}

/// Exact (μ, σ²) of the null distribution.
pub fn null_moments(n: usize, geometry: GeometryKind, statistic: NullStatistic) -> Result<(f64, f64)> {
    if n < 1 {
        return Err(domain("null moments need n >= 1"));
    }
    let nf = n as f64;
    let zeta2 = PI * PI / 6.0;
    let moments = match (statistic, geometry) {
        (NullStatistic::Fidelity, GeometryKind::Circle) => {
            let mu = -EULER_GAMMA + (nf.ln() - digamma(nf));
            let s2 = (zeta2 - 1.0 - (nf * trigamma(nf) - 1.0)) / nf;
            (mu, s2)
        }
        (NullStatistic::Fidelity, GeometryKind::Line) => {
            let mu = -EULER_GAMMA + (nf.ln() - digamma(nf + 1.0) + LN_2 / nf);
            let s2 = (zeta2 - 1.0 - (nf * trigamma(nf + 1.0) - 1.0 + PI * PI / (12.0 * nf))) / nf;
            (mu, s2)
        }
        (NullStatistic::Spacings, GeometryKind::Line) => {
            let m = nf + 1.0;
            let mu = -EULER_GAMMA + (m.ln() - digamma(m));
            let s2 = (zeta2 - 1.0 - (m * trigamma(m) - 1.0)) / m;
            (mu, s2)
        }
        // Spacings on the circle coincide with the circular fidelity.
        (NullStatistic::Spacings, GeometryKind::Circle) => {
            return null_moments(n, geometry, NullStatistic::Fidelity)
        }
    };
    // Roundoff can leave a tiny negative value where the exact result is 0.
    Ok((moments.0.min(0.0), moments.1.max(0.0)))
}

fn compute(n: usize, geometry: GeometryKind) -> Result<NullApprox> {
    let (mu, sigma2) = null_moments(n, geometry, NullStatistic::Fidelity)?;
    let rule = match (geometry, n) {
        (GeometryKind::Circle, 1) => PRule::Trivial,
        (GeometryKind::Line, 1) | (GeometryKind::Circle, 2) => PRule::ExactSqrt,
        (GeometryKind::Line, 2) | (GeometryKind::Circle, 3) => PRule::Exponential,
        _ => PRule::Gamma,
    };
    let (alpha, beta) = if sigma2 > 0.0 { (Some(mu * mu / sigma2), Some(-mu / sigma2)) } else { (None, None) };
    Ok(NullApprox { n, geometry, mu, sigma2, alpha, beta, rule })
}

/// Memoized null approximation for (n, geometry).
pub fn null_approx(n: usize, geometry: GeometryKind) -> Result<NullApprox> {
    static CACHE: OnceLock<RwLock<HashMap<(usize, GeometryKind), NullApprox>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(a) = cache.read().unwrap().get(&(n, geometry)) {
        return Ok(*a);
    }
    let a = compute(n, geometry)?;
    cache.write().unwrap().insert((n, geometry), a);
    Ok(a)
}

/// Concordance p value of an observed fidelity.
pub fn p_value(f: f64, approx: &NullApprox) -> Result<f64> {
    if f.is_nan() {
        return Err(domain("fidelity is NaN"));
    }
    if f > 0.0 {
        return Err(domain(format!("fidelity must be <= 0, got {f}")));
    }
    if approx.rule == PRule::Trivial {
        return Ok(1.0);
    }
    if f == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let p = match approx.rule {
        PRule::ExactSqrt => 1.0 - (-(2.0 * f).exp_m1()).sqrt(),
        PRule::Exponential => (-f / approx.mu).exp(),
        PRule::Gamma => {
            let (a, b) = (approx.alpha.unwrap(), approx.beta.unwrap());
            regularized_gamma_q(a, -b * f)?
        }
        PRule::Trivial => 1.0,
    };
    Ok(p.clamp(0.0, 1.0))
}

// Fixed decimals so that integer digits (a leading 0 included) plus decimals
// make `digits`.
fn fixed_digits(x: f64, digits: usize) -> String {
    let int_digits = |s: &str| s.trim_start_matches('-').split('.').next().map_or(1, str::len);
    let mut dec = digits.saturating_sub(int_digits(&format!("{:.0}", x.abs().trunc())));
    loop {
        let s = format!("{x:.dec$}");
        if int_digits(&s) + dec <= digits || dec == 0 {
            return s;
        }
        dec -= 1;
    }
}

/// Coefficient row `mu, sigma, alpha, beta` as printed in tables: μ and σ
/// with 11 decimals, α and β with 11 digits in total. Undefined α, β print
/// as `---`.
pub fn table_row(a: &NullApprox) -> [String; 4] {
    let zero_or = |s: String| if s.parse::<f64>() == Ok(0.0) { "0".to_string() } else { s };
    let sigma = a.sigma2.sqrt();
    let gamma = |v: Option<f64>| v.map_or_else(|| "---".to_string(), |v| fixed_digits(v, 11));
    [zero_or(format!("{:.11}", a.mu)), zero_or(format!("{sigma:.11}")), gamma(a.alpha), gamma(a.beta)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use GeometryKind::*;

    #[test]
    fn moments_match_tables() {
        let (mu, s2) = null_moments(2, Circle, NullStatistic::Fidelity).unwrap();
        assert!((mu - (-0.306_852_819_44)).abs() < 1e-10);
        assert!((s2.sqrt() - 0.421_346_610_97).abs() < 1e-10);
        let (mu, s2) = null_moments(5, Line, NullStatistic::Fidelity).unwrap();
        assert!((mu - (-0.535_265_984_79)).abs() < 1e-10);
        assert!((s2.sqrt() - 0.338_770_093_57).abs() < 1e-10);
        let (mu, _) = null_moments(1, Line, NullStatistic::Fidelity).unwrap();
        assert!((mu - (LN_2 - 1.0)).abs() < 1e-15);
        assert!(null_moments(0, Line, NullStatistic::Fidelity).is_err());
    }

    #[test]
    fn approx_examples() {
        let a = null_approx(2, Circle).unwrap();
        assert_eq!(a.rule, PRule::ExactSqrt);
        assert!((a.alpha.unwrap() - 0.530_372_778_7).abs() < 1e-9);
        assert!((a.beta.unwrap() - 1.728_427_262_6).abs() < 1e-9);
        let a = null_approx(3, Circle).unwrap();
        assert_eq!(a.rule, PRule::Exponential);
        assert!((a.mu - (-0.401_387_711_33)).abs() < 1e-10);
        let a = null_approx(1000, Line).unwrap();
        assert!((a.alpha.unwrap() - 516.520_298_38).abs() < 1e-7);
        assert!((a.beta.unwrap() - 895.147_688_54).abs() < 1e-7);
        let a = null_approx(1, Circle).unwrap();
        assert_eq!(a.rule, PRule::Trivial);
        assert_eq!(a.alpha, None);
    }

    #[test]
    fn table_rows() {
        let row = table_row(&null_approx(2, Circle).unwrap());
        assert_eq!(row, ["-0.30685281944", "0.42134661097", "0.5303727787", "1.7284272626"]);
        let row = table_row(&null_approx(1000, Line).unwrap());
        assert_eq!(row, ["-0.57702243439", "0.02538919914", "516.52029838", "895.14768854"]);
        assert_eq!(table_row(&null_approx(1, Circle).unwrap()), ["0", "0", "---", "---"]);
        assert_eq!(fixed_digits(9.999999999999, 11), "10.000000000");
    }

    #[test]
    fn consistency() {
        for n in [3, 10, 100, 100_000] {
            for g in [Line, Circle] {
                let a = null_approx(n, g).unwrap();
                let (al, be) = (a.alpha.unwrap(), a.beta.unwrap());
                assert!((al * a.sigma2 - a.mu * a.mu).abs() < 1e-12 * a.mu * a.mu);
                assert!((be * a.sigma2 + a.mu).abs() < 1e-12 * a.mu.abs());
            }
        }
    }

    #[test]
    fn p_examples() {
        for (n, g) in [(1, Line), (2, Line), (5, Line), (1, Circle), (2, Circle), (3, Circle), (9, Circle)] {
            let a = null_approx(n, g).unwrap();
            assert_eq!(p_value(0.0, &a).unwrap(), 1.0);
            if a.rule != PRule::Trivial {
                assert_eq!(p_value(f64::NEG_INFINITY, &a).unwrap(), 0.0);
            }
            assert!(p_value(0.1, &a).is_err());
        }
        let f = 0.5 * (4.0f64 * 0.1 * 0.9).ln();
        assert!((f - (-0.510_825_623_77)).abs() < 1e-10);
        let p = p_value(f, &null_approx(1, Line).unwrap()).unwrap();
        assert!((p - 0.2).abs() < 1e-14);
        let p = p_value(-0.159, &null_approx(3, Line).unwrap()).unwrap();
        assert!((p - 0.809_447_797_794_55).abs() < 1e-11);
    }
}
