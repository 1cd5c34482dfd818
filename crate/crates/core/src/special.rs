//! Special functions: log-gamma, incomplete gamma and beta, polygamma,
//! error functions and the modified Bessel function I0.

use crate::error::{domain, Result};
use std::f64::consts::PI;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Iteration controls for the series and continued fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracy {
    pub relative_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for Accuracy {
    fn default() -> Self {
        Accuracy { relative_tolerance: 1e-12, max_iterations: 500 }
    }
}

impl Accuracy {
    pub fn new(relative_tolerance: f64, max_iterations: usize) -> Result<Self> {
        if !(relative_tolerance > 0.0) || max_iterations < 1 {
            return Err(domain("accuracy needs tolerance > 0 and at least one iteration"));
        }
        Ok(Accuracy { relative_tolerance, max_iterations })
    }

    // Tolerance used internally; tighter than requested is harmless.
    fn eps(&self) -> f64 {
        (self.relative_tolerance * 1e-3).max(f64::EPSILON)
    }

    // Series and continued fractions need O(sqrt(s)) terms near the peak.
    fn iterations_for(&self, s: f64) -> usize {
        self.max_iterations.max((30.0 * s.sqrt()) as usize + 50)
    }
}

// Remainder of Stirling's series, ln Γ(x) − [(x−½)ln x − x + ½ln 2π], for x ≥ 10.
fn stirling_tail(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    r * (1.0 / 12.0
        + r2 * (-1.0 / 360.0
            + r2 * (1.0 / 1260.0
                + r2 * (-1.0 / 1680.0
                    + r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360_360.0 + r2 / 156.0))))))
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x >= 10.0 {
        return (x - 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_tail(x);
    }
    // Shift up and divide out the product x(x+1)...(x+k−1).
    let mut z = x;
    let mut prod = 1.0;
    let mut log_acc = 0.0;
    while z < 10.0 {
        prod *= z;
        if prod > 1e280 || prod < 1e-280 {
            log_acc += prod.ln();
            prod = 1.0;
        }
        z += 1.0;
    }
    ln_gamma_unchecked(z) - log_acc - prod.ln()
}

/// Natural log of the gamma function for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma(x))
}

pub(crate) fn ln_gamma(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    ln_gamma_unchecked(x)
}

/// ln of x^s e^{−x} / Γ(s), written to avoid cancellation at large s.
fn ln_gamma_prefactor(s: f64, x: f64) -> f64 {
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    if s >= 10.0 {
        let t = (x - s) / s;
        s * (t.ln_1p() - t) + 0.5 * s.ln() - LN_SQRT_2PI - stirling_tail(s)
    } else {
        s * x.ln() - x - ln_gamma_unchecked(s)
    }
}

// Series for P(s, x) times Γ(s)/(x^s e^{-x}) i.e. Σ x^k / (s(s+1)...(s+k)).
fn gamma_series(s: f64, x: f64, acc: &Accuracy) -> Result<f64> {
    let mut ap = s;
    let mut del = 1.0 / s;
    let mut sum = del;
    for _ in 0..acc.iterations_for(s.max(x)) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * acc.eps() {
            return Ok(sum);
        }
    }
    Err(crate::error::Error::Convergence(format!("incomplete gamma series at s={s}, x={x}")))
}

// Continued fraction for Q(s, x) times Γ(s)/(x^s e^{-x}), modified Lentz.
fn gamma_cf(s: f64, x: f64, acc: &Accuracy) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=acc.iterations_for(s.max(x)) {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < acc.eps() {
            return Ok(h);
        }
    }
    Err(crate::error::Error::Convergence(format!("incomplete gamma fraction at s={s}, x={x}")))
}

fn check_gamma_args(s: f64, x: f64) -> Result<()> {
    if !(s > 0.0) || s.is_infinite() {
        return Err(domain(format!("incomplete gamma requires s > 0, got {s}")));
    }
    if !(x >= 0.0) {
        return Err(domain(format!("incomplete gamma requires x >= 0, got {x}")));
    }
    Ok(())
}

/// Regularized upper incomplete gamma Q(s, x) = Γ(s, x)/Γ(s).
pub fn regularized_gamma_q(s: f64, x: f64) -> Result<f64> {
    regularized_gamma_q_with(s, x, &Accuracy::default())
}

pub fn regularized_gamma_q_with(s: f64, x: f64, acc: &Accuracy) -> Result<f64> {
    check_gamma_args(s, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let pre = ln_gamma_prefactor(s, x);
    if x < s + 1.0 {
        let p = (pre.exp() * gamma_series(s, x, acc)?).min(1.0);
        Ok(1.0 - p)
    } else {
        Ok((pre + gamma_cf(s, x, acc)?.ln()).exp().clamp(0.0, 1.0))
    }
}

/// Regularized lower incomplete gamma P(s, x) = 1 − Q(s, x).
pub fn regularized_gamma_p(s: f64, x: f64) -> Result<f64> {
    check_gamma_args(s, x)?;
    let acc = Accuracy::default();
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let pre = ln_gamma_prefactor(s, x);
    if x < s + 1.0 {
        Ok((pre.exp() * gamma_series(s, x, &acc)?).min(1.0))
    } else {
        Ok(1.0 - (pre + gamma_cf(s, x, &acc)?.ln()).exp().clamp(0.0, 1.0))
    }
}

/// Digamma (order 0) or trigamma (order 1).
pub fn polygamma(order: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(domain(format!("polygamma requires x > 0, got {x}")));
    }
    match order {
        0 => Ok(digamma(x)),
        1 => Ok(trigamma(x)),
        _ => Err(domain(format!("polygamma order {order} is not supported"))),
    }
}

pub(crate) fn digamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let r2 = 1.0 / (x * x);
    let tail = r2
        * (1.0 / 12.0
            - r2 * (1.0 / 120.0
                - r2 * (1.0 / 252.0
                    - r2 * (1.0 / 240.0
                        - r2 * (1.0 / 132.0 - r2 * (691.0 / 32760.0 - r2 / 12.0))))));
    acc + x.ln() - 0.5 / x - tail
}

pub(crate) fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let r = 1.0 / x;
    let r2 = r * r;
    let tail = r2
        * r
        * (1.0 / 6.0
            - r2 * (1.0 / 30.0
                - r2 * (1.0 / 42.0
                    - r2 * (1.0 / 30.0 - r2 * (5.0 / 66.0 - r2 * (691.0 / 2730.0 - r2 * 7.0 / 6.0))))));
    acc + r + 0.5 * r2 + tail
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Standard normal cdf.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal quantile: rational start refined by one Halley step.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain(format!("normal quantile needs 0 < p < 1, got {p}")));
    }
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] =
        [7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00, 3.754408661907416e+00];
    const P_LOW: f64 = 0.02425;

    let tail = |q: f64| {
        let r = (-2.0 * q.ln()).sqrt();
        (((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5])
            / ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0)
    };
    let mut x = if p < P_LOW {
        tail(p)
    } else if p > 1.0 - P_LOW {
        -tail(1.0 - p)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    for _ in 0..2 {
        // Work with the smaller tail to keep relative accuracy.
        let e = if x < 0.0 { normal_cdf(x) - p } else { (1.0 - p) - normal_cdf(-x) };
        let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
        x -= u / (1.0 + 0.5 * x * u);
    }
    Ok(x)
}

/// Regularized incomplete beta I_x(a, b).
pub fn regularized_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(domain(format!("incomplete beta requires a, b > 0, got a={a}, b={b}")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(domain(format!("incomplete beta requires 0 <= x <= 1, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (-x).ln_1p();
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok((ln_front.exp() * beta_cf(a, b, x)? / a).clamp(0.0, 1.0))
    } else {
        Ok((1.0 - ln_front.exp() * beta_cf(b, a, 1.0 - x)? / b).clamp(0.0, 1.0))
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let eps = 1e-16;
    let max_iter = 1000 + (30.0 * (a.max(b)).sqrt()) as usize;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=max_iter {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < eps {
            return Ok(h);
        }
    }
    Err(crate::error::Error::Convergence(format!("incomplete beta at a={a}, b={b}, x={x}")))
}

/// e^{−x} I0(x) for x ≥ 0.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let x = x.abs();
    if x <= 60.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= q / (k * k);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        sum * (-x).exp()
    } else {
        // Asymptotic expansion, terms ((2k−1)!!)² / (k! (8x)^k).
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 0.0;
        loop {
            k += 1.0;
            let next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (k * 8.0 * x);
            if next.abs() >= term.abs() || next < sum * 1e-17 {
                break;
            }
            term = next;
            sum += term;
        }
        sum / (2.0 * PI * x).sqrt()
    }
}

/// ln of the binomial coefficient C(n, k).
pub(crate) fn ln_choose(n: f64, k: f64) -> f64 {
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}
