//! Bracketed root finding for monotone functions.

use crate::error::{Error, Result};

/// Brent's method on `[a, b]` where `g(a)` and `g(b)` have opposite signs
/// (or one is zero). Stops when the bracket is below `xtol` in width.
pub fn brent<F: FnMut(f64) -> f64>(mut g: F, mut a: f64, mut b: f64, xtol: f64) -> Result<f64> {
    let mut fa = g(a);
    let mut fb = g(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::Convergence(format!("root not bracketed in [{a}, {b}]")));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..300 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = g(b);
    }
    Ok(b)
}

/// Solve `h(x) = target` for nondecreasing `h` on `[lo, hi]`; infinite ends
/// are replaced by an expanding search from `start`.
pub fn solve_increasing<F: FnMut(f64) -> f64>(
    mut h: F,
    target: f64,
    lo: f64,
    hi: f64,
    start: f64,
) -> Result<f64> {
    let mut a = lo;
    let mut b = hi;
    if !a.is_finite() || !b.is_finite() {
        let mut step = start.abs().max(1.0);
        let mut x = start;
        if h(x) < target {
            a = x;
            if !b.is_finite() {
                loop {
                    x = start + step;
                    if h(x) >= target || !x.is_finite() {
                        b = x;
                        break;
                    }
                    a = x;
                    step *= 2.0;
                }
            }
        } else {
            b = x;
            if !a.is_finite() {
                loop {
                    x = start - step;
                    if h(x) < target || !x.is_finite() {
                        a = x;
                        break;
                    }
                    b = x;
                    step *= 2.0;
                }
            }
        }
    }
    let xtol = 1e-15 * a.abs().max(b.abs()).max(1e-300);
    brent(|x| h(x) - target, a, b, xtol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_roots() {
        let r = brent(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        let r = solve_increasing(|x| x.exp(), 10.0, f64::NEG_INFINITY, f64::INFINITY, 0.0).unwrap();
        assert!((r - 10f64.ln()).abs() < 1e-13);
        let r = solve_increasing(|x| x.exp(), 1e-5, f64::NEG_INFINITY, f64::INFINITY, 0.0).unwrap();
        assert!((r - 1e-5f64.ln()).abs() < 1e-12);
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }
}
