//! Adaptive Gauss–Kronrod (7, 15) quadrature.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Integral of `f` over the finite interval [a, b] to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (v, e) = gk15(&f, a, b);
    adapt(&f, a, b, v, e, tol, 0)
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, v: f64, e: f64, tol: f64, depth: u32) -> f64 {
    if e <= tol || depth >= 40 || (b - a).abs() < 1e-14 * a.abs().max(b.abs()).max(1e-300) {
        return v;
    }
    let m = 0.5 * (a + b);
    let (v1, e1) = gk15(f, a, m);
    let (v2, e2) = gk15(f, m, b);
    adapt(f, a, m, v1, e1, 0.5 * tol, depth + 1) + adapt(f, m, b, v2, e2, 0.5 * tol, depth + 1)
}

/// Integral over a possibly infinite interval, via x = a + t/(1−t) style maps.
pub fn integrate_any<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    half_line(&f, a, b, tol)
}

fn half_line(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => integrate(f, a, b, tol),
        (true, false) => integrate(
            |t: f64| {
                if t >= 1.0 {
                    return 0.0;
                }
                let u = 1.0 - t;
                f(a + t / u) / (u * u)
            },
            0.0,
            1.0,
            tol,
        ),
        (false, true) => integrate(
            |t: f64| {
                if t >= 1.0 {
                    return 0.0;
                }
                let u = 1.0 - t;
                f(b - t / u) / (u * u)
            },
            0.0,
            1.0,
            tol,
        ),
        (false, false) => {
            half_line(f, f64::NEG_INFINITY, 0.0, 0.5 * tol) + half_line(f, 0.0, f64::INFINITY, 0.5 * tol)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_transcendentals() {
        assert!((integrate(|x| x * x, 0.0, 3.0, 1e-12) - 9.0).abs() < 1e-12);
        assert!((integrate(f64::sin, 0.0, std::f64::consts::PI, 1e-12) - 2.0).abs() < 1e-12);
        let g = integrate_any(|x| (-0.5 * x * x).exp(), f64::NEG_INFINITY, f64::INFINITY, 1e-12);
        assert!((g - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-10);
        let e = integrate_any(|x| (-x).exp(), 1.0, f64::INFINITY, 1e-12);
        assert!((e - (-1.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn integrable_singularity() {
        let v = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10);
        assert!((v - 2.0).abs() < 1e-7);
    }
}
