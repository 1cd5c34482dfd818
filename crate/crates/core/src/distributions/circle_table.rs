//! Tabulated cdf for circular densities without a closed form.

use crate::quadrature::integrate;
use crate::roots::brent;

pub(crate) const CELLS: usize = 1024;

/// Cdf on [0, period) tabulated at equally spaced nodes, interpolated by
/// monotone cubic Hermite segments whose node slopes are the density itself.
#[derive(Debug)]
pub(crate) struct CircleTable {
    period: f64,
    h: f64,
    cdf: Vec<f64>,
    slope: Vec<f64>,
}

impl CircleTable {
    /// `pdf` is evaluated on [0, period); it need not be normalized.
    pub(crate) fn build<F: Fn(f64) -> f64>(pdf: F, period: f64) -> CircleTable {
        let h = period / CELLS as f64;
        let mut cdf = Vec::with_capacity(CELLS + 1);
        let mut slope = Vec::with_capacity(CELLS + 1);
        let peak = (0..CELLS).map(|k| pdf(k as f64 * h)).fold(0.0, f64::max).max(1e-300);
        let mut acc = 0.0;
        cdf.push(0.0);
        for k in 0..CELLS {
            let a = k as f64 * h;
            acc += integrate(&pdf, a, a + h, 1e-15 * peak * h);
            cdf.push(acc);
        }
        for k in 0..=CELLS {
            slope.push(pdf(if k == CELLS { 0.0 } else { k as f64 * h }));
        }
        let total = acc;
        for v in cdf.iter_mut() {
            *v /= total;
        }
        for s in slope.iter_mut() {
            *s /= total;
        }
        cdf[CELLS] = 1.0;
        let mut table = CircleTable { period, h, cdf, slope };
        table.limit_slopes();
        table
    }

    // Fritsch–Carlson limiter keeps every segment monotone.
    fn limit_slopes(&mut self) {
        for k in 0..CELLS {
            let delta = (self.cdf[k + 1] - self.cdf[k]) / self.h;
            if delta <= 0.0 {
                self.slope[k] = 0.0;
                self.slope[k + 1] = 0.0;
                continue;
            }
            let a = self.slope[k] / delta;
            let b = self.slope[k + 1] / delta;
            let r = a * a + b * b;
            if r > 9.0 {
                let t = 3.0 / r.sqrt();
                self.slope[k] = t * a * delta;
                self.slope[k + 1] = t * b * delta;
            }
        }
    }

    fn segment(&self, k: usize, t: f64) -> f64 {
        let s = t / self.h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.cdf[k]
            + h10 * self.h * self.slope[k]
            + h01 * self.cdf[k + 1]
            + h11 * self.h * self.slope[k + 1]
    }

    /// Cdf at `u` in [0, period].
    pub(crate) fn cdf(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= self.period {
            return 1.0;
        }
        let k = ((u / self.h) as usize).min(CELLS - 1);
        self.segment(k, u - k as f64 * self.h).clamp(0.0, 1.0)
    }

    /// Inverse of [`cdf`](Self::cdf) for `c` in (0, 1).
    pub(crate) fn quantile(&self, c: f64) -> f64 {
        let k = match self.cdf.binary_search_by(|v| v.partial_cmp(&c).unwrap()) {
            Ok(i) => return (i as f64 * self.h).min(self.period),
            Err(i) => i.clamp(1, CELLS) - 1,
        };
        let a = k as f64 * self.h;
        brent(|t| self.segment(k, t) - c, 0.0, self.h, 0.0)
            .map(|t| a + t)
            .unwrap_or(a + self.h * 0.5)
    }
}
