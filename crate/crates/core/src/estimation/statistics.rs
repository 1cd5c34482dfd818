//! Registry of the competitor statistics.

use crate::distributions::{cumulative_map, GeometryKind, ModelDistribution, Sample};
use crate::error::{param, Error, Result};
use crate::fidelity::{fidelity_circle, fidelity_line, spacings_line};
use std::f64::consts::PI;
use std::fmt;

/// Whether larger or smaller values indicate better agreement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

impl Sense {
    /// Multiplier turning the statistic into a score to maximize.
    pub fn sign(self) -> f64 {
        match self {
            Sense::Maximize => 1.0,
            Sense::Minimize => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Sense::Maximize => "maximize",
            Sense::Minimize => "minimize",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StatisticId {
    Fidelity,
    Likelihood,
    Spacings,
    Ajne,
    Gini,
    Kuiper,
    Rao,
    Rayleigh,
    Watson,
    AndersonDarling,
    CramerVonMises,
    EqualIntervals,
    KolmogorovSmirnov,
    OrderStatistics,
}

impl StatisticId {
    pub const ALL: [StatisticId; 14] = [
        StatisticId::Fidelity,
        StatisticId::Likelihood,
        StatisticId::Spacings,
        StatisticId::Ajne,
        StatisticId::Gini,
        StatisticId::Kuiper,
        StatisticId::Rao,
        StatisticId::Rayleigh,
        StatisticId::Watson,
        StatisticId::AndersonDarling,
        StatisticId::CramerVonMises,
        StatisticId::EqualIntervals,
        StatisticId::KolmogorovSmirnov,
        StatisticId::OrderStatistics,
    ];

    pub const CIRCLE: [StatisticId; 8] = [
        StatisticId::Ajne,
        StatisticId::Gini,
        StatisticId::Kuiper,
        StatisticId::Fidelity,
        StatisticId::Likelihood,
        StatisticId::Rao,
        StatisticId::Rayleigh,
        StatisticId::Watson,
    ];

    pub const LINE: [StatisticId; 9] = [
        StatisticId::AndersonDarling,
        StatisticId::CramerVonMises,
        StatisticId::EqualIntervals,
        StatisticId::Gini,
        StatisticId::KolmogorovSmirnov,
        StatisticId::Fidelity,
        StatisticId::Likelihood,
        StatisticId::Spacings,
        StatisticId::OrderStatistics,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StatisticId::Fidelity => "fidelity",
            StatisticId::Likelihood => "likelihood",
            StatisticId::Spacings => "spacings",
            StatisticId::Ajne => "ajne",
            StatisticId::Gini => "gini",
            StatisticId::Kuiper => "kuiper",
            StatisticId::Rao => "rao",
            StatisticId::Rayleigh => "rayleigh",
            StatisticId::Watson => "watson",
            StatisticId::AndersonDarling => "anderson-darling",
            StatisticId::CramerVonMises => "cramer-von-mises",
            StatisticId::EqualIntervals => "equal-intervals",
            StatisticId::KolmogorovSmirnov => "kolmogorov-smirnov",
            StatisticId::OrderStatistics => "order-statistics",
        }
    }

    pub fn parse(s: &str) -> Result<StatisticId> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_lowercase();
        let id = match key.as_str() {
            "fidelity" => StatisticId::Fidelity,
            "likelihood" => StatisticId::Likelihood,
            "spacings" => StatisticId::Spacings,
            "ajne" => StatisticId::Ajne,
            "gini" => StatisticId::Gini,
            "kuiper" => StatisticId::Kuiper,
            "rao" => StatisticId::Rao,
            "rayleigh" => StatisticId::Rayleigh,
            "watson" => StatisticId::Watson,
            "andersondarling" | "ad" => StatisticId::AndersonDarling,
            "cramervonmises" | "cvm" => StatisticId::CramerVonMises,
            "equalintervals" => StatisticId::EqualIntervals,
            "kolmogorovsmirnov" | "ks" => StatisticId::KolmogorovSmirnov,
            "orderstatistics" => StatisticId::OrderStatistics,
            _ => return Err(param(format!("unknown statistic '{s}'"))),
        };
        Ok(id)
    }

    pub fn sense(self) -> Sense {
        match self {
            StatisticId::Fidelity
            | StatisticId::Likelihood
            | StatisticId::Spacings
            | StatisticId::AndersonDarling
            | StatisticId::OrderStatistics => Sense::Maximize,
            _ => Sense::Minimize,
        }
    }

    pub fn applies_to(self, kind: GeometryKind) -> bool {
        match kind {
            GeometryKind::Line => Self::LINE.contains(&self),
            GeometryKind::Circle => Self::CIRCLE.contains(&self),
        }
    }
}

impl fmt::Display for StatisticId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The statistic for a model and a sample. Likelihood uses the pdf, every
/// other statistic the sorted cumulative values.
pub fn statistic_value(id: StatisticId, model: &ModelDistribution, sample: &Sample) -> Result<f64> {
    let kind = model.geometry().kind();
    if !id.applies_to(kind) {
        return Err(Error::Geometry(format!("{id} is not defined on the {}", kind.name())));
    }
    if id == StatisticId::Likelihood {
        if !model.geometry().compatible(&sample.geometry()) {
            return Err(Error::Geometry("sample and model geometries differ".into()));
        }
        let mut total = 0.0;
        for &x in sample.values() {
            total += model.pdf(x)?.ln();
        }
        return Ok(total);
    }
    let c = cumulative_map(model, sample)?;
    cumulative_statistic(id, c.values(), kind)
}

/// Statistic evaluated on sorted cumulative values.
pub fn cumulative_statistic(id: StatisticId, c: &[f64], kind: GeometryKind) -> Result<f64> {
    if c.is_empty() {
        return Err(crate::error::domain("no cumulative values"));
    }
    if !id.applies_to(kind) {
        return Err(Error::Geometry(format!("{id} is not defined on the {}", kind.name())));
    }
    let n = c.len();
    let nf = n as f64;
    let v = match id {
        StatisticId::Likelihood => {
            return Err(Error::Domain("likelihood needs the model density".into()));
        }
        StatisticId::Fidelity => match kind {
            GeometryKind::Line => fidelity_line(c),
            GeometryKind::Circle => fidelity_circle(c),
        },
        StatisticId::Spacings => spacings_line(c),
        StatisticId::Gini => {
            let d = intervals(c, kind);
            let mut s = 0.0;
            for i in 0..d.len() {
                for j in i + 1..d.len() {
                    s += (d[j] - d[i]).abs();
                }
            }
            2.0 * s
        }
        StatisticId::Ajne => {
            let mut s = 0.0;
            for &a in c {
                for &b in c {
                    s += PI - (PI - 2.0 * PI * (a - b).abs()).abs();
                }
            }
            nf / 4.0 - s / (2.0 * PI * nf)
        }
        StatisticId::Kuiper => {
            let (lo, hi) = ecdf_gaps(c);
            lo + hi
        }
        StatisticId::KolmogorovSmirnov => {
            let (lo, hi) = ecdf_gaps(c);
            lo.max(hi)
        }
        StatisticId::Rao => intervals(c, kind).iter().map(|d| (d - 1.0 / nf).abs()).sum(),
        StatisticId::EqualIntervals => intervals(c, kind).iter().map(|d| (d - 1.0 / (nf + 1.0)).abs()).sum(),
        StatisticId::Rayleigh => {
            let (mut sc, mut ss) = (0.0, 0.0);
            for &x in c {
                sc += (2.0 * PI * x).cos();
                ss += (2.0 * PI * x).sin();
            }
            2.0 * nf * (sc * sc + ss * ss)
        }
        StatisticId::Watson => {
            let (mut s1, mut s2, mut si) = (0.0, 0.0, 0.0);
            for (i, &x) in c.iter().enumerate() {
                s1 += x;
                s2 += x * x;
                si += (i + 1) as f64 * x;
            }
            nf / 12.0 + s2 - s1 * s1 / nf - 2.0 / nf * si + (nf + 1.0) / nf * s1
        }
        StatisticId::AndersonDarling => {
            let mut s = 0.0;
            for i in 0..n {
                s += (i as f64 + 0.5) / nf * (c[i].ln() + (-c[n - 1 - i]).ln_1p());
            }
            2.0 * s
        }
        StatisticId::CramerVonMises => {
            let mut s = 1.0 / (12.0 * nf);
            for (i, &x) in c.iter().enumerate() {
                let d = (i as f64 + 0.5) / nf - x;
                s += d * d;
            }
            s
        }
        StatisticId::OrderStatistics => {
            let mut s = 0.0;
            for (i, &x) in c.iter().enumerate() {
                let (a, b) = (i as f64, (n - 1 - i) as f64);
                if a > 0.0 {
                    s += a * x.ln();
                }
                if b > 0.0 {
                    s += b * (-x).ln_1p();
                }
            }
            s
        }
    };
    Ok(v)
}

// max_i |c_i − (i−1)/n| and max_i |c_i − i/n|.
fn ecdf_gaps(c: &[f64]) -> (f64, f64) {
    let nf = c.len() as f64;
    let mut lo: f64 = 0.0;
    let mut hi: f64 = 0.0;
    for (i, &x) in c.iter().enumerate() {
        lo = lo.max((x - i as f64 / nf).abs());
        hi = hi.max((x - (i + 1) as f64 / nf).abs());
    }
    (lo, hi)
}

// n+1 intervals on the line (with 0 and 1 as ends); n on the circle.
fn intervals(c: &[f64], kind: GeometryKind) -> Vec<f64> {
    let n = c.len();
    match kind {
        GeometryKind::Line => {
            let mut d = Vec::with_capacity(n + 1);
            let mut prev = 0.0;
            for &x in c {
                d.push(x - prev);
                prev = x;
            }
            d.push(1.0 - prev);
            d
        }
        GeometryKind::Circle => {
            let mut d: Vec<f64> = c.windows(2).map(|w| w[1] - w[0]).collect();
            d.push(1.0 + c[0] - c[n - 1]);
            d
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(id: StatisticId, c: &[f64]) -> f64 {
        cumulative_statistic(id, c, GeometryKind::Line).unwrap()
    }

    #[test]
    fn table_examples() {
        assert_eq!(line(StatisticId::KolmogorovSmirnov, &[0.5]), 0.5);
        let c: Vec<f64> = (0..7).map(|i| (i as f64 + 0.5) / 7.0).collect();
        assert!((line(StatisticId::CramerVonMises, &c) - 1.0 / 84.0).abs() < 1e-15);
        let e: Vec<f64> = (0..6).map(|i| i as f64 / 6.0 + 0.05).collect();
        let r = cumulative_statistic(StatisticId::Rayleigh, &e, GeometryKind::Circle).unwrap();
        assert!(r.abs() < 1e-24);
        let k = cumulative_statistic(StatisticId::Rao, &e, GeometryKind::Circle).unwrap();
        assert!(k.abs() < 1e-14);
        let g = cumulative_statistic(StatisticId::Gini, &e, GeometryKind::Circle).unwrap();
        assert!(g.abs() < 1e-14);
    }

    #[test]
    fn frozen_values() {
        let c = [0.1, 0.35, 0.4, 0.8];
        let circle = |id| cumulative_statistic(id, &c, GeometryKind::Circle).unwrap();
        let close = |a: f64, b: f64| (a - b).abs() < 1e-13;
        assert!(close(line(StatisticId::AndersonDarling, &c), -4.40721573971486));
        assert!(close(line(StatisticId::CramerVonMises, &c), 0.0783333333333333));
        assert!(close(line(StatisticId::EqualIntervals, &c), 0.5));
        assert!(close(line(StatisticId::Gini, &c), 3.4));
        assert!(close(line(StatisticId::KolmogorovSmirnov, &c), 0.35));
        assert!(close(line(StatisticId::OrderStatistics, &c), -5.240307245114));
        assert!(close(circle(StatisticId::Ajne), 0.125));
        assert!(close(circle(StatisticId::Kuiper), 0.45));
        assert!(close(circle(StatisticId::Rao), 0.4));
        assert!(close(circle(StatisticId::Rayleigh), 9.16718427000252));
        assert!(close(circle(StatisticId::Watson), 0.0477083333333333));
        assert!(close(circle(StatisticId::Gini), 2.2));
    }

    #[test]
    fn geometry_checks() {
        assert!(cumulative_statistic(StatisticId::Watson, &[0.5], GeometryKind::Line).is_err());
        assert!(cumulative_statistic(StatisticId::AndersonDarling, &[0.5], GeometryKind::Circle).is_err());
        assert_eq!(StatisticId::Gini.sense(), Sense::Minimize);
        assert_eq!(StatisticId::OrderStatistics.sense(), Sense::Maximize);
        for id in StatisticId::ALL {
            assert_eq!(StatisticId::parse(id.name()).unwrap(), id);
        }
    }
}
