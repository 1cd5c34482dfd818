//! Model families on the line and the circle, samples, and the cumulative
//! mapping that feeds every fidelity computation.

mod circle_table;
mod family;
pub mod io;
mod model;
mod sample;

pub use family::{Family, Params};
pub use model::{ModelDistribution, UserModel};
pub use sample::{CumulativeVector, Geometry, GeometryKind, Sample};

use crate::error::{Error, Result};

/// Map every point through the model cdf and sort the results.
pub fn cumulative_map(model: &ModelDistribution, sample: &Sample) -> Result<CumulativeVector> {
    let pairs = cumulative_pairs(model, sample)?;
    Ok(CumulativeVector::from_sorted(pairs.into_iter().map(|p| p.0).collect(), model.geometry().kind()))
}

/// `(c, x)` pairs sorted by `c`.
pub(crate) fn cumulative_pairs(model: &ModelDistribution, sample: &Sample) -> Result<Vec<(f64, f64)>> {
    if !model.geometry().compatible(&sample.geometry()) {
        return Err(Error::Geometry(format!(
            "sample on {:?} does not match model on {:?}",
            sample.geometry(),
            model.geometry()
        )));
    }
    let mut pairs = Vec::with_capacity(sample.len());
    for &x in sample.values() {
        pairs.push((model.cumulative_value(x)?, x));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn mapping_examples() {
        let g = ModelDistribution::new(Family::Gauss, &Params::new().with("beta", 4.0).with("alpha", 1.0))
            .unwrap();
        let c = cumulative_map(&g, &Sample::line(vec![4.0]).unwrap()).unwrap();
        assert_eq!(c.values(), &[0.5]);

        let e = ModelDistribution::new(Family::Exponential, &Params::new().with("alpha", 1.0)).unwrap();
        let c = cumulative_map(&e, &Sample::line(vec![4f64.ln(), 2f64.ln()]).unwrap()).unwrap();
        assert!((c.values()[0] - 0.5).abs() < 1e-15 && (c.values()[1] - 0.75).abs() < 1e-15);

        let u = ModelDistribution::uniform_circle(2.0 * PI).unwrap();
        let s = Sample::circle(vec![PI / 2.0, PI, 1.5 * PI], 2.0 * PI).unwrap();
        let c = cumulative_map(&u, &s).unwrap();
        for (a, b) in c.values().iter().zip([0.25, 0.5, 0.75]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn mapping_errors() {
        let e = ModelDistribution::new(Family::Exponential, &Params::new()).unwrap();
        let err = cumulative_map(&e, &Sample::line(vec![1.0, -2.0]).unwrap()).unwrap_err();
        assert_eq!(err, Error::OutsideSupport { value: -2.0 });
        let s = Sample::circle(vec![1.0], 2.0 * PI).unwrap();
        assert!(matches!(cumulative_map(&e, &s), Err(Error::Geometry(_))));
    }
}
