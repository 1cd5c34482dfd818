//! Family catalogue and named parameter vectors.

use crate::error::{param, Result};
use std::fmt;

/// Model families. Parameter roles follow the usual tables: `beta` is the
/// location or first parameter, `alpha` the scale/shape or second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Theta,
    VonMises,
    WrappedLaplace,
    Beta,
    Cauchy,
    Exponential,
    ExtremeValue,
    FRatio,
    Gamma,
    Gauss,
    InverseGamma,
    Laplace,
    Levy,
    Logistic,
    Pareto,
    Rayleigh,
    Student,
    Weibull,
    Uniform,
    Binomial,
    UserDefined,
}

impl Family {
    pub const CIRCLE: [Family; 3] = [Family::Theta, Family::VonMises, Family::WrappedLaplace];
    pub const LINE: [Family; 15] = [
        Family::Beta,
        Family::Cauchy,
        Family::Exponential,
        Family::ExtremeValue,
        Family::FRatio,
        Family::Gamma,
        Family::Gauss,
        Family::InverseGamma,
        Family::Laplace,
        Family::Levy,
        Family::Logistic,
        Family::Pareto,
        Family::Rayleigh,
        Family::Student,
        Family::Weibull,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Theta => "theta",
            Family::VonMises => "vonmises",
            Family::WrappedLaplace => "wrappedlaplace",
            Family::Beta => "beta",
            Family::Cauchy => "cauchy",
            Family::Exponential => "exponential",
            Family::ExtremeValue => "extremevalue",
            Family::FRatio => "fratio",
            Family::Gamma => "gamma",
            Family::Gauss => "gauss",
            Family::InverseGamma => "inversegamma",
            Family::Laplace => "laplace",
            Family::Levy => "levy",
            Family::Logistic => "logistic",
            Family::Pareto => "pareto",
            Family::Rayleigh => "rayleigh",
            Family::Student => "student",
            Family::Weibull => "weibull",
            Family::Uniform => "uniform",
            Family::Binomial => "binomial",
            Family::UserDefined => "userdefined",
        }
    }

    /// Case-insensitive lookup; separators and common aliases are accepted.
    pub fn parse(s: &str) -> Result<Family> {
        let key: String =
            s.chars().filter(|c| !matches!(c, '_' | '-' | ' ')).collect::<String>().to_lowercase();
        let f = match key.as_str() {
            "theta" => Family::Theta,
            "vonmises" => Family::VonMises,
            "wrappedlaplace" => Family::WrappedLaplace,
            "beta" => Family::Beta,
            "cauchy" | "lorentz" => Family::Cauchy,
            "exponential" | "exp" => Family::Exponential,
            "extremevalue" | "gumbel" | "ev" => Family::ExtremeValue,
            "fratio" | "f" => Family::FRatio,
            "gamma" => Family::Gamma,
            "gauss" | "gaussian" | "normal" => Family::Gauss,
            "inversegamma" => Family::InverseGamma,
            "laplace" => Family::Laplace,
            "levy" => Family::Levy,
            "logistic" => Family::Logistic,
            "pareto" => Family::Pareto,
            "rayleigh" => Family::Rayleigh,
            "student" | "studentt" | "t" => Family::Student,
            "weibull" => Family::Weibull,
            "uniform" => Family::Uniform,
            "binomial" => Family::Binomial,
            _ => return Err(param(format!("unknown family '{s}'"))),
        };
        Ok(f)
    }

    pub fn is_circular(self) -> bool {
        matches!(self, Family::Theta | Family::VonMises | Family::WrappedLaplace)
    }

    /// Canonical parameter names in order.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::Exponential | Family::Rayleigh | Family::Student => &["alpha"],
            Family::Uniform => &["lo", "hi"],
            Family::Binomial => &["n", "q"],
            Family::UserDefined => &[],
            _ => &["beta", "alpha"],
        }
    }

    /// Reference values (beta, alpha0) from the distribution tables.
    pub fn reference(self) -> (Option<f64>, f64) {
        match self {
            Family::Theta => (Some(0.0), 4.0),
            Family::VonMises => (Some(0.0), 0.25),
            Family::WrappedLaplace => (Some(1.0), 1.0),
            Family::Beta => (Some(3.0), 1.0),
            Family::Cauchy => (Some(0.0), 0.5),
            Family::Exponential => (None, 1.0),
            Family::ExtremeValue => (Some(0.0), 1.0),
            Family::FRatio => (Some(2.0), 1.0),
            Family::Gamma => (Some(3.0), 1.0),
            Family::Gauss => (Some(0.0), 1.0),
            Family::InverseGamma => (Some(3.0), 1.0),
            Family::Laplace => (Some(0.0), 1.0),
            Family::Levy => (Some(0.0), 1.0),
            Family::Logistic => (Some(0.0), 1.0),
            Family::Pareto => (Some(1.0), 1.0),
            Family::Rayleigh => (None, 1.0),
            Family::Student => (None, 3.0),
            Family::Weibull => (Some(1.0), 2.0),
            Family::Uniform => (Some(0.0), 1.0),
            Family::Binomial => (None, 0.5),
            Family::UserDefined => (None, 1.0),
        }
    }

    /// Default parameters: the reference values.
    pub fn default_params(self) -> Params {
        let (beta, alpha) = self.reference();
        match self {
            Family::Uniform => Params::new().with("lo", 0.0).with("hi", 1.0),
            Family::Binomial => Params::new().with("n", 1.0).with("q", 0.5),
            _ => {
                let mut p = Params::new();
                if let Some(b) = beta {
                    p.set("beta", b);
                }
                p.set("alpha", alpha);
                p
            }
        }
    }

    /// Whether the parameter must be strictly positive (and is naturally
    /// searched on a log scale).
    pub fn is_positive_param(self, name: &str) -> bool {
        match name {
            "alpha" => true,
            "beta" => matches!(
                self,
                Family::WrappedLaplace
                    | Family::Beta
                    | Family::FRatio
                    | Family::Gamma
                    | Family::InverseGamma
                    | Family::Pareto
                    | Family::Weibull
            ),
            _ => false,
        }
    }

    /// Map user-facing aliases onto canonical names (`mu` → `beta`,
    /// `sigma` → `alpha`).
    pub fn canonical_param(self, name: &str) -> Result<&'static str> {
        let n = name.trim().to_lowercase();
        let n = match n.as_str() {
            "mu" | "location" | "loc" => "beta",
            "sigma" | "scale" | "kappa" => "alpha",
            other => other,
        }
        .to_string();
        self.param_names()
            .iter()
            .find(|p| **p == n)
            .copied()
            .ok_or_else(|| param(format!("family {} has no parameter '{name}'", self.name())))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Ordered named real parameters.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Params(Vec<(String, f64)>);

impl Params {
    pub fn new() -> Self {
        Params(Vec::new())
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) {
        match self.0.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = value,
            None => self.0.push((name.to_string(), value)),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(n, v)| (n.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_aliases() {
        assert_eq!(Family::parse("Gauss").unwrap(), Family::Gauss);
        assert_eq!(Family::parse("von_mises").unwrap(), Family::VonMises);
        assert_eq!(Family::parse("extreme-value").unwrap(), Family::ExtremeValue);
        assert!(Family::parse("zipf").is_err());
        for f in Family::LINE.iter().chain(Family::CIRCLE.iter()) {
            assert_eq!(Family::parse(f.name()).unwrap(), *f);
        }
    }

    #[test]
    fn canonical_names() {
        assert_eq!(Family::Gauss.canonical_param("mu").unwrap(), "beta");
        assert_eq!(Family::Gauss.canonical_param("sigma").unwrap(), "alpha");
        assert!(Family::Exponential.canonical_param("beta").is_err());
    }

    #[test]
    fn params_replace_in_place() {
        let mut p = Params::new().with("beta", 1.0).with("alpha", 2.0);
        p.set("beta", 3.0);
        assert_eq!(p.get("beta"), Some(3.0));
        assert_eq!(p.iter().map(|(n, _)| n).collect::<Vec<_>>(), vec!["beta", "alpha"]);
    }
}
