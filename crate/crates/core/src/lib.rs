//! Maximum-fidelity inference: fidelity statistics on the line and the
//! circle, their null distributions, parameter estimation, joint analysis,
//! binned and binary data, two-dimensional transforms and a two-sample test.

pub mod discrete;
pub mod distributions;
pub mod error;
pub mod estimation;
pub mod experiments;
pub mod fidelity;
pub mod multidim;
pub mod output;
pub mod quadrature;
pub mod rng;
pub mod roots;
pub mod special;
pub mod twosample;

pub use error::{Error, Result, Warning};
