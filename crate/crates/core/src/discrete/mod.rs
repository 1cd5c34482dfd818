//! Binned samples and binomial outcomes.

mod binary;
mod binned;

pub use binary::{
    binary_interval, binomial_cumulative, solve_binary_q, BinaryInterval, BinaryOutcome, IntervalMode, OneSided,
};
pub use binned::{binned_fidelity_estimate, binned_fidelity_median, BinnedSample};
