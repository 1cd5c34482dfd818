//! Binomial cumulative values, the fidelity-optimal success rate and
//! cumulative intervals.

use crate::special::{ln_choose, regularized_beta};

/// Outcome of `n` trials with `k0` successes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinaryOutcome {
    pub n: u64,
    pub k0: u64,
}

impl BinaryOutcome {
    pub fn new(n: u64, k0: u64) -> crate::Result<BinaryOutcome> {
        if k0 > n {
            return Err(crate::Error::Domain(format!("k0 = {k0} exceeds n = {n}")));
        }
        Ok(BinaryOutcome { n, k0 })
    }
}

const BETA_SWITCH: u64 = 10_000;

/// `(c_l, c_m, c_h)`: probability of fewer than `k0` successes, the midpoint,
/// and the probability of at most `k0` successes.
pub fn binomial_cumulative(n: u64, q: f64, k0: u64) -> (f64, f64, f64) {
    if k0 > n {
        return (1.0, 1.0, 1.0);
    }
    if q <= 0.0 {
        let cl = if k0 > 0 { 1.0 } else { 0.0 };
        return (cl, 0.5 * (cl + 1.0), 1.0);
    }
    if q >= 1.0 {
        let ch = if k0 == n { 1.0 } else { 0.0 };
        return (0.0, 0.5 * ch, ch);
    }
    let (cl, ch) = if n > BETA_SWITCH {
        let (nf, kf) = (n as f64, k0 as f64);
        let ch = if k0 == n { 1.0 } else { regularized_beta(nf - kf, kf + 1.0, 1.0 - q).unwrap_or(f64::NAN) };
        let cl = if k0 == 0 { 0.0 } else { regularized_beta(nf - kf + 1.0, kf, 1.0 - q).unwrap_or(f64::NAN) };
        (cl, ch)
    } else {
        log_space_sums(n, q, k0)
    };
    (cl, 0.5 * (cl + ch), ch)
}

// Terms summed downward from k0 with the pmf ratio, in log space, with
// compensated summation.
fn log_space_sums(n: u64, q: f64, k0: u64) -> (f64, f64) {
    let (nf, ln_q, ln_p) = (n as f64, q.ln(), (-q).ln_1p());
    let ln_t0 = ln_choose(nf, k0 as f64) + k0 as f64 * ln_q + (nf - k0 as f64) * ln_p;
    let t0 = ln_t0.exp();
    let ln_ratio_base = ln_p - ln_q;
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut lt = ln_t0;
    let mut prev = ln_t0;
    for k in (0..k0).rev() {
        // pmf(k) = pmf(k+1) (k+1)(1−q) / ((n−k) q)
        lt += ((k + 1) as f64).ln() - (nf - k as f64).ln() + ln_ratio_base;
        let term = lt.exp();
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if lt < prev && (term < 1e-18 * sum || lt < -745.0) {
            break;
        }
        prev = lt;
    }
    let cl = sum.min(1.0);
    (cl, (cl + t0).min(1.0))
}

/// Success rate at which `c_m(n, q; k0) = 1/2`.
pub fn solve_binary_q(n: u64, k0: u64) -> f64 {
    if k0 == 0 {
        return 0.0;
    }
    if k0 >= n {
        return 1.0;
    }
    if 2 * k0 == n {
        return 0.5;
    }
    solve_decreasing(|q| binomial_cumulative(n, q, k0).1, 0.5)
}

// Bisection for a nonincreasing function of q on [0, 1].
fn solve_decreasing(g: impl Fn(f64) -> f64, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// How interval endpoints are defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalMode {
    /// `c_m` reaches `(1 ± level)/2`.
    Midpoint,
    /// The whole bin `[c_l, c_h]` stays inside `[(1−level)/2, (1+level)/2]`.
    Exact,
}

impl IntervalMode {
    pub fn name(self) -> &'static str {
        match self {
            IntervalMode::Midpoint => "midpoint",
            IntervalMode::Exact => "exact",
        }
    }
}

/// Which end of an interval is pinned at a boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OneSided {
    /// `q_lo = 0` because `k0 = 0`.
    Lower,
    /// `q_hi = 1` because `k0 = n`.
    Upper,
    /// `n = 0`: nothing is constrained.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryInterval {
    pub q_lo: f64,
    pub q_hi: f64,
    pub one_sided: Option<OneSided>,
}

/// Range of q over which the observed outcome stays within the central
/// `level` of the cumulative range.
pub fn binary_interval(n: u64, k0: u64, level: f64, mode: IntervalMode) -> crate::Result<BinaryInterval> {
    if !(level > 0.0 && level < 1.0) {
        return Err(crate::Error::Domain(format!("level must lie in (0, 1), got {level}")));
    }
    BinaryOutcome::new(n, k0)?;
    let upper = 0.5 * (1.0 + level);
    let lower = 0.5 * (1.0 - level);
    let cl = |q: f64| binomial_cumulative(n, q, k0).0;
    let cm = |q: f64| binomial_cumulative(n, q, k0).1;
    let ch = |q: f64| binomial_cumulative(n, q, k0).2;
    if n == 0 {
        return Ok(BinaryInterval { q_lo: 0.0, q_hi: 1.0, one_sided: Some(OneSided::Both) });
    }
    let interval = if k0 == 0 {
        let q_hi = match mode {
            IntervalMode::Midpoint => solve_decreasing(cm, lower),
            // c_l is identically 0 here, so the bin's upper edge is used.
            IntervalMode::Exact => solve_decreasing(ch, lower),
        };
        BinaryInterval { q_lo: 0.0, q_hi, one_sided: Some(OneSided::Lower) }
    } else if k0 == n {
        let q_lo = match mode {
            IntervalMode::Midpoint => solve_decreasing(cm, upper),
            // c_h is identically 1 here, so the bin's lower edge is used.
            IntervalMode::Exact => solve_decreasing(cl, upper),
        };
        BinaryInterval { q_lo, q_hi: 1.0, one_sided: Some(OneSided::Upper) }
    } else {
        let (q_lo, q_hi) = match mode {
            IntervalMode::Midpoint => (solve_decreasing(cm, upper), solve_decreasing(cm, lower)),
            IntervalMode::Exact => (solve_decreasing(ch, upper), solve_decreasing(cl, lower)),
        };
        BinaryInterval { q_lo, q_hi, one_sided: None }
    };
    Ok(interval)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulative_examples() {
        let (_, cm, _) = binomial_cumulative(10, 0.306089, 3);
        assert!((cm - 0.500_000_135_86).abs() < 1e-10);
        let (_, cm, _) = binomial_cumulative(1000, 0.5, 489);
        assert!((cm - 0.243_426_291_07).abs() < 1e-10);
        let (cl, _, _) = binomial_cumulative(17, 0.4, 0);
        assert_eq!(cl, 0.0);
        let (cl, cm, ch) = binomial_cumulative(10, 0.306089, 3);
        assert!((cl - 0.367).abs() < 1e-3 && (ch - 0.633).abs() < 1e-3 && cm > cl);
    }

    #[test]
    fn beta_branch_agrees_with_sums() {
        for &(n, k) in &[(10_001u64, 4_900u64), (10_001, 0), (10_001, 10_001), (20_000, 10_050)] {
            let (a_l, _, a_h) = binomial_cumulative(n, 0.495, k);
            let (b_l, b_h) = if k > n { (1.0, 1.0) } else { log_space_sums(n, 0.495, k) };
            assert!((a_l - b_l).abs() < 1e-11 && (a_h - b_h).abs() < 1e-11, "n={n} k={k}");
        }
    }

    #[test]
    fn optimal_q() {
        assert!((solve_binary_q(10, 3) - 0.306_089_051_244_80).abs() < 1e-10);
        assert!((solve_binary_q(1000, 489) - 0.489_003_663_73).abs() < 1e-10);
        assert_eq!(solve_binary_q(40, 20), 0.5);
        assert_eq!(solve_binary_q(40, 0), 0.0);
        assert_eq!(solve_binary_q(40, 40), 1.0);
    }

    #[test]
    fn intervals() {
        let i = binary_interval(10, 3, 0.9, IntervalMode::Midpoint).unwrap();
        assert!((i.q_lo - 0.107_444_798_45).abs() < 1e-9 && (i.q_hi - 0.570_574_825_34).abs() < 1e-9);
        let i = binary_interval(10, 3, 0.9, IntervalMode::Exact).unwrap();
        assert!((i.q_lo - 0.150_028_240_81).abs() < 1e-9 && (i.q_hi - 0.506_901_301_06).abs() < 1e-9);
        let i = binary_interval(1000, 489, 0.9, IntervalMode::Midpoint).unwrap();
        assert!((i.q_lo - 0.463_033_437_09).abs() < 1e-9 && (i.q_hi - 0.515_013_531_58).abs() < 1e-9);
        let i = binary_interval(10, 0, 0.9, IntervalMode::Exact).unwrap();
        assert_eq!((i.q_lo, i.one_sided), (0.0, Some(OneSided::Lower)));
        assert!(((1.0 - i.q_hi).powi(10) - 0.05).abs() < 1e-12);
        let i = binary_interval(10, 10, 0.9, IntervalMode::Midpoint).unwrap();
        assert_eq!((i.q_hi, i.one_sided), (1.0, Some(OneSided::Upper)));
        assert!(binary_interval(10, 3, 1.0, IntervalMode::Exact).is_err());
    }
}
