//! Parameter boxes and the grid + Nelder–Mead optimizer.

use crate::error::{domain, Error, Result};
use super::statistics::Sense;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

/// One search axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub scale: Scale,
    /// Grid points along the axis.
    pub points: usize,
}

impl Axis {
    pub fn linear(name: &str, lower: f64, upper: f64) -> Result<Axis> {
        Axis::new(name, lower, upper, Scale::Linear, 101)
    }

    pub fn log(name: &str, lower: f64, upper: f64) -> Result<Axis> {
        Axis::new(name, lower, upper, Scale::Log, 101)
    }

    pub fn new(name: &str, lower: f64, upper: f64, scale: Scale, points: usize) -> Result<Axis> {
        if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
            return Err(domain(format!("axis {name}: need finite lower < upper, got [{lower}, {upper}]")));
        }
        if scale == Scale::Log && !(lower > 0.0) {
            return Err(domain(format!("axis {name}: log scale needs lower > 0")));
        }
        if points == 0 {
            return Err(domain(format!("axis {name}: at least one grid point is required")));
        }
        Ok(Axis { name: name.to_string(), lower, upper, scale, points })
    }

    pub fn with_points(mut self, points: usize) -> Result<Axis> {
        if points == 0 {
            return Err(domain("at least one grid point is required"));
        }
        self.points = points;
        Ok(self)
    }

    /// Parameter value at scaled coordinate `t` in [0, 1].
    pub fn value(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        match self.scale {
            Scale::Linear => self.lower + t * (self.upper - self.lower),
            Scale::Log => self.lower * (self.upper / self.lower).powf(t),
        }
    }

    /// Scaled coordinate of grid node `i` out of `points`.
    pub fn node(i: usize, points: usize) -> f64 {
        if points <= 1 {
            0.5
        } else {
            i as f64 / (points - 1) as f64
        }
    }

    /// Grid values along the axis.
    pub fn grid(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.value(Axis::node(i, self.points))).collect()
    }
}

/// Named axes spanning the search space.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamBox {
    pub axes: Vec<Axis>,
}

impl ParamBox {
    pub fn new(axes: Vec<Axis>) -> Result<ParamBox> {
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.name == a.name) {
                return Err(domain(format!("parameter {} appears twice", a.name)));
            }
        }
        Ok(ParamBox { axes })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn names(&self) -> Vec<&str> {
        self.axes.iter().map(|a| a.name.as_str()).collect()
    }

    pub fn values(&self, t: &[f64]) -> Vec<f64> {
        self.axes.iter().zip(t).map(|(a, &x)| a.value(x)).collect()
    }

    /// Product of the axis point counts.
    pub fn cells(&self) -> usize {
        self.axes.iter().fold(1usize, |acc, a| acc.saturating_mul(a.points))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    /// Upper bound on grid cells; axes are thinned evenly when exceeded.
    pub grid_cap: usize,
    /// Simplex diameter, in scaled units, at which refinement stops.
    pub tolerance: f64,
    pub max_evaluations: usize,
    pub trace: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { grid_cap: 20_000, tolerance: 1e-6, max_evaluations: 4_000, trace: false }
    }
}

/// Best point found by [`optimize`], in parameter units.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub trace: Option<Vec<(Vec<f64>, f64)>>,
}

// Per-axis grid sizes honoring the cap.
fn grid_points(bx: &ParamBox, cap: usize) -> Vec<usize> {
    let mut pts: Vec<usize> = bx.axes.iter().map(|a| a.points).collect();
    while pts.iter().fold(1usize, |a, &p| a.saturating_mul(p)) > cap {
        let (i, _) = pts.iter().enumerate().max_by_key(|(_, &p)| p).unwrap();
        if pts[i] <= 2 {
            break;
        }
        pts[i] -= 1;
    }
    pts
}

/// Extremize `objective` over the box: a full grid scan (lowest index wins
/// ties), then Nelder–Mead from the best cell, confined to the box.
/// NaN values and values of the wrong infinite sign count as worst.
pub fn optimize<F>(objective: F, sense: Sense, bx: &ParamBox, opts: &SearchOptions) -> Result<Optimum>
where
    F: Fn(&[f64]) -> f64,
{
    let d = bx.dim();
    if d == 0 {
        return Err(domain("parameter box has no axes"));
    }
    let mut evaluations = 0usize;
    let mut trace = opts.trace.then(Vec::new);
    let mut score = |t: &[f64]| -> f64 {
        let x = bx.values(t);
        let v = objective(&x);
        evaluations += 1;
        if let Some(tr) = trace.as_mut() {
            tr.push((x, v));
        }
        let s = sense.sign() * v;
        if s.is_nan() {
            f64::NEG_INFINITY
        } else {
            s
        }
    };

    let pts = grid_points(bx, opts.grid_cap);
    let cells: usize = pts.iter().product();
    let mut best_t = vec![0.0; d];
    let mut best = f64::NEG_INFINITY;
    let mut found = false;
    let mut idx = vec![0usize; d];
    let mut t = vec![0.0; d];
    for _ in 0..cells {
        for k in 0..d {
            t[k] = Axis::node(idx[k], pts[k]);
        }
        let s = score(&t);
        if s > best || (!found && s > f64::NEG_INFINITY) {
            best = s;
            best_t.copy_from_slice(&t);
            found = true;
        }
        for k in (0..d).rev() {
            idx[k] += 1;
            if idx[k] < pts[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    if !found {
        return Err(Error::NoFit("the statistic is at its worst value everywhere in the box".into()));
    }

    let step: Vec<f64> = pts.iter().map(|&p| if p > 1 { 1.0 / (p - 1) as f64 } else { 0.25 }).collect();
    let (t_best, s_best) = nelder_mead(&mut score, best_t, best, &step, opts);
    drop(score);
    Ok(Optimum { x: bx.values(&t_best), value: sense.sign() * s_best, evaluations, trace })
}

fn nelder_mead(
    score: &mut dyn FnMut(&[f64]) -> f64,
    start: Vec<f64>,
    start_score: f64,
    step: &[f64],
    opts: &SearchOptions,
) -> (Vec<f64>, f64) {
    let d = start.len();
    let clamp = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(|x| x.clamp(0.0, 1.0)).collect() };
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(start.clone(), start_score)];
    for k in 0..d {
        let mut v = start.clone();
        v[k] = if v[k] + step[k] <= 1.0 { v[k] + step[k] } else { v[k] - step[k] };
        let v = clamp(v);
        let s = score(&v);
        simplex.push((v, s));
    }
    let mut used = d + 1;
    loop {
        // Best first; stable sort keeps the earlier vertex on ties.
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let diameter = simplex[1..]
            .iter()
            .map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diameter < opts.tolerance || used >= opts.max_evaluations {
            break;
        }
        let mut centroid = vec![0.0; d];
        for (v, _) in &simplex[..d] {
            for k in 0..d {
                centroid[k] += v[k] / d as f64;
            }
        }
        let worst = simplex[d].clone();
        let along = |coef: f64| -> Vec<f64> {
            clamp((0..d).map(|k| centroid[k] + coef * (worst.0[k] - centroid[k])).collect())
        };
        let xr = along(-1.0);
        let sr = score(&xr);
        used += 1;
        if sr > simplex[0].1 {
            let xe = along(-2.0);
            let se = score(&xe);
            used += 1;
            simplex[d] = if se > sr { (xe, se) } else { (xr, sr) };
            continue;
        }
        if sr > simplex[d - 1].1 {
            simplex[d] = (xr, sr);
            continue;
        }
        let outside = sr >= worst.1;
        let xc = along(if outside { -0.5 } else { 0.5 });
        let sc = score(&xc);
        used += 1;
        if (outside && sc >= sr) || (!outside && sc > worst.1) {
            simplex[d] = (xc, sc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let v: Vec<f64> = (0..d).map(|k| best[k] + 0.5 * (vertex.0[k] - best[k])).collect();
            let s = score(&v);
            *vertex = (v, s);
        }
        used += d;
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    let (v, s) = simplex.swap_remove(0);
    (v, s)
}
