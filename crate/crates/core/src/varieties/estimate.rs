use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curve::{prony_curve, PronyCurve};
use crate::error::{PronyError, Result};
use crate::prony::{amplitudes_from_nodes, hankel_map, polynomial_roots, MomentVector, SpikeSignal};
use crate::solvability::hyperbolicity;

const DEFAULT_GRID: usize = 2001;
const GOLDEN_ITERS: usize = 100;
const BOUNDARY_ITERS: usize = 60;

/// Where to look for the last moment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SearchRange {
    Explicit { t_min: f64, t_max: f64 },
    /// `m'_{2d-1} +- 10 eps (1/h)^{2d-1}` for a cluster of size `h` measured
    /// with error `eps`.
    Cluster { h: f64, eps: f64 },
}

/// Constraints defining the admissible set: nodes inside `nodes` and
/// amplitude magnitudes inside `amplitudes`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityBox {
    pub nodes: Option<(f64, f64)>,
    pub amplitudes: Option<(f64, f64)>,
}

impl FeasibilityBox {
    pub fn contains(&self, s: &SpikeSignal) -> bool {
        let nodes_ok = self
            .nodes
            .is_none_or(|(lo, hi)| s.nodes().iter().all(|x| (lo..=hi).contains(x)));
        let amps_ok = self
            .amplitudes
            .is_none_or(|(lo, hi)| s.amplitudes().iter().all(|a| (lo..=hi).contains(&a.abs())));
        nodes_ok && amps_ok
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveEstimate {
    pub signal: SpikeSignal,
    /// Curve parameter of the estimate, `NaN` for estimates not on a curve.
    pub t: f64,
    /// Max-norm moment residual against the measurement.
    pub residual: f64,
}

pub fn curve_restricted_estimate(
    mu_noisy: &MomentVector,
    constraints: &FeasibilityBox,
    range: SearchRange,
) -> Result<CurveEstimate> {
    curve_restricted_estimate_with(mu_noisy, constraints, range, DEFAULT_GRID)
}

/// Minimizes the moment residual over the Prony curve of the first `2d - 1`
/// measured moments, restricted to hyperbolic, admissible points.
pub fn curve_restricted_estimate_with(
    mu_noisy: &MomentVector,
    constraints: &FeasibilityBox,
    range: SearchRange,
    grid: usize,
) -> Result<CurveEstimate> {
    let d = mu_noisy.d();
    let curve = prony_curve(mu_noisy.fixed_part())?;
    let t0 = mu_noisy.last();
    let (t_min, t_max) = match range {
        SearchRange::Explicit { t_min, t_max } => (t_min, t_max),
        SearchRange::Cluster { h, eps } => {
            let half = 10.0 * eps * h.recip().powi(2 * d as i32 - 1);
            (t0 - half, t0 + half)
        }
    };
    if !(t_min <= t_max) || !t_min.is_finite() || !t_max.is_finite() || grid < 2 {
        return Err(PronyError::InvalidInput(format!("bad search range [{t_min}, {t_max}]")));
    }
    let eval = |t: f64| candidate(&curve, mu_noisy, constraints, t);

    let mut ts: Vec<f64> = (0..grid)
        .map(|i| t_min + (t_max - t_min) * i as f64 / (grid - 1) as f64)
        .collect();
    if (t_min..=t_max).contains(&t0) {
        ts.push(t0);
        ts.sort_by(f64::total_cmp);
        ts.dedup();
    }
    let values: Vec<Option<CurveEstimate>> = ts.par_iter().map(|&t| eval(t)).collect();

    let mut best: Option<CurveEstimate> = None;
    let mut consider = |c: Option<CurveEstimate>| {
        if let Some(c) = c {
            if best.as_ref().is_none_or(|b| c.residual < b.residual) {
                best = Some(c);
            }
        }
    };
    let n = ts.len();
    let mut i = 0;
    while i < n {
        if values[i].is_none() {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && values[i].is_some() {
            i += 1;
        }
        let end = i - 1;
        // best grid point of the run, refined on its neighbourhood
        let k = (start..=end)
            .min_by(|&a, &b| {
                let ra = values[a].as_ref().map_or(f64::INFINITY, |v| v.residual);
                let rb = values[b].as_ref().map_or(f64::INFINITY, |v| v.residual);
                ra.total_cmp(&rb)
            })
            .unwrap_or(start);
        consider(values[k].clone());
        let lo = ts[k.saturating_sub(1)];
        let hi = ts[(k + 1).min(n - 1)];
        consider(golden_section(&eval, lo, hi));
        // run endpoints next to infeasible points
        if start > 0 {
            consider(boundary_point(&eval, ts[start], ts[start - 1]));
        }
        if end + 1 < n {
            consider(boundary_point(&eval, ts[end], ts[end + 1]));
        }
    }
    best.ok_or(PronyError::NoFeasiblePoint)
}

/// Projects the roots of `HM(mu)` to the real line and refits amplitudes;
/// the naive alternative to [`curve_restricted_estimate`].
pub fn real_projection_estimate(mu_noisy: &MomentVector) -> Result<CurveEstimate> {
    let q = hankel_map(mu_noisy)?;
    let mut nodes = polynomial_roots(&q)?.projected();
    nodes.sort_by(f64::total_cmp);
    let fit = amplitudes_from_nodes(mu_noisy, &nodes)?;
    let signal = SpikeSignal::new(fit.amplitudes, nodes)?;
    Ok(CurveEstimate {
        residual: residual(&signal, mu_noisy),
        signal,
        t: f64::NAN,
    })
}

fn residual(s: &SpikeSignal, mu: &MomentVector) -> f64 {
    s.moments(mu.values().len())
        .iter()
        .zip(mu.values())
        .fold(0.0, |r, (a, b)| r.max((a - b).abs()))
}

fn candidate(
    curve: &PronyCurve,
    mu_noisy: &MomentVector,
    constraints: &FeasibilityBox,
    t: f64,
) -> Option<CurveEstimate> {
    let q = curve.eval(t);
    if !hyperbolicity(&q, 1e-8).hyperbolic {
        return None;
    }
    let mut nodes = polynomial_roots(&q).ok()?.projected();
    nodes.sort_by(f64::total_cmp);
    let fit = amplitudes_from_nodes(&curve.moments_at(t), &nodes).ok()?;
    let signal = SpikeSignal::new(fit.amplitudes, nodes).ok()?;
    if !constraints.contains(&signal) {
        return None;
    }
    let r = residual(&signal, mu_noisy);
    r.is_finite().then_some(CurveEstimate { signal, t, residual: r })
}

fn golden_section<F>(f: &F, mut a: f64, mut b: f64) -> Option<CurveEstimate>
where
    F: Fn(f64) -> Option<CurveEstimate>,
{
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let score = |c: &Option<CurveEstimate>| c.as_ref().map_or(f64::INFINITY, |c| c.residual);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..GOLDEN_ITERS {
        if b - a <= f64::EPSILON * (a.abs() + b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        if score(&f1) <= score(&f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if score(&f1) <= score(&f2) {
        f1
    } else {
        f2
    }
}

/// Bisects between a feasible and an infeasible parameter and returns the
/// last feasible point found.
fn boundary_point<F>(f: &F, feasible: f64, infeasible: f64) -> Option<CurveEstimate>
where
    F: Fn(f64) -> Option<CurveEstimate>,
{
    let (mut good, mut bad) = (feasible, infeasible);
    let mut best = f(good);
    for _ in 0..BOUNDARY_ITERS {
        let m = 0.5 * (good + bad);
        if m == good || m == bad {
            break;
        }
        match f(m) {
            Some(c) => {
                good = m;
                best = Some(c);
            }
            None => bad = m,
        }
    }
    best
}
