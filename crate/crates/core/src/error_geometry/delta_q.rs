use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cluster_geometry, normalize_with};
use crate::error::{PronyError, Result};
use crate::prony::{moments, prony_solve, MomentVector, SpikeSignal};

const DEFAULT_GRID: usize = 2001;
const GOLDEN_ITERS: usize = 60;

/// Concentration of the error set around a Prony variety.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaQ {
    pub q: usize,
    /// Largest model-space distance from a sample to the truncated variety
    /// part.
    pub max_distance: f64,
    /// `(1/h')^q eps`.
    pub scale: f64,
    /// `max_distance / scale`, an empirical value of the constant.
    pub constant: f64,
}

pub fn delta_q_concentration(
    signal: &SpikeSignal,
    eps: f64,
    samples: &[SpikeSignal],
    q: usize,
) -> Result<DeltaQ> {
    delta_q_concentration_with(signal, eps, samples, q, DEFAULT_GRID)
}

/// Max-norm distance, in model space, from the samples to the part of the
/// variety `S_q(G)` whose free moments `m_{q+1}, ..., m_{2d-1}` stay within
/// `eps (1/h')^k` of those of `G`.
///
/// One free moment is searched on a grid of `grid` points refined by golden
/// section; several free moments use a tensor grid of about `grid` points.
pub fn delta_q_concentration_with(
    signal: &SpikeSignal,
    eps: f64,
    samples: &[SpikeSignal],
    q: usize,
    grid: usize,
) -> Result<DeltaQ> {
    let d = signal.d();
    if q < d || q > 2 * d - 1 {
        return Err(PronyError::InvalidInput(format!("q = {q} outside [{d}, {}]", 2 * d - 1)));
    }
    let geo = cluster_geometry(signal);
    let g = normalize_with(signal, &geo)?;
    let alpha = 1.0 / geo.h_prime();
    let model: Vec<SpikeSignal> = samples
        .iter()
        .filter(|s| s.d() == d)
        .map(|s| normalize_with(s, &geo))
        .collect::<Result<_>>()?;
    let base = moments(&g, 2 * d);
    let free = 2 * d - 1 - q;
    let widths: Vec<f64> = (q + 1..2 * d).map(|k| eps * alpha.powi(k as i32)).collect();
    let point = |delta: &[f64]| -> Option<SpikeSignal> {
        let mut nu = base.clone();
        for (j, dj) in delta.iter().enumerate() {
            nu[q + 1 + j] += dj;
        }
        let s = prony_solve(&MomentVector::new(nu).ok()?).into_real_signal()?;
        (s.d() == d).then_some(s)
    };
    let dist = |a: &SpikeSignal, b: &Option<SpikeSignal>| b.as_ref().map_or(f64::INFINITY, |b| a.distance(b));

    let max_distance = match free {
        0 => model.iter().fold(0.0_f64, |m, s| m.max(s.distance(&g))),
        1 => {
            let w = widths[0];
            let n = grid.max(3);
            let ts: Vec<f64> = (0..n).map(|i| -w + 2.0 * w * i as f64 / (n - 1) as f64).collect();
            let pts: Vec<Option<SpikeSignal>> = ts.par_iter().map(|&t| point(&[t])).collect();
            model
                .par_iter()
                .map(|s| {
                    let (i, best) = pts
                        .iter()
                        .map(|p| dist(s, p))
                        .enumerate()
                        .min_by(|a, b| a.1.total_cmp(&b.1))
                        .unwrap_or((0, f64::INFINITY));
                    let lo = ts[i.saturating_sub(1)];
                    let hi = ts[(i + 1).min(n - 1)];
                    best.min(golden_min(|t| dist(s, &point(&[t])), lo, hi))
                })
                .reduce(|| 0.0, f64::max)
        }
        _ => {
            let per = ((grid as f64).powf(1.0 / free as f64).round() as usize).max(3);
            let total = per.pow(free as u32);
            let pts: Vec<Option<SpikeSignal>> = (0..total)
                .into_par_iter()
                .map(|mut idx| {
                    let delta: Vec<f64> = widths
                        .iter()
                        .map(|w| {
                            let i = idx % per;
                            idx /= per;
                            -w + 2.0 * w * i as f64 / (per - 1) as f64
                        })
                        .collect();
                    point(&delta)
                })
                .collect();
            model
                .par_iter()
                .map(|s| pts.iter().map(|p| dist(s, p)).fold(f64::INFINITY, f64::min))
                .reduce(|| 0.0, f64::max)
        }
    };
    let scale = alpha.powi(q as i32) * eps;
    Ok(DeltaQ {
        q,
        max_distance,
        scale,
        constant: max_distance / scale,
    })
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_ITERS {
        if f1 <= f2 {
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
    f1.min(f2)
}

#[cfg(test)]
mod tests {
    use super::super::sample_error_set;
    use super::*;

    #[test]
    fn signal_itself_is_at_distance_zero() {
        let f = SpikeSignal::new(vec![1.0, 1.0], vec![-0.1, 0.1]).unwrap();
        for q in 2..=3 {
            let r = delta_q_concentration(&f, 1e-4, std::slice::from_ref(&f), q).unwrap();
            assert!(r.max_distance < 1e-9, "q = {q}: {}", r.max_distance);
        }
    }

    #[test]
    fn point_variety_gives_model_reconstruction_error() {
        let f = SpikeSignal::new(vec![1.0, 1.0], vec![-0.1, 0.1]).unwrap();
        let s = sample_error_set(&f, 1e-5, 50, 1);
        let sig: Vec<SpikeSignal> = s.signals().cloned().collect();
        let r = delta_q_concentration(&f, 1e-5, &sig, 3).unwrap();
        let geo = cluster_geometry(&f);
        let g = normalize_with(&f, &geo).unwrap();
        let direct = sig
            .iter()
            .map(|s| normalize_with(s, &geo).unwrap().distance(&g))
            .fold(0.0, f64::max);
        assert!((r.max_distance - direct).abs() < 1e-12);
        let r2 = delta_q_concentration(&f, 1e-5, &sig, 2).unwrap();
        assert!(r2.max_distance < 0.5 * r.max_distance);
    }

    #[test]
    fn two_free_moments() {
        let f = SpikeSignal::new(vec![1.0, 1.0, 1.0], vec![-0.2, 0.0, 0.2]).unwrap();
        let eps = 1e-7;
        let s = sample_error_set(&f, eps, 64, 1);
        let sig: Vec<SpikeSignal> = s.signals().cloned().collect();
        let r3 = delta_q_concentration_with(&f, eps, &sig, 3, 400).unwrap();
        let r5 = delta_q_concentration(&f, eps, &sig, 5).unwrap();
        assert!(r3.max_distance.is_finite() && r3.max_distance < r5.max_distance);
    }
}
