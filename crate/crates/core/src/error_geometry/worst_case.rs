use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::delta_q::{delta_q_concentration, DeltaQ};
use super::sampling::sample_error_set;
use super::sandwich::sandwich_check;
use super::cluster_geometry;
use crate::error::{PronyError, Result};
use crate::prony::{prony_solve, MomentVector, SpikeSignal};

const ASCENT_SWEEPS: usize = 8;

/// What [`worst_case_errors_with`] computes besides the worst-case errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Samples per metric used as starting points for coordinate ascent.
    pub refine_top: usize,
    /// Inner-containment probes of the sandwich check; `None` skips it.
    pub sandwich_probes: Option<usize>,
    pub delta_q: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            refine_top: 5,
            sandwich_probes: Some(256),
            delta_q: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorScanReport {
    pub d: usize,
    pub epsilon: f64,
    pub h: f64,
    pub kappa: f64,
    pub seed: u64,
    pub n_samples: usize,
    pub n_real: usize,
    pub discarded_fraction: f64,
    pub rho: f64,
    pub rho_a: f64,
    pub rho_x: f64,
    /// Moment perturbations attaining `rho_a` and `rho_x`.
    pub worst_amplitude_perturbation: Vec<f64>,
    pub worst_node_perturbation: Vec<f64>,
    pub sandwich_inner_violations: usize,
    pub sandwich_outer_violations: usize,
    pub delta_q_max_distance: Vec<DeltaQ>,
}

pub fn worst_case_errors(signal: &SpikeSignal, eps: f64, n: usize, seed: u64) -> Result<ErrorScanReport> {
    worst_case_errors_with(signal, eps, n, seed, &ScanOptions::default())
}

/// Estimates `rho`, `rho_A` and `rho_X` as maxima over a sample of the
/// error set, followed by coordinate ascent on the moment perturbation
/// (clamped to the `eps` cube) from the best samples of each metric.
pub fn worst_case_errors_with(
    signal: &SpikeSignal,
    eps: f64,
    n: usize,
    seed: u64,
    opts: &ScanOptions,
) -> Result<ErrorScanReport> {
    if !(eps > 0.0 && eps.is_finite()) || n == 0 {
        return Err(PronyError::InvalidInput(format!("need eps > 0 and n >= 1, got {eps}, {n}")));
    }
    let d = signal.d();
    let set = sample_error_set(signal, eps, n, seed);
    let base = signal.moments(2 * d);
    let eval = |p: &[f64]| -> Option<[f64; 2]> {
        let mu = MomentVector::new(base.iter().zip(p).map(|(m, e)| m + e).collect()).ok()?;
        let s = prony_solve(&mu).into_real_signal()?;
        (s.d() == d).then(|| [s.amplitude_distance(signal), s.node_distance(signal)])
    };

    let mut best: [(f64, Vec<f64>); 2] = [(0.0, vec![0.0; 2 * d]), (0.0, vec![0.0; 2 * d])];
    let scored: Vec<([f64; 2], &[f64])> = set
        .samples
        .iter()
        .map(|s| {
            (
                [s.signal.amplitude_distance(signal), s.signal.node_distance(signal)],
                s.perturbation.as_slice(),
            )
        })
        .collect();
    for (v, p) in &scored {
        update(&mut best, v, p);
    }
    let starts: Vec<(usize, Vec<f64>)> = (0..2)
        .flat_map(|metric| {
            let mut order: Vec<usize> = (0..scored.len()).collect();
            order.sort_by(|&a, &b| scored[b].0[metric].total_cmp(&scored[a].0[metric]));
            order
                .into_iter()
                .take(opts.refine_top)
                .map(|i| (metric, scored[i].1.to_vec()))
                .collect::<Vec<_>>()
        })
        .collect();
    let refined: Vec<Vec<([f64; 2], Vec<f64>)>> = starts
        .par_iter()
        .map(|(metric, p)| ascend(&eval, p.clone(), *metric, eps))
        .collect();
    for (v, p) in refined.iter().flatten() {
        update(&mut best, v, p);
    }

    let geo = cluster_geometry(signal);
    let signals: Vec<SpikeSignal> = set.signals().cloned().collect();
    let (mut inner, mut outer) = (0, 0);
    let mut delta_q = Vec::new();
    if !geo.is_degenerate() {
        if let Some(probes) = opts.sandwich_probes {
            let r = sandwich_check(signal, eps, &signals, probes, seed)?;
            inner = r.inner_violations;
            outer = r.outer_violations;
        }
        if opts.delta_q {
            for q in d..2 * d {
                delta_q.push(delta_q_concentration(signal, eps, &signals, q)?);
            }
        }
    }
    let [(rho_a, pa), (rho_x, px)] = best;
    Ok(ErrorScanReport {
        d,
        epsilon: eps,
        h: geo.h,
        kappa: geo.kappa,
        seed,
        n_samples: n,
        n_real: set.samples.len(),
        discarded_fraction: set.discarded_fraction,
        rho: rho_a.max(rho_x),
        rho_a,
        rho_x,
        worst_amplitude_perturbation: pa,
        worst_node_perturbation: px,
        sandwich_inner_violations: inner,
        sandwich_outer_violations: outer,
        delta_q_max_distance: delta_q,
    })
}

fn update(best: &mut [(f64, Vec<f64>); 2], v: &[f64; 2], p: &[f64]) {
    for k in 0..2 {
        if v[k] > best[k].0 {
            best[k] = (v[k], p.to_vec());
        }
    }
}

/// Coordinate ascent on one metric; every evaluated point is returned so
/// the other metric benefits as well.
fn ascend<F>(eval: &F, mut p: Vec<f64>, metric: usize, eps: f64) -> Vec<([f64; 2], Vec<f64>)>
where
    F: Fn(&[f64]) -> Option<[f64; 2]>,
{
    let mut seen = Vec::new();
    let Some(mut cur) = eval(&p) else {
        return seen;
    };
    for _ in 0..ASCENT_SWEEPS {
        let mut improved = false;
        for k in 0..p.len() {
            let old = p[k];
            for cand in [eps, -eps, 0.5 * (old + eps), 0.5 * (old - eps)] {
                p[k] = cand.clamp(-eps, eps);
                if let Some(v) = eval(&p) {
                    seen.push((v, p.clone()));
                    if v[metric] > cur[metric] {
                        cur = v;
                        improved = true;
                        break;
                    }
                }
                p[k] = old;
            }
        }
        if !improved {
            break;
        }
    }
    seen
}

/// Unit amplitudes at `h * linspace(-1, 1, d)`; a single spike sits at 0.
pub fn symmetric_cluster(d: usize, h: f64) -> Result<SpikeSignal> {
    let nodes = if d == 1 {
        vec![0.0]
    } else {
        (0..d).map(|j| h * (-1.0 + 2.0 * j as f64 / (d - 1) as f64)).collect()
    };
    SpikeSignal::new(vec![1.0; d], nodes)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub h: f64,
    pub eps: f64,
    pub rho: f64,
    pub rho_a: f64,
    pub rho_x: f64,
    pub n_real: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub d: usize,
    pub p: f64,
    pub n: usize,
    pub seed: u64,
    pub points: Vec<ScalingPoint>,
    /// Least-squares slopes of `log(rho / eps)` against `log(1/h)`.
    pub slope_rho: f64,
    pub slope_rho_a: f64,
    pub slope_rho_x: f64,
}

/// Worst-case errors of the symmetric cluster family with `eps = h^p`.
/// Expected slopes are `2d - 2` for nodes and `2d - 1` for amplitudes and
/// the whole signal.
pub fn scaling_experiment(d: usize, h_list: &[f64], p: f64, n: usize, seed: u64) -> Result<ScalingReport> {
    if h_list.len() < 4 || h_list.windows(2).any(|w| !(w[1] < w[0])) || h_list.iter().any(|h| !(*h > 0.0)) {
        return Err(PronyError::InvalidInput("need at least 4 decreasing positive h values".into()));
    }
    let p_min = (2 * d - 1) as f64;
    if p < p_min {
        return Err(PronyError::InvalidInput(format!("p = {p} is below 2d - 1 = {p_min}")));
    }
    let opts = ScanOptions {
        sandwich_probes: None,
        delta_q: false,
        ..ScanOptions::default()
    };
    let points = h_list
        .iter()
        .map(|&h| {
            let eps = h.powf(p);
            let r = worst_case_errors_with(&symmetric_cluster(d, h)?, eps, n, seed, &opts)?;
            Ok(ScalingPoint {
                h,
                eps,
                rho: r.rho,
                rho_a: r.rho_a,
                rho_x: r.rho_x,
                n_real: r.n_real,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let slope = |f: fn(&ScalingPoint) -> f64| {
        let pts: Vec<(f64, f64)> = points.iter().map(|s| ((1.0 / s.h).ln(), (f(s) / s.eps).ln())).collect();
        least_squares_slope(&pts)
    };
    Ok(ScalingReport {
        d,
        p,
        n,
        seed,
        slope_rho: slope(|s| s.rho),
        slope_rho_a: slope(|s| s.rho_a),
        slope_rho_x: slope(|s| s.rho_x),
        points,
    })
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_spike_errors() {
        let f = SpikeSignal::new(vec![1.0], vec![0.0]).unwrap();
        let eps = 1e-6;
        let r = worst_case_errors(&f, eps, 20, 1).unwrap();
        // x = m1 / m0, a = m0
        assert!((r.rho_a - eps).abs() < 1e-12);
        assert!((r.rho_x - eps / (1.0 - eps)).abs() < 1e-12);
        assert_eq!(r.rho, r.rho_a.max(r.rho_x));
        assert!(r.delta_q_max_distance.is_empty());
    }

    #[test]
    fn errors_vanish_with_eps_and_grow_with_it() {
        let f = symmetric_cluster(2, 0.3).unwrap();
        let opts = ScanOptions { sandwich_probes: None, delta_q: false, ..ScanOptions::default() };
        let small = worst_case_errors_with(&f, 1e-12, 40, 3, &opts).unwrap();
        assert!(small.rho < 1e-8);
        let mut prev = 0.0;
        for eps in [1e-6, 2e-6, 4e-6, 8e-6] {
            let r = worst_case_errors_with(&f, eps, 40, 3, &opts).unwrap();
            assert!(r.rho > prev);
            prev = r.rho;
        }
    }

    #[test]
    fn report_is_reproducible() {
        let f = symmetric_cluster(2, 0.2).unwrap();
        let a = worst_case_errors(&f, 1e-5, 60, 42).unwrap();
        let b = worst_case_errors(&f, 1e-5, 60, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!((a.sandwich_inner_violations, a.sandwich_outer_violations), (0, 0));
        assert_eq!(a.delta_q_max_distance.len(), 2);
    }

    #[test]
    fn single_spike_scaling_is_flat() {
        let r = scaling_experiment(1, &[0.2, 0.1, 0.05, 0.025], 3.0, 8, 0).unwrap();
        assert!(r.slope_rho.abs() < 0.05 && r.slope_rho_x.abs() < 0.05);
        assert!(scaling_experiment(2, &[0.1, 0.2, 0.05, 0.01], 3.0, 8, 0).is_err());
        assert!(scaling_experiment(2, &[0.1, 0.05, 0.02], 3.0, 8, 0).is_err());
        assert!(scaling_experiment(2, &[0.2, 0.1, 0.05, 0.02], 2.0, 8, 0).is_err());
    }
}
