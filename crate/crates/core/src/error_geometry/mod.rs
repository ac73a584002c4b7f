//! Geometry of the error set `E_eps(F)`: all signals whose first `2d`
//! moments are within `eps` of those of `F`.
//!
//! A signal whose nodes form a cluster of half-width `h` around `kappa` is
//! compared through its model signal `G`, obtained by mapping the cluster
//! onto `[-1, 1]` with `x -> (x - kappa) / h`. All distances use the max
//! norm, `||F - F'|| = max(||A - A'||, ||X - X'||)`.

mod delta_q;
mod sampling;
mod sandwich;
mod worst_case;

pub use delta_q::{delta_q_concentration, delta_q_concentration_with, DeltaQ};
pub use sampling::{perturbation, sample_error_set, ErrorSample, ErrorSetSample};
pub use sandwich::{kappa_zero_equivalence, sandwich_check, EquivalenceReport, SandwichReport};
pub use worst_case::{
    scaling_experiment, symmetric_cluster, worst_case_errors, worst_case_errors_with,
    ErrorScanReport, ScalingPoint, ScalingReport, ScanOptions,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PronyError, Result};
use crate::prony::{moments, prony_solve, MomentVector, SpikeSignal};

/// Half-width `h` and centre `kappa` of the node interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterGeometry {
    pub h: f64,
    pub kappa: f64,
}

impl ClusterGeometry {
    pub fn is_degenerate(&self) -> bool {
        self.h <= 0.0
    }

    /// `h' = h / (1 + |kappa|)`.
    pub fn h_prime(&self) -> f64 {
        self.h / (1.0 + self.kappa.abs())
    }

    /// `eps' = (1 + |kappa|)^{-(2d-1)} eps`.
    pub fn eps_prime(&self, eps: f64, d: usize) -> f64 {
        eps * (1.0 + self.kappa.abs()).powi(-(2 * d as i32 - 1))
    }

    pub fn to_model(&self, x: f64) -> f64 {
        (x - self.kappa) / self.h
    }

    pub fn from_model(&self, x: f64) -> f64 {
        self.kappa + self.h * x
    }
}

/// For a single spike `h = 0` and `kappa = x_1`.
pub fn cluster_geometry(signal: &SpikeSignal) -> ClusterGeometry {
    let x = signal.nodes();
    let (lo, hi) = (x[0], x[x.len() - 1]);
    ClusterGeometry {
        h: 0.5 * (hi - lo),
        kappa: 0.5 * (lo + hi),
    }
}

/// The model signal `G` of `F` and the geometry used to build it.
pub fn normalize(signal: &SpikeSignal) -> Result<(SpikeSignal, ClusterGeometry)> {
    let g = cluster_geometry(signal);
    Ok((normalize_with(signal, &g)?, g))
}

/// Maps any signal into model coordinates of a fixed geometry; used to
/// carry error-set samples `F'` along with the model signal of `F`.
pub fn normalize_with(signal: &SpikeSignal, geometry: &ClusterGeometry) -> Result<SpikeSignal> {
    if geometry.is_degenerate() {
        return Err(PronyError::DegenerateCluster);
    }
    SpikeSignal::new(
        signal.amplitudes().to_vec(),
        signal.nodes().iter().map(|&x| geometry.to_model(x)).collect(),
    )
}

pub fn denormalize(model: &SpikeSignal, geometry: &ClusterGeometry) -> Result<SpikeSignal> {
    SpikeSignal::new(
        model.amplitudes().to_vec(),
        model.nodes().iter().map(|&x| geometry.from_model(x)).collect(),
    )
}

/// Moments of the model signal.
pub fn model_moments(signal: &SpikeSignal, count: usize) -> Result<Vec<f64>> {
    let (g, _) = normalize(signal)?;
    Ok(moments(&g, count))
}

/// Model moment differences from original ones:
/// `h^{-k} sum_i binom(k, i) (-kappa)^{k-i} delta_i`.
pub fn model_moment_differences(delta: &[f64], geometry: &ClusterGeometry) -> Vec<f64> {
    (0..delta.len())
        .map(|k| {
            let mut binom = 1.0;
            let mut s = 0.0;
            for (i, di) in delta.iter().enumerate().take(k + 1) {
                s += binom * (-geometry.kappa).powi((k - i) as i32) * di;
                binom = binom * (k - i) as f64 / (i + 1) as f64;
            }
            s * geometry.h.powi(-(k as i32))
        })
        .collect()
}

/// The moment metric: max-norm distance between the first `2d` moments.
pub fn moment_distance(a: &SpikeSignal, b: &SpikeSignal) -> f64 {
    let count = 2 * a.d().max(b.d());
    moments(a, count)
        .iter()
        .zip(moments(b, count))
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Membership in the closed parallelepiped `Pi_{eps, alpha}(G)`:
/// `|m_k(G') - m_k(G)| <= eps alpha^k` for `k < 2d`.
pub fn pi_membership(g_prime: &SpikeSignal, g: &SpikeSignal, eps: f64, alpha: f64) -> bool {
    let count = 2 * g.d();
    moments(g_prime, count)
        .iter()
        .zip(moments(g, count))
        .enumerate()
        .all(|(k, (a, b))| (a - b).abs() <= eps * alpha.powi(k as i32))
}

/// `(eta, m, M)`-regularity of a model signal: nodes in `[-1, 1]` at least
/// `eta` apart and amplitude magnitudes in `[m, M]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityParams {
    pub eta: f64,
    pub m_lo: f64,
    pub m_hi: f64,
}

impl RegularityParams {
    pub fn new(eta: f64, m_lo: f64, m_hi: f64) -> Self {
        Self { eta, m_lo, m_hi }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        let eta_max = if d > 1 { 2.0 / (d - 1) as f64 } else { f64::INFINITY };
        if !(self.eta > 0.0 && self.eta <= eta_max) {
            return Err(PronyError::InvalidInput(format!(
                "eta = {} outside (0, {eta_max}]",
                self.eta
            )));
        }
        if !(self.m_lo > 0.0 && self.m_lo < self.m_hi && self.m_hi.is_finite()) {
            return Err(PronyError::InvalidInput(format!(
                "amplitude bounds [{}, {}] are not 0 < m < M",
                self.m_lo, self.m_hi
            )));
        }
        Ok(())
    }

    pub fn is_regular(&self, g: &SpikeSignal) -> bool {
        let x = g.nodes();
        x.iter().all(|v| (-1.0..=1.0).contains(v))
            && x.windows(2).all(|w| w[1] - w[0] >= self.eta)
            && g.amplitudes()
                .iter()
                .all(|a| (self.m_lo..=self.m_hi).contains(&a.abs()))
    }

    /// A random regular model signal: node gaps are `eta` plus a uniform
    /// share of the slack, amplitude signs and magnitudes uniform.
    pub fn sample<R: Rng + ?Sized>(&self, d: usize, rng: &mut R) -> Result<SpikeSignal> {
        self.validate(d)?;
        let slack = 2.0 - (d as f64 - 1.0) * self.eta;
        let mut u: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..=slack)).collect();
        u.sort_by(f64::total_cmp);
        let nodes: Vec<f64> = u
            .iter()
            .enumerate()
            .map(|(j, v)| (-1.0 + v + j as f64 * self.eta).clamp(-1.0, 1.0))
            .collect();
        let amps: Vec<f64> = (0..d)
            .map(|_| {
                let m = rng.random_range(self.m_lo..=self.m_hi);
                if rng.random_bool(0.5) {
                    m
                } else {
                    -m
                }
            })
            .collect();
        SpikeSignal::new(amps, nodes)
    }
}

/// Empirical bi-Lipschitz ratios `||G'' - G'|| / d(G', G'')` over random
/// pairs in the moment cube of radius `radius` around `g`; returns
/// `(min, max)` over the pairs that solve to real signals.
pub fn bilipschitz_ratio_range(
    g: &SpikeSignal,
    radius: f64,
    n: usize,
    seed: u64,
) -> Option<(f64, f64)> {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    let base = moments(g, 2 * g.d());
    let solve = |v: Vec<f64>| -> Option<SpikeSignal> {
        prony_solve(&MomentVector::new(v).ok()?).into_real_signal()
    };
    let mut lo = f64::INFINITY;
    let mut hi = 0.0_f64;
    for i in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let p1: Vec<f64> = base.iter().map(|m| m + radius * rng.random_range(-1.0..=1.0)).collect();
        let p2: Vec<f64> = base.iter().map(|m| m + radius * rng.random_range(-1.0..=1.0)).collect();
        let (Some(a), Some(b)) = (solve(p1), solve(p2)) else {
            continue;
        };
        let md = moment_distance(&a, &b);
        if md > 0.0 {
            let r = a.distance(&b) / md;
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    (hi > 0.0).then_some((lo, hi))
}
