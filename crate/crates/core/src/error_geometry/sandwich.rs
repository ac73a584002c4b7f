use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::perturbation;
use super::{cluster_geometry, denormalize, normalize_with};
use crate::error::{PronyError, Result};
use crate::prony::{moments, prony_solve, MomentVector, SpikeSignal};

const U: f64 = f64::EPSILON;
/// Rounding allowance, in units of `U` times the absolute moment sums.
const SLACK: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub eps: f64,
    pub eps_prime: f64,
    pub h: f64,
    pub h_prime: f64,
    pub kappa: f64,
    pub n_samples: usize,
    /// Samples whose model image leaves `Pi_{eps, 1/h'}(G)`.
    pub outer_violations: usize,
    /// Largest `|m_k(G') - m_k(G)| / (eps h'^{-k})` over the samples.
    pub outer_max_ratio: f64,
    pub inner_probes: usize,
    /// Probes of `Pi_{eps', 1/h}(G)` with no real solution.
    pub inner_skipped: usize,
    /// Probes whose preimage leaves `E_eps(F)`.
    pub inner_violations: usize,
    pub inner_max_ratio: f64,
}

/// `(sum_j |a_j| |x_j|^k)_k`, the scale of the rounding error in `m_k`.
fn abs_moments(s: &SpikeSignal, count: usize) -> Vec<f64> {
    let abs = SpikeSignal::new(
        s.amplitudes().iter().map(|a| a.abs()).collect(),
        s.nodes().iter().map(|x| x.abs()).collect(),
    )
    .expect("finite signal");
    moments(&abs, count)
}

/// Moment differences `m(b) - m(a)` and their rounding allowances.
fn differences(a: &SpikeSignal, b: &SpikeSignal, count: usize) -> (Vec<f64>, Vec<f64>) {
    let (ma, mb) = (moments(a, count), moments(b, count));
    let (sa, sb) = (abs_moments(a, count), abs_moments(b, count));
    let diff = mb.iter().zip(&ma).map(|(x, y)| x - y).collect();
    let slack = sa.iter().zip(&sb).map(|(x, y)| SLACK * U * (x + y)).collect();
    (diff, slack)
}

/// Checks both inclusions `Pi_{eps', 1/h}(G) ⊂ E_eps(F) ⊂ Pi_{eps, 1/h'}(G)`.
///
/// Outer: every sample `F'` is mapped to model space and tested against the
/// parallelepiped at its realized error level `max_k |m_k(F') - m_k(F)|`,
/// which equals `eps` up to rounding. Inner: `probes` points of
/// `Pi_{eps', 1/h}(G)` (corners first) are solved in model space, mapped
/// back, and their moment errors compared with `eps`.
pub fn sandwich_check(
    signal: &SpikeSignal,
    eps: f64,
    samples: &[SpikeSignal],
    probes: usize,
    seed: u64,
) -> Result<SandwichReport> {
    let geo = cluster_geometry(signal);
    let g = normalize_with(signal, &geo)?;
    let d = signal.d();
    let count = 2 * d;
    let alpha = 1.0 / geo.h_prime();
    let eps_prime = geo.eps_prime(eps, d);

    let outer: Vec<(bool, f64)> = samples
        .par_iter()
        .filter(|s| s.d() == d)
        .map(|s| {
            let (delta, slack) = differences(signal, s, count);
            let eps_s = delta
                .iter()
                .zip(&slack)
                .fold(0.0_f64, |m, (x, e)| m.max(x.abs() + e));
            let gp = normalize_with(s, &geo).expect("nondegenerate geometry");
            let (mdelta, mslack) = differences(&g, &gp, count);
            let mut violated = false;
            let mut ratio = 0.0_f64;
            for k in 0..count {
                let bound = eps_s * alpha.powi(k as i32);
                if mdelta[k].abs() > bound + mslack[k] {
                    violated = true;
                }
                ratio = ratio.max(mdelta[k].abs() / (eps * alpha.powi(k as i32)));
            }
            (violated, ratio)
        })
        .collect();

    let base = moments(&g, count);
    let inner: Vec<Option<(bool, f64)>> = (0..probes)
        .into_par_iter()
        .map(|j| {
            let u = perturbation(d, 1.0, probes, j, seed);
            let nu: Vec<f64> = (0..count)
                .map(|k| base[k] + eps_prime * geo.h.powi(-(k as i32)) * u[k])
                .collect();
            let gpp = prony_solve(&MomentVector::new(nu).ok()?).into_real_signal()?;
            if gpp.d() != d {
                return None;
            }
            let (mdelta, mslack) = differences(&g, &gpp, count);
            let eps_s = (0..count).fold(0.0_f64, |m, k| {
                m.max((mdelta[k].abs() + mslack[k]) * geo.h.powi(k as i32))
            });
            let fpp = denormalize(&gpp, &geo).ok()?;
            let (delta, slack) = differences(signal, &fpp, count);
            let level = eps_s * (1.0 + geo.kappa.abs()).powi(count as i32 - 1);
            let violated = (0..count).any(|i| delta[i].abs() > level + slack[i]);
            let ratio = delta.iter().fold(0.0_f64, |m, x| m.max(x.abs())) / eps;
            Some((violated, ratio))
        })
        .collect();

    Ok(SandwichReport {
        eps,
        eps_prime,
        h: geo.h,
        h_prime: geo.h_prime(),
        kappa: geo.kappa,
        n_samples: outer.len(),
        outer_violations: outer.iter().filter(|o| o.0).count(),
        outer_max_ratio: outer.iter().fold(0.0, |m, o| m.max(o.1)),
        inner_probes: probes,
        inner_skipped: inner.iter().filter(|o| o.is_none()).count(),
        inner_violations: inner.iter().flatten().filter(|o| o.0).count(),
        inner_max_ratio: inner.iter().flatten().fold(0.0, |m, o| m.max(o.1)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub probes: usize,
    /// Probes where both memberships were decided outside rounding range.
    pub decided: usize,
    pub inside: usize,
    pub skipped: usize,
    pub mismatches: usize,
}

/// For a cluster centred at zero, compares membership of model probes in
/// `Pi_{eps, 1/h}(G)` with membership of their preimages in `E_eps(F)`.
/// Probes are spread over `[-1.5, 1.5]` times the parallelepiped.
pub fn kappa_zero_equivalence(
    signal: &SpikeSignal,
    eps: f64,
    probes: usize,
    seed: u64,
) -> Result<EquivalenceReport> {
    let geo = cluster_geometry(signal);
    if geo.kappa.abs() > 1e-12 * geo.h.max(1e-300) {
        return Err(PronyError::InvalidInput(format!(
            "cluster centre {} is not zero",
            geo.kappa
        )));
    }
    let g = normalize_with(signal, &geo)?;
    let d = signal.d();
    let count = 2 * d;
    let base = moments(&g, count);
    let outcomes: Vec<Option<Option<(bool, bool)>>> = (0..probes)
        .into_par_iter()
        .map(|j| {
            let scale = [0.5, 0.9, 1.1, 1.5][j % 4];
            let u = perturbation(d, scale, probes, j, seed);
            let nu: Vec<f64> = (0..count)
                .map(|k| base[k] + eps * geo.h.powi(-(k as i32)) * u[k])
                .collect();
            let gpp = prony_solve(&MomentVector::new(nu).ok()?).into_real_signal()?;
            if gpp.d() != d {
                return None;
            }
            let (mdelta, mslack) = differences(&g, &gpp, count);
            let fpp = denormalize(&gpp, &geo).ok()?;
            let (delta, slack) = differences(signal, &fpp, count);
            let mut undecided = false;
            let mut in_pi = true;
            let mut in_e = true;
            for k in 0..count {
                let hk = geo.h.powi(k as i32);
                let r_model = mdelta[k].abs() * hk;
                let r_orig = delta[k].abs();
                undecided |= (r_model - eps).abs() <= mslack[k] * hk + 1e-9 * eps;
                undecided |= (r_orig - eps).abs() <= slack[k] + 1e-9 * eps;
                in_pi &= r_model <= eps;
                in_e &= r_orig <= eps;
            }
            Some((!undecided).then_some((in_pi, in_e)))
        })
        .collect();
    let decided: Vec<(bool, bool)> = outcomes.iter().flatten().flatten().copied().collect();
    Ok(EquivalenceReport {
        probes,
        decided: decided.len(),
        inside: decided.iter().filter(|p| p.0).count(),
        skipped: outcomes.iter().filter(|o| o.is_none()).count(),
        mismatches: decided.iter().filter(|p| p.0 != p.1).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::sample_error_set;
    use super::*;

    #[test]
    fn centred_pair_has_no_violations() {
        let f = SpikeSignal::new(vec![1.0, 1.0], vec![-0.1, 0.1]).unwrap();
        let eps = 1e-3;
        let s = sample_error_set(&f, eps, 300, 2);
        let sig: Vec<SpikeSignal> = s.signals().cloned().collect();
        let r = sandwich_check(&f, eps, &sig, 200, 3).unwrap();
        assert_eq!((r.outer_violations, r.inner_violations), (0, 0));
        assert!(r.outer_max_ratio <= 1.0 + 1e-6 && r.outer_max_ratio > 0.5);
        let e = kappa_zero_equivalence(&f, eps, 400, 4).unwrap();
        assert_eq!(e.mismatches, 0);
        assert!(e.decided > 300 && e.inside > 0 && e.inside < e.decided);
    }

    #[test]
    fn shifted_cluster_with_huge_error() {
        let f = SpikeSignal::new(vec![1.0, 2.0], vec![0.9, 1.1]).unwrap();
        let s = sample_error_set(&f, 1.0, 300, 8);
        let sig: Vec<SpikeSignal> = s.signals().cloned().collect();
        let r = sandwich_check(&f, 1.0, &sig, 200, 9).unwrap();
        assert_eq!((r.outer_violations, r.inner_violations), (0, 0));
        assert!(kappa_zero_equivalence(&f, 1.0, 10, 0).is_err());
    }
}
