use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::prony::{prony_solve, MomentVector, SpikeSignal};

/// A real solution drawn from the error set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSample {
    pub index: usize,
    /// The moment perturbation `delta`, `|delta_k| <= eps`.
    pub perturbation: Vec<f64>,
    pub signal: SpikeSignal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSetSample {
    pub eps: f64,
    pub seed: u64,
    pub n_drawn: usize,
    pub samples: Vec<ErrorSample>,
    /// Draws whose moments had no real solution.
    pub discarded: usize,
    pub discarded_fraction: f64,
}

impl ErrorSetSample {
    pub fn signals(&self) -> impl Iterator<Item = &SpikeSignal> {
        self.samples.iter().map(|s| &s.signal)
    }
}

/// Perturbation number `i` of a draw of `n` from the cube `[-eps, eps]^{2d}`.
///
/// When `n >= 2^{2d}` the first `2^{2d}` draws are the corners. The others
/// cycle through uniform interior points, points on a random face and
/// random corners, each from its own stream of a ChaCha generator seeded
/// with `seed`, so a draw depends only on `(seed, i)`.
pub fn perturbation(d: usize, eps: f64, n: usize, i: usize, seed: u64) -> Vec<f64> {
    let dim = 2 * d;
    let corners = 1usize << dim;
    if n >= corners && i < corners {
        return (0..dim)
            .map(|k| if (i >> k) & 1 == 1 { eps } else { -eps })
            .collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    let mut v: Vec<f64> = (0..dim).map(|_| eps * rng.random_range(-1.0..=1.0)).collect();
    match i % 3 {
        0 => {}
        1 => {
            let k = rng.random_range(0..dim);
            v[k] = if rng.random_bool(0.5) { eps } else { -eps };
        }
        _ => {
            for x in v.iter_mut() {
                *x = if *x >= 0.0 { eps } else { -eps };
            }
        }
    }
    v
}

/// Draws `n` moment perturbations of `signal` from the closed max-norm ball
/// of radius `eps` and keeps the real solutions.
pub fn sample_error_set(signal: &SpikeSignal, eps: f64, n: usize, seed: u64) -> ErrorSetSample {
    let d = signal.d();
    let base = signal.moments(2 * d);
    let results: Vec<Option<ErrorSample>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let p = perturbation(d, eps, n, i, seed);
            let mu = MomentVector::new(base.iter().zip(&p).map(|(m, e)| m + e).collect()).ok()?;
            let s = prony_solve(&mu).into_real_signal()?;
            (s.d() == d).then_some(ErrorSample {
                index: i,
                perturbation: p,
                signal: s,
            })
        })
        .collect();
    let samples: Vec<ErrorSample> = results.into_iter().flatten().collect();
    let discarded = n - samples.len();
    ErrorSetSample {
        eps,
        seed,
        n_drawn: n,
        discarded,
        discarded_fraction: if n == 0 { 0.0 } else { discarded as f64 / n as f64 },
        samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corners_come_first() {
        let p: Vec<Vec<f64>> = (0..16).map(|i| perturbation(2, 0.5, 16, i, 0)).collect();
        let mut sorted = p.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted.dedup();
        assert_eq!(sorted.len(), 16);
        assert!(p.iter().flatten().all(|v| v.abs() == 0.5));
        let q = perturbation(2, 0.5, 10, 3, 7);
        assert!(q.iter().all(|v| v.abs() <= 0.5));
        assert_eq!(q, perturbation(2, 0.5, 12, 3, 7));
    }

    #[test]
    fn tiny_error_set_collapses_to_signal() {
        let f = SpikeSignal::new(vec![1.0, 1.0], vec![-0.1, 0.1]).unwrap();
        let s = sample_error_set(&f, 1e-13, 40, 5);
        assert_eq!(s.discarded, 0);
        for g in s.signals() {
            assert!(g.distance(&f) < 1e-9);
        }
        assert!(sample_error_set(&f, 1e-3, 0, 5).samples.is_empty());
    }

    #[test]
    fn samples_lie_in_the_error_set() {
        let f = SpikeSignal::new(vec![1.0, 1.0], vec![-0.1, 0.1]).unwrap();
        let eps = 1e-3;
        let s = sample_error_set(&f, eps, 200, 11);
        assert!(s.samples.len() > 100);
        let m = f.moments(4);
        for e in &s.samples {
            let mp = e.signal.moments(4);
            for k in 0..4 {
                assert!((mp[k] - m[k] - e.perturbation[k]).abs() < 1e-10);
                assert!((mp[k] - m[k]).abs() <= eps * (1.0 + 1e-8));
            }
        }
    }
}
