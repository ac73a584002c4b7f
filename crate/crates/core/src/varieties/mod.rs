//! Prony varieties: the sets of signals, moments and polynomials that share
//! their first `q + 1` moments.
//!
//! Unknowns of the linear description are indexed `c_1, ..., c_d`, where
//! `c_i` is the coefficient of `z^{d-i}` in the monic polynomial. In
//! [`MonicPolynomial`] storage that is `low_coeffs()[d - i]`, and for a
//! polynomial with roots `x_1, ..., x_d` it equals `(-1)^i sigma_i(x)`.

mod curve;
mod estimate;
mod trace;

pub use curve::{prony_curve, prony_curve_of, PronyCurve};
pub use estimate::{
    curve_restricted_estimate, curve_restricted_estimate_with, real_projection_estimate,
    CurveEstimate, FeasibilityBox, SearchRange,
};
pub use trace::{
    collision_diagnostics, sample_curve, trace_curve, BoundaryCrossing, CollisionFinding,
    CollisionProbe, CollisionReport, CurveSample, CurveTrace, EscapeFinding, EscapeProbe,
    HypothesisCheck,
};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PronyError, Result};
use crate::prony::{hankel_map, MomentVector, MonicPolynomial};
use crate::solvability::is_hyperbolic;

/// The variety `S_q(mu)`: everything sharing `m_0, ..., m_q` with `mu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarietySpec {
    pub d: usize,
    pub q: usize,
    pub base_moments: MomentVector,
}

impl VarietySpec {
    pub fn new(base_moments: MomentVector, q: usize) -> Result<Self> {
        let d = base_moments.d();
        if q < d || q > 2 * d - 1 {
            return Err(PronyError::InvalidInput(format!(
                "q = {q} outside [{d}, {}]",
                2 * d - 1
            )));
        }
        Ok(Self { d, q, base_moments })
    }

    pub fn linear_system(&self) -> LinearVarietySystem {
        build_system(&self.base_moments, self.q)
    }

    /// Number of free moments `m_{q+1}, ..., m_{2d-1}`.
    pub fn free_count(&self) -> usize {
        2 * self.d - 1 - self.q
    }

    /// The polynomial at the point whose free moments are `free`.
    pub fn point(&self, free: &[f64]) -> Result<MonicPolynomial> {
        if free.len() != self.free_count() {
            return Err(PronyError::InvalidInput(format!(
                "expected {} free moments, got {}",
                self.free_count(),
                free.len()
            )));
        }
        let mut values = self.base_moments.values()[..=self.q].to_vec();
        values.extend_from_slice(free);
        hankel_map(&MomentVector::new(values)?)
    }

    /// Samples the variety with free moments uniform in
    /// `base +- radius`; sample `i` draws from its own random stream.
    pub fn sample(&self, n: usize, radius: f64, seed: u64) -> Vec<VarietySample> {
        let base = &self.base_moments.values()[self.q + 1..];
        (0..n)
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let free: Vec<f64> = base
                    .iter()
                    .map(|m| m + radius * rng.random_range(-1.0..=1.0))
                    .collect();
                let polynomial = self.point(&free).ok();
                let hyperbolic = polynomial.as_ref().is_some_and(is_hyperbolic);
                VarietySample {
                    free_moments: free,
                    polynomial,
                    hyperbolic,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarietySample {
    pub free_moments: Vec<f64>,
    pub polynomial: Option<MonicPolynomial>,
    pub hyperbolic: bool,
}

/// Rows `k = d, ..., q` of `mu_{k-1} c_1 + ... + mu_{k-d} c_d = -mu_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearVarietySystem {
    pub d: usize,
    pub q: usize,
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
}

impl LinearVarietySystem {
    /// `(c_1, ..., c_d)` of a monic polynomial.
    pub fn unknowns_from_polynomial(p: &MonicPolynomial) -> Vec<f64> {
        p.low_coeffs().iter().rev().copied().collect()
    }

    pub fn polynomial_from_unknowns(c: &[f64]) -> Result<MonicPolynomial> {
        MonicPolynomial::new(c.iter().rev().copied().collect())
    }

    /// Max-norm residual of the rows at `(c_1, ..., c_d)`.
    pub fn residual(&self, c: &[f64]) -> f64 {
        let c = DVector::from_column_slice(c);
        (&self.matrix * c - &self.rhs).amax()
    }

    pub fn polynomial_residual(&self, p: &MonicPolynomial) -> f64 {
        self.residual(&Self::unknowns_from_polynomial(p))
    }
}

pub fn variety_linear_system(mu: &MomentVector, q: usize) -> Result<LinearVarietySystem> {
    Ok(VarietySpec::new(mu.clone(), q)?.linear_system())
}

fn build_system(mu: &MomentVector, q: usize) -> LinearVarietySystem {
    let d = mu.d();
    let m = mu.values();
    let rows = q - d + 1;
    let matrix = DMatrix::from_fn(rows, d, |r, j| m[d + r - 1 - j]);
    let rhs = DVector::from_fn(rows, |r, _| -m[d + r]);
    LinearVarietySystem { d, q, matrix, rhs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prony::{vieta, SpikeSignal};

    fn mv(v: &[f64]) -> MomentVector {
        MomentVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn system_layouts() {
        let s = variety_linear_system(&mv(&[2.0, 0.0, 0.5, 0.7]), 2).unwrap();
        assert_eq!(s.matrix, DMatrix::from_row_slice(1, 2, &[0.0, 2.0]));
        assert_eq!(s.rhs, DVector::from_vec(vec![-0.5]));

        let s = variety_linear_system(&mv(&[2.0, 0.0, 0.5, 0.0]), 3).unwrap();
        let c = s.matrix.clone().lu().solve(&s.rhs).unwrap();
        assert_eq!(c.as_slice(), &[0.0, -0.25]);
        let p = LinearVarietySystem::polynomial_from_unknowns(c.as_slice()).unwrap();
        assert_eq!(p.low_coeffs(), &[-0.25, 0.0]);

        let mu = mv(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let s = variety_linear_system(&mu, 3).unwrap();
        assert_eq!(s.matrix, DMatrix::from_row_slice(1, 3, &[3.0, 2.0, 1.0]));
        assert_eq!(s.rhs[0], -4.0);
        assert!(variety_linear_system(&mu, 2).is_err());
        assert!(variety_linear_system(&mu, 6).is_err());
    }

    #[test]
    fn signal_polynomial_lies_on_every_variety() {
        let f = SpikeSignal::new(vec![0.7, -1.2, 2.0], vec![-0.8, 0.1, 0.6]).unwrap();
        let mu = f.prony_map();
        let p = vieta(f.nodes()).unwrap();
        for q in 3..=5 {
            let s = variety_linear_system(&mu, q).unwrap();
            assert!(s.polynomial_residual(&p) < 1e-12, "q = {q}");
        }
    }

    #[test]
    fn samples_satisfy_their_system_and_are_reproducible() {
        let f = SpikeSignal::new(vec![1.0, 1.5, 0.5], vec![-1.0, 0.0, 1.0]).unwrap();
        let spec = VarietySpec::new(f.prony_map(), 3).unwrap();
        assert_eq!(spec.free_count(), 2);
        let a = spec.sample(20, 0.3, 9);
        assert_eq!(a, spec.sample(20, 0.3, 9));
        let sys = spec.linear_system();
        for s in &a {
            let p = s.polynomial.as_ref().unwrap();
            assert!(sys.polynomial_residual(p) < 1e-10);
        }
    }
}
