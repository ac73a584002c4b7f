use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{PronyError, Result};
use crate::prony::{default_rank_tol, hankel_from_slice, solve_hankel, MomentVector, MonicPolynomial};

/// The moment Prony curve through `mu~ = (m_0, ..., m_{2d-2})`,
/// parametrized by `t = m_{2d-1}`. Its polynomial coefficients are affine
/// in `t`: `low_coeffs(t) = slope * t + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PronyCurve {
    d: usize,
    fixed_moments: Vec<f64>,
    slope: Vec<f64>,
    intercept: Vec<f64>,
    condition: f64,
    affinity_residual: f64,
}

/// Builds the curve from the first `2d - 1` moments.
pub fn prony_curve(mu_tilde: &[f64]) -> Result<PronyCurve> {
    if mu_tilde.is_empty() || mu_tilde.len() % 2 == 0 {
        return Err(PronyError::InvalidInput(format!(
            "a Prony curve needs 2d - 1 moments, got {}",
            mu_tilde.len()
        )));
    }
    if mu_tilde.iter().any(|v| !v.is_finite()) {
        return Err(PronyError::InvalidInput("non-finite moment".into()));
    }
    let d = mu_tilde.len().div_ceil(2);
    let m = hankel_from_slice(mu_tilde, d, d);
    let tol = default_rank_tol(d);
    let mut rhs = DVector::zeros(d);
    for i in 0..d - 1 {
        rhs[i] = -mu_tilde[d + i];
    }
    let (intercept, condition) = solve_hankel(&m, &rhs, tol)?;
    let mut e = DVector::zeros(d);
    e[d - 1] = -1.0;
    let (slope, _) = solve_hankel(&m, &e, tol)?;
    let mut curve = PronyCurve {
        d,
        fixed_moments: mu_tilde.to_vec(),
        slope: slope.iter().copied().collect(),
        intercept: intercept.iter().copied().collect(),
        condition,
        affinity_residual: 0.0,
    };
    curve.affinity_residual = curve.direct_solve_deviation(&m, tol)?;
    Ok(curve)
}

/// The curve through a full moment vector, together with its parameter
/// value `t = m_{2d-1}`.
pub fn prony_curve_of(mu: &MomentVector) -> Result<(PronyCurve, f64)> {
    Ok((prony_curve(mu.fixed_part())?, mu.last()))
}

impl PronyCurve {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn fixed_moments(&self) -> &[f64] {
        &self.fixed_moments
    }

    pub fn slope(&self) -> &[f64] {
        &self.slope
    }

    pub fn intercept(&self) -> &[f64] {
        &self.intercept
    }

    /// Condition number of `M_d`, which is the same at every point.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Largest relative deviation, found at construction, between
    /// `slope * t + intercept` and a direct Hankel solve at three values of
    /// `t`.
    pub fn affinity_residual(&self) -> f64 {
        self.affinity_residual
    }

    /// `M_d(mu~)`; it never reads `m_{2d-1}`.
    pub fn hankel(&self) -> DMatrix<f64> {
        hankel_from_slice(&self.fixed_moments, self.d, self.d)
    }

    pub fn coefficients(&self, t: f64) -> Vec<f64> {
        self.slope
            .iter()
            .zip(&self.intercept)
            .map(|(s, c)| s * t + c)
            .collect()
    }

    pub fn eval(&self, t: f64) -> MonicPolynomial {
        MonicPolynomial::new(self.coefficients(t)).expect("finite curve coefficients")
    }

    /// `(mu~, t)`.
    pub fn moments_at(&self, t: f64) -> MomentVector {
        let mut v = self.fixed_moments.clone();
        v.push(t);
        MomentVector::new(v).expect("valid moment vector")
    }

    /// Relative deviation of `c(t2)` from the affine interpolation of
    /// `c(t1)` and `c(t3)`.
    pub fn affinity_defect(&self, t1: f64, t2: f64, t3: f64) -> f64 {
        let (c1, c2, c3) = (self.coefficients(t1), self.coefficients(t2), self.coefficients(t3));
        let w = (t2 - t1) / (t3 - t1);
        let mut scale = 1.0_f64;
        let mut dev = 0.0_f64;
        for i in 0..self.d {
            let interp = (1.0 - w) * c1[i] + w * c3[i];
            scale = scale.max(c1[i].abs()).max(c2[i].abs()).max(c3[i].abs());
            dev = dev.max((c2[i] - interp).abs());
        }
        dev / scale
    }

    fn direct_solve_deviation(&self, m: &DMatrix<f64>, tol: f64) -> Result<f64> {
        let scale = 1.0 + self.fixed_moments.iter().fold(0.0_f64, |s, v| s.max(v.abs()));
        let mut worst = 0.0_f64;
        for t in [-scale, 0.5 * scale, 2.0 * scale] {
            let mut rhs = DVector::zeros(self.d);
            for i in 0..self.d - 1 {
                rhs[i] = -self.fixed_moments[self.d + i];
            }
            rhs[self.d - 1] = -t;
            let (c, _) = solve_hankel(m, &rhs, tol)?;
            let affine = self.coefficients(t);
            let norm = c.amax().max(1.0);
            for (a, b) in c.iter().zip(&affine) {
                worst = worst.max((a - b).abs() / norm);
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prony::{hankel_map, SpikeSignal};

    #[test]
    fn symmetric_pair_curve() {
        let c = prony_curve(&[2.0, 0.0, 0.5]).unwrap();
        assert_eq!(c.slope(), &[0.0, -2.0]);
        assert_eq!(c.intercept(), &[-0.25, 0.0]);
        assert_eq!(c.eval(0.0).low_coeffs(), &[-0.25, 0.0]);
        for t in [-3.0, -0.1, 0.7, 12.0] {
            let h = hankel_map(&c.moments_at(t)).unwrap();
            for (a, b) in h.low_coeffs().iter().zip(c.eval(t).low_coeffs()) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn single_spike_curve() {
        let c = prony_curve(&[2.0]).unwrap();
        assert_eq!(c.slope(), &[-0.5]);
        assert_eq!(c.eval(2.0).low_coeffs(), &[-1.0]);
    }

    #[test]
    fn base_point_reproduces_hankel_map() {
        let f = SpikeSignal::new(vec![1.0, -0.4, 2.5], vec![-0.9, 0.2, 0.75]).unwrap();
        let mu = f.prony_map();
        let (c, t) = prony_curve_of(&mu).unwrap();
        let h = hankel_map(&mu).unwrap();
        for (a, b) in h.low_coeffs().iter().zip(c.eval(t).low_coeffs()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(c.affinity_residual() < 1e-12);
        assert!(c.affinity_defect(-1.0, 0.3, 4.0) < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(prony_curve(&[1.0, 2.0]).is_err());
        assert!(matches!(prony_curve(&[0.0, 0.0, 1.0]), Err(PronyError::SingularHankel { .. })));
    }
}
