use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PronyError, Result};

/// `Q(z) = c_0 + c_1 z + ... + c_{d-1} z^{d-1} + z^d`.
///
/// Only the low coefficients are stored; the leading one is implicitly 1.
/// Through Vieta, `c_{d-i} = (-1)^i sigma_i` where `sigma_i` is the i-th
/// elementary symmetric function of the roots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonicPolynomial {
    low_coeffs: Vec<f64>,
}

impl MonicPolynomial {
    pub fn new(low_coeffs: Vec<f64>) -> Result<Self> {
        if low_coeffs.is_empty() {
            return Err(PronyError::InvalidInput("monic polynomial needs degree >= 1".into()));
        }
        if low_coeffs.iter().any(|c| !c.is_finite()) {
            return Err(PronyError::InvalidInput("non-finite coefficient".into()));
        }
        Ok(Self { low_coeffs })
    }

    pub fn degree(&self) -> usize {
        self.low_coeffs.len()
    }

    pub fn low_coeffs(&self) -> &[f64] {
        &self.low_coeffs
    }

    /// All `d + 1` coefficients in ascending order, ending with 1.
    pub fn coeffs(&self) -> Vec<f64> {
        let mut c = self.low_coeffs.clone();
        c.push(1.0);
        c
    }

    /// Signed elementary symmetric functions `sigma_1..sigma_d` of the roots.
    pub fn symmetric_functions(&self) -> Vec<f64> {
        let d = self.degree();
        (1..=d)
            .map(|i| {
                let c = self.low_coeffs[d - i];
                if i % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.low_coeffs.iter().rev().fold(1.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.low_coeffs
            .iter()
            .rev()
            .fold(Complex64::new(1.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `(Q(z), Q'(z))` by Horner's scheme.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(1.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.low_coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `Q'(z)` as plain ascending coefficients (not monic).
    pub fn derivative_coeffs(&self) -> Vec<f64> {
        self.coeffs()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * c)
            .collect()
    }

    /// Largest coefficient magnitude, including the leading 1.
    pub fn coeff_scale(&self) -> f64 {
        self.low_coeffs.iter().fold(1.0_f64, |m, c| m.max(c.abs()))
    }

    /// Cauchy's bound: every root satisfies `|z| < 1 + max_i |c_i|`.
    pub fn cauchy_bound(&self) -> f64 {
        1.0 + self.low_coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// Discriminant `prod_{i<j} (z_i - z_j)^2`, computed from the coefficients
    /// through the Sylvester resultant of `Q` and `Q'`.
    ///
    /// The sign is `(-1)^s` where `s` is the number of complex-conjugate root
    /// pairs, so it changes exactly where roots collide.
    pub fn discriminant(&self) -> f64 {
        let d = self.degree();
        if d == 1 {
            return 1.0;
        }
        let p = self.coeffs();
        let dp = self.derivative_coeffs();
        // Sylvester matrix of p (degree d) and dp (degree d-1): size 2d-1.
        let n = 2 * d - 1;
        let mut s = DMatrix::<f64>::zeros(n, n);
        for row in 0..(d - 1) {
            for (k, &c) in p.iter().rev().enumerate() {
                s[(row, row + k)] = c;
            }
        }
        for row in 0..d {
            for (k, &c) in dp.iter().rev().enumerate() {
                s[(d - 1 + row, row + k)] = c;
            }
        }
        let res = s.lu().determinant();
        // disc = (-1)^{d(d-1)/2} Res(Q, Q') / lead(Q), lead = 1
        if (d * (d - 1) / 2) % 2 == 0 {
            res
        } else {
            -res
        }
    }
}

/// The Vieta map: the monic polynomial whose roots are `nodes`.
pub fn vieta(nodes: &[f64]) -> Result<MonicPolynomial> {
    if nodes.iter().any(|x| !x.is_finite()) {
        return Err(PronyError::InvalidInput("non-finite node".into()));
    }
    // coefficients ascending, start with Q = 1
    let mut c = vec![1.0];
    for &x in nodes {
        let mut next = vec![0.0; c.len() + 1];
        for (k, &ck) in c.iter().enumerate() {
            next[k + 1] += ck;
            next[k] -= x * ck;
        }
        c = next;
    }
    c.pop();
    MonicPolynomial::new(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vieta_examples() {
        assert_eq!(vieta(&[-0.5, 0.5]).unwrap().low_coeffs(), &[-0.25, 0.0]);
        assert_eq!(vieta(&[0.0, 0.0]).unwrap().low_coeffs(), &[0.0, 0.0]);
        assert_eq!(vieta(&[1.0, 2.0, 3.0]).unwrap().low_coeffs(), &[-6.0, 11.0, -6.0]);
    }

    #[test]
    fn symmetric_functions_carry_signs() {
        let q = vieta(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(q.symmetric_functions(), vec![6.0, 11.0, 6.0]);
    }

    #[test]
    fn discriminant_matches_root_products() {
        // z^2 - 2tz - 1/4 has discriminant 4t^2 + 1
        for t in [-2.0, 0.0, 0.3] {
            let q = MonicPolynomial::new(vec![-0.25, -2.0 * t]).unwrap();
            assert!((q.discriminant() - (4.0 * t * t + 1.0)).abs() < 1e-12);
        }
        // (z-1)(z-2)(z-3): prod of squared differences = 1 * 4 * 1
        let q = vieta(&[1.0, 2.0, 3.0]).unwrap();
        assert!((q.discriminant() - 4.0).abs() < 1e-9);
        // one conjugate pair gives a negative discriminant
        let q = MonicPolynomial::new(vec![1.0, 0.0, 1.0]).unwrap(); // z^3 + z + 1
        assert!(q.discriminant() < 0.0);
    }

    #[test]
    fn evaluation() {
        let q = vieta(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(q.eval(1.0), 0.0);
        assert_eq!(q.eval(0.0), -6.0);
        let (p, dp) = q.eval_with_derivative(Complex64::new(2.0, 0.0));
        assert_eq!(p.re, 0.0);
        assert_eq!(dp.re, -1.0);
    }
}
