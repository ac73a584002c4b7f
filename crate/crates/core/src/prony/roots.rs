//! Roots of monic polynomials through the eigenvalues of a balanced
//! companion matrix, polished by Newton's method.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use super::polynomial::MonicPolynomial;
use crate::error::{PronyError, Result};

const NEWTON_STEPS: usize = 4;
const RESIDUAL_TOL: f64 = 1e-9;

/// The `d` complex roots of a polynomial, sorted by `(re, im)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexRootSet {
    roots: Vec<Complex64>,
}

impl ComplexRootSet {
    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Real parts of the roots if every root satisfies
    /// `|im| <= tol_real * (1 + |re|)`, otherwise `None`.
    pub fn real_parts(&self, tol_real: f64) -> Option<Vec<f64>> {
        self.roots
            .iter()
            .map(|z| (z.im.abs() <= tol_real * (1.0 + z.re.abs())).then_some(z.re))
            .collect()
    }

    /// Real parts of all roots, ignoring imaginary parts.
    pub fn projected(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.roots.iter().map(|z| z.re).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn min_gap(&self) -> f64 {
        let mut g = f64::INFINITY;
        for (i, a) in self.roots.iter().enumerate() {
            for b in &self.roots[i + 1..] {
                g = g.min((a - b).norm());
            }
        }
        g
    }

    /// `max_j |Q(z_j)| / sum_k |c_k| |z_j|^k`, the backward-style residual.
    pub fn relative_residual(&self, q: &MonicPolynomial) -> f64 {
        self.roots
            .iter()
            .map(|&z| relative_residual_at(q, z))
            .fold(0.0, f64::max)
    }
}

fn relative_residual_at(q: &MonicPolynomial, z: Complex64) -> f64 {
    let r = z.norm();
    let scale = q
        .coeffs()
        .iter()
        .rev()
        .fold(0.0, |acc, c| acc * r + c.abs());
    q.eval_complex(z).norm() / scale.max(f64::MIN_POSITIVE)
}

fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

fn companion(q: &MonicPolynomial) -> DMatrix<f64> {
    let d = q.degree();
    let mut c = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        c[(i, i - 1)] = 1.0;
    }
    for (i, &ci) in q.low_coeffs().iter().enumerate() {
        c[(i, d - 1)] = -ci;
    }
    c
}

/// Parlett-Reinsch balancing with power-of-two scalings.
fn balance(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    let radix = 2.0_f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= radix * radix;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

fn newton_polish(q: &MonicPolynomial, z0: Complex64) -> Complex64 {
    let mut z = z0;
    let mut best = q.eval_complex(z).norm();
    for _ in 0..NEWTON_STEPS {
        if best == 0.0 {
            break;
        }
        let (p, dp) = q.eval_with_derivative(z);
        if dp.norm() == 0.0 {
            break;
        }
        let cand = z - p / dp;
        let r = q.eval_complex(cand).norm();
        if r < best {
            z = cand;
            best = r;
        } else {
            break;
        }
    }
    z
}

/// Durand-Kerner simultaneous iteration, used only when the Schur
/// decomposition fails to converge.
fn durand_kerner(q: &MonicPolynomial) -> Vec<Complex64> {
    let d = q.degree();
    let r = q.cauchy_bound();
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..d).map(|k| seed.powu(k as u32) * r / 2.0).collect();
    for _ in 0..500 {
        let mut delta = 0.0_f64;
        for i in 0..d {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                den = Complex64::new(f64::EPSILON, 0.0);
            }
            let step = q.eval_complex(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * r {
            break;
        }
    }
    z
}

/// All complex roots of `q`.
pub fn polynomial_roots(q: &MonicPolynomial) -> Result<ComplexRootSet> {
    let d = q.degree();
    let mut roots: Vec<Complex64> = if d == 1 {
        vec![Complex64::new(-q.low_coeffs()[0], 0.0)]
    } else if d == 2 {
        quadratic_roots(q.low_coeffs()[1], q.low_coeffs()[0]).to_vec()
    } else {
        let mut c = companion(q);
        balance(&mut c);
        match Schur::try_new(c, f64::EPSILON, 10_000) {
            Some(schur) => schur.complex_eigenvalues().iter().copied().collect(),
            None => durand_kerner(q),
        }
    };
    for z in roots.iter_mut() {
        *z = newton_polish(q, *z);
    }
    sort_roots(&mut roots);
    let set = ComplexRootSet { roots };
    let residual = set.relative_residual(q);
    if !residual.is_finite() || residual > RESIDUAL_TOL {
        return Err(PronyError::NonConvergence {
            best: set.roots,
            residual,
        });
    }
    Ok(set)
}

/// Roots of `z^2 + b z + c` without cancellation.
fn quadratic_roots(b: f64, c: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        let sgn = if b >= 0.0 { 1.0 } else { -1.0 };
        let q = -0.5 * (b + sgn * s);
        let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q, c / q) };
        [Complex64::new(r1, 0.0), Complex64::new(r2, 0.0)]
    } else {
        let re = -0.5 * b;
        let im = 0.5 * (-disc).sqrt();
        [Complex64::new(re, -im), Complex64::new(re, im)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prony::polynomial::vieta;

    fn poly(c: &[f64]) -> MonicPolynomial {
        MonicPolynomial::new(c.to_vec()).unwrap()
    }

    #[test]
    fn known_roots() {
        let r = polynomial_roots(&poly(&[-0.25, 0.0])).unwrap();
        assert_eq!(r.real_parts(1e-12).unwrap(), vec![-0.5, 0.5]);

        let r = polynomial_roots(&poly(&[1.0, 0.0])).unwrap();
        assert!(r.real_parts(1e-8).is_none());
        assert!((r.roots()[0] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((r.roots()[1] - Complex64::new(0.0, 1.0)).norm() < 1e-15);

        let r = polynomial_roots(&poly(&[-6.0, 11.0, -6.0])).unwrap();
        let x = r.real_parts(1e-8).unwrap();
        for (a, b) in x.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_branches() {
        for (b, c) in [(0.0, 0.0), (-3.0, 2.0), (3.0, 2.0), (1e8, 1.0), (0.0, -4.0)] {
            let q = poly(&[c, b]);
            let r = polynomial_roots(&q).unwrap();
            assert!(r.relative_residual(&q) < 1e-15, "{b} {c}");
        }
    }

    #[test]
    fn deterministic_and_sorted() {
        let q = vieta(&[0.9, -0.3, 0.1, -1.0, 0.5]).unwrap();
        let a = polynomial_roots(&q).unwrap();
        let b = polynomial_roots(&q).unwrap();
        assert_eq!(a, b);
        let x = a.real_parts(1e-8).unwrap();
        assert!(x.windows(2).all(|w| w[0] <= w[1]));
        for (r, e) in x.iter().zip([-1.0, -0.3, 0.1, 0.5, 0.9]) {
            assert!((r - e).abs() < 1e-12);
        }
    }

    #[test]
    fn balancing_keeps_spectrum() {
        let q = vieta(&[1e-3, 2.0, 300.0]).unwrap();
        let mut c = companion(&q);
        balance(&mut c);
        let mut ev: Vec<f64> = c.complex_eigenvalues().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        assert!((ev[1] - 2.0).abs() < 1e-9);
        let r = polynomial_roots(&q).unwrap().real_parts(1e-8).unwrap();
        assert!((r[0] - 1e-3).abs() < 1e-12 && (r[2] - 300.0).abs() < 1e-9);
    }
}
