//! Solvability of a moment vector: rank stratification of the extended
//! Hankel matrix and, over the reals, hyperbolicity of the Hankel
//! polynomial.

use serde::{Deserialize, Serialize};

use crate::error::{PronyError, Result};
use crate::prony::{
    default_rank_tol, hankel_map_with, hankel_matrix, polynomial_roots, rank_profile,
    MomentVector, MonicPolynomial,
};

/// Root pairs closer than this (squared, relative) put a polynomial on the
/// boundary of the hyperbolic set.
pub const BOUNDARY_DISCRIMINANT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolvabilityVerdict {
    pub rank: usize,
    pub minor_nonsingular: bool,
    pub solvable: bool,
    pub hyperbolic: Option<bool>,
    pub real_solvable: Option<bool>,
    /// Set when the Hankel polynomial has (numerically) multiple real roots.
    pub on_boundary: Option<bool>,
    /// Condition number of `M_d(mu)`.
    pub condition_estimate: f64,
    /// `det M_d(mu)`.
    pub determinant: f64,
}

/// Rank-stratification test: solvable iff the leading `r x r` minor of the
/// extended Hankel matrix is nonsingular, `r` being its numerical rank.
/// `tol` is relative to the largest singular value.
pub fn solvable(mu: &MomentVector, tol: f64) -> SolvabilityVerdict {
    let p = rank_profile(mu, tol, tol);
    SolvabilityVerdict {
        rank: p.rank,
        minor_nonsingular: p.minor_nonsingular,
        solvable: p.minor_nonsingular,
        hyperbolic: None,
        real_solvable: None,
        on_boundary: None,
        condition_estimate: p.condition,
        determinant: hankel_matrix(mu).determinant(),
    }
}

/// Real solvability for `det M_d(mu) != 0`: true iff the Hankel polynomial
/// is hyperbolic.
pub fn real_solvable(mu: &MomentVector) -> Result<SolvabilityVerdict> {
    let d = mu.d();
    let tol = default_rank_tol(d);
    let mut v = solvable(mu, tol);
    let hs = hankel_map_with(mu, tol).map_err(|_| PronyError::HypothesisViolated { rank: v.rank, d })?;
    let h = hyperbolicity(&hs.polynomial, 1e-8);
    v.hyperbolic = Some(h.hyperbolic);
    v.real_solvable = Some(h.hyperbolic && v.solvable);
    v.on_boundary = Some(h.on_boundary);
    Ok(v)
}

/// How a hyperbolicity answer was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HyperbolicityMethod {
    Sturm,
    Roots,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hyperbolicity {
    pub hyperbolic: bool,
    pub on_boundary: bool,
    pub method: HyperbolicityMethod,
}

pub fn is_hyperbolic(q: &MonicPolynomial) -> bool {
    hyperbolicity(q, 1e-8).hyperbolic
}

/// Sturm count of distinct real roots when the polynomial is safely away
/// from multiple roots; otherwise a root-based test with `tol_real`, flagged
/// as on the boundary.
pub fn hyperbolicity(q: &MonicPolynomial, tol_real: f64) -> Hyperbolicity {
    let d = q.degree();
    if d == 1 {
        return Hyperbolicity {
            hyperbolic: true,
            on_boundary: false,
            method: HyperbolicityMethod::Sturm,
        };
    }
    let roots = polynomial_roots(q).ok();
    let on_boundary = roots
        .as_ref()
        .map(|r| relative_min_discriminant_factor(r.roots()) < BOUNDARY_DISCRIMINANT_TOL)
        .unwrap_or(false);
    if !on_boundary {
        if let Some(count) = sturm_real_root_count(q) {
            return Hyperbolicity {
                hyperbolic: count == d,
                on_boundary: false,
                method: HyperbolicityMethod::Sturm,
            };
        }
    }
    let hyperbolic = match &roots {
        Some(r) => r.real_parts(tol_real).is_some(),
        None => false,
    };
    Hyperbolicity {
        hyperbolic,
        on_boundary: true,
        method: HyperbolicityMethod::Roots,
    }
}

/// Root-based test: every root has `|im| <= tol_real * (1 + |re|)`.
pub fn is_hyperbolic_by_roots(q: &MonicPolynomial, tol_real: f64) -> bool {
    polynomial_roots(q)
        .map(|r| r.real_parts(tol_real).is_some())
        .unwrap_or(false)
}

/// Smallest factor `(|z_i - z_j| / (1 + |z_i| + |z_j|))^2` of the
/// discriminant.
fn relative_min_discriminant_factor(roots: &[num_complex::Complex64]) -> f64 {
    let mut m = f64::INFINITY;
    for (i, a) in roots.iter().enumerate() {
        for b in &roots[i + 1..] {
            let f = (a - b).norm() / (1.0 + a.norm() + b.norm());
            m = m.min(f * f);
        }
    }
    m
}

fn trim(p: &mut Vec<f64>, tol: f64) {
    while p.len() > 1 && p.last().is_some_and(|c| c.abs() <= tol) {
        p.pop();
    }
}

fn normalize(p: &mut [f64]) {
    let s = p.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    if s > 0.0 {
        p.iter_mut().for_each(|c| *c /= s);
    }
}

/// Remainder of `a / b` (ascending coefficients).
fn poly_rem(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db];
    while r.len() > db {
        let k = r.len() - 1;
        let f = r[k] / lead;
        for (i, &bi) in b.iter().enumerate() {
            r[k - db + i] -= f * bi;
        }
        r.pop();
    }
    r
}

fn eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn sign_changes(seq: &[Vec<f64>], x: f64) -> usize {
    let mut count = 0;
    let mut last = 0.0_f64;
    for p in seq {
        let v = eval(p, x);
        if v != 0.0 {
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                count += 1;
            }
            last = v;
        }
    }
    count
}

/// Builds the Sturm chain of `q`, rescaling every remainder to unit max
/// norm. Returns `None` when the chain ends in a nonconstant polynomial
/// (a repeated root).
pub fn sturm_sequence(q: &MonicPolynomial) -> Option<Vec<Vec<f64>>> {
    let mut p0 = q.coeffs();
    normalize(&mut p0);
    let mut p1 = q.derivative_coeffs();
    normalize(&mut p1);
    let mut seq = vec![p0, p1];
    loop {
        let n = seq.len();
        let prev = &seq[n - 2];
        let cur = &seq[n - 1];
        if cur.len() == 1 {
            return Some(seq);
        }
        let mut r: Vec<f64> = poly_rem(prev, cur).into_iter().map(|c| -c).collect();
        trim(&mut r, 1e-13);
        if r.iter().all(|c| c.abs() <= 1e-13) {
            // gcd(Q, Q') is nonconstant
            return None;
        }
        normalize(&mut r);
        seq.push(r);
    }
}

/// Number of distinct real roots via Sturm's theorem on `(-B, B]`, `B` the
/// Cauchy bound; `None` if the chain is degenerate.
pub fn sturm_real_root_count(q: &MonicPolynomial) -> Option<usize> {
    let seq = sturm_sequence(q)?;
    let b = q.cauchy_bound();
    let lo = sign_changes(&seq, -b);
    let hi = sign_changes(&seq, b);
    Some(lo.saturating_sub(hi))
}

/// True iff every leading principal minor of `M_d(mu)` is positive.
pub fn hamburger_positive_definite(mu: &MomentVector) -> bool {
    let mut m = hankel_matrix(mu);
    let n = m.nrows();
    let scale = m.iter().fold(0.0_f64, |s, v| s.max(v.abs()));
    if scale == 0.0 {
        return false;
    }
    let tol = default_rank_tol(n) * scale;
    // pivots of unpivoted elimination are det_k / det_{k-1}
    for k in 0..n {
        let piv = m[(k, k)];
        if piv <= tol {
            return false;
        }
        for i in k + 1..n {
            let f = m[(i, k)] / piv;
            for j in k..n {
                let v = m[(k, j)];
                m[(i, j)] -= f * v;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prony::{vieta, SpikeSignal};

    fn mv(v: &[f64]) -> MomentVector {
        MomentVector::new(v.to_vec()).unwrap()
    }

    fn poly(c: &[f64]) -> MonicPolynomial {
        MonicPolynomial::new(c.to_vec()).unwrap()
    }

    #[test]
    fn solvable_examples() {
        let v = solvable(&mv(&[2.0, 0.0, 0.5, 0.0]), 1e-12);
        assert_eq!((v.rank, v.solvable), (2, true));
        let v = solvable(&mv(&[1.0, 1.0, 1.0, 1.0]), 1e-12);
        assert_eq!((v.rank, v.minor_nonsingular, v.solvable), (1, true, true));
        let v = solvable(&mv(&[0.0, 0.0, 0.0, 1.0]), 1e-12);
        assert_eq!((v.rank, v.solvable), (1, false));
        let v = solvable(&mv(&[0.0, 0.0, 1.0, 0.3]), 1e-12);
        assert_eq!((v.rank, v.solvable), (2, false));
    }

    #[test]
    fn hyperbolicity_examples() {
        assert!(is_hyperbolic(&poly(&[-1.0, 0.0])));
        assert!(!is_hyperbolic(&poly(&[1.0, 0.0])));
        let h = hyperbolicity(&poly(&[0.0, 0.0]), 1e-8);
        assert!(h.hyperbolic && h.on_boundary);
        // (z - 1)^2 (z + 1)
        let h = hyperbolicity(&vieta(&[1.0, 1.0, -1.0]).unwrap(), 1e-8);
        assert!(h.hyperbolic && h.on_boundary);
        // z^3 + z + 1 has one real root
        assert_eq!(sturm_real_root_count(&poly(&[1.0, 1.0, 0.0])), Some(1));
        assert!(!is_hyperbolic(&poly(&[1.0, 1.0, 0.0])));
    }

    #[test]
    fn sturm_counts_distinct_roots() {
        let q = vieta(&[-0.9, -0.2, 0.4, 0.7, 1.5]).unwrap();
        assert_eq!(sturm_real_root_count(&q), Some(5));
        let h = hyperbolicity(&q, 1e-8);
        assert_eq!(h.method, HyperbolicityMethod::Sturm);
        assert!(h.hyperbolic);
    }

    #[test]
    fn real_solvable_examples() {
        let v = real_solvable(&mv(&[2.0, 0.0, 0.5, 0.0])).unwrap();
        assert_eq!(v.real_solvable, Some(true));
        let v = real_solvable(&mv(&[2.0, 0.0, -0.5, 0.0])).unwrap();
        assert_eq!(v.real_solvable, Some(false));
        let f = SpikeSignal::new(vec![1.0, -1.0], vec![-0.3, 0.3]).unwrap();
        let v = real_solvable(&f.prony_map()).unwrap();
        assert_eq!(v.real_solvable, Some(true));
        assert!(matches!(
            real_solvable(&mv(&[1.0, 1.0, 1.0, 1.0])),
            Err(PronyError::HypothesisViolated { rank: 1, d: 2 })
        ));
    }

    #[test]
    fn positive_definite_examples() {
        assert!(hamburger_positive_definite(&mv(&[2.0, 0.0, 0.5, 0.0])));
        assert!(!hamburger_positive_definite(&mv(&[1.0, 1.0, 1.0, 1.0])));
        let f = SpikeSignal::new(vec![1.0, 2.0, 3.0], vec![-0.5, 0.0, 0.5]).unwrap();
        assert!(hamburger_positive_definite(&f.prony_map()));
        assert!(!hamburger_positive_definite(&mv(&[2.0, 0.0, -0.5, 0.0])));
    }
}
