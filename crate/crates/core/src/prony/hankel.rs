//! Hankel matrices of a moment vector and the Hankel map `mu -> Q`.

use nalgebra::{DMatrix, DVector};

use super::polynomial::MonicPolynomial;
use super::signal::MomentVector;
use crate::error::{PronyError, Result};

/// `d x d` matrix with entries `m_{i+j}`.
pub fn hankel_matrix(mu: &MomentVector) -> DMatrix<f64> {
    hankel_from_slice(mu.values(), mu.d(), mu.d())
}

/// `d x (d+1)` matrix with entries `m_{i+j}`.
pub fn extended_hankel_matrix(mu: &MomentVector) -> DMatrix<f64> {
    hankel_from_slice(mu.values(), mu.d(), mu.d() + 1)
}

/// `rows x cols` Hankel matrix built from `m`, needs `m.len() >= rows + cols - 1`.
pub fn hankel_from_slice(m: &[f64], rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |i, j| m[i + j])
}

/// Default relative rank threshold `2d * eps`.
pub fn default_rank_tol(d: usize) -> f64 {
    2.0 * d as f64 * f64::EPSILON
}

/// Singular values in decreasing order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `rel_tol * sigma_max`.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let Some(&smax) = s.first() else { return 0 };
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rel_tol * smax).count()
}

/// 2-norm condition number `sigma_max / sigma_min` (`inf` when singular).
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Rank data of the extended Hankel matrix used by the solvability test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankProfile {
    /// Numerical rank `r` of the extended `d x (d+1)` Hankel matrix.
    pub rank: usize,
    /// Whether the leading `r x r` minor is nonsingular at the tolerance.
    pub minor_nonsingular: bool,
    /// Condition number of `M_d(mu)`.
    pub condition: f64,
}

/// Rank `r` of the extended Hankel matrix and the nonsingularity of its
/// leading `r x r` minor, both judged relative to the largest singular value
/// of the extended matrix. The empty minor (`r = 0`) counts as nonsingular.
pub fn rank_profile(mu: &MomentVector, rank_tol: f64, minor_tol: f64) -> RankProfile {
    let ext = extended_hankel_matrix(mu);
    let s = singular_values(&ext);
    let smax = s.first().copied().unwrap_or(0.0);
    let rank = if smax == 0.0 {
        0
    } else {
        s.iter().filter(|&&v| v > rank_tol * smax).count()
    };
    let minor_nonsingular = if rank == 0 {
        true
    } else {
        let minor = hankel_from_slice(mu.values(), rank, rank);
        let sm = singular_values(&minor);
        sm.last().copied().unwrap_or(0.0) > minor_tol * smax
    };
    RankProfile {
        rank,
        minor_nonsingular,
        condition: condition_number(&hankel_matrix(mu)),
    }
}

/// Solution of the Hankel system together with its conditioning.
#[derive(Debug, Clone)]
pub struct HankelSolution {
    pub polynomial: MonicPolynomial,
    pub condition: f64,
}

/// Solves `M c = rhs` for a square Hankel matrix by column-pivoted QR after
/// checking that the matrix is not numerically singular.
pub(crate) fn solve_hankel(
    m: &DMatrix<f64>,
    rhs: &DVector<f64>,
    rel_tol: f64,
) -> Result<(DVector<f64>, f64)> {
    let s = singular_values(m);
    let smax = s.first().copied().unwrap_or(0.0);
    let smin = s.last().copied().unwrap_or(0.0);
    if smax == 0.0 || smin <= rel_tol * smax {
        return Err(PronyError::SingularHankel {
            sigma_min: smin,
            sigma_max: smax,
        });
    }
    let qr = m.clone().col_piv_qr();
    let c = qr.solve(rhs).ok_or(PronyError::SingularHankel {
        sigma_min: smin,
        sigma_max: smax,
    })?;
    Ok((c, smax / smin))
}

/// The Hankel map: solves `M_d(mu) c = -(m_d, ..., m_{2d-1})` and returns
/// `Q = z^d + c_{d-1} z^{d-1} + ... + c_0`.
pub fn hankel_map(mu: &MomentVector) -> Result<MonicPolynomial> {
    hankel_map_with(mu, default_rank_tol(mu.d())).map(|s| s.polynomial)
}

pub fn hankel_map_with(mu: &MomentVector, rel_tol: f64) -> Result<HankelSolution> {
    let d = mu.d();
    let m = hankel_matrix(mu);
    let rhs = DVector::from_iterator(d, mu.values()[d..].iter().map(|v| -v));
    let (c, condition) = solve_hankel(&m, &rhs, rel_tol)?;
    Ok(HankelSolution {
        polynomial: MonicPolynomial::new(c.iter().copied().collect())?,
        condition,
    })
}

/// Numerator `P = b_0 + ... + b_{d-1} z^{d-1}` of the diagonal Padé
/// approximant `P/Q` of `sum_k m_k z^{-k-1}`.
///
/// `b_l = sum_{k=0}^{d-1-l} m_k c_{l+k+1}` with `c_d = 1`; this is the
/// polynomial part of `Q(z) * sum_k m_k z^{-k-1}`.
pub fn pade_numerator(mu: &MomentVector, q: &MonicPolynomial) -> Result<Vec<f64>> {
    let d = mu.d();
    if q.degree() != d {
        return Err(PronyError::InvalidInput(format!(
            "polynomial degree {} does not match d = {d}",
            q.degree()
        )));
    }
    let c = q.coeffs();
    let m = mu.values();
    Ok((0..d)
        .map(|l| (0..d - l).map(|k| m[k] * c[l + k + 1]).sum())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mv(v: &[f64]) -> MomentVector {
        MomentVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn layouts() {
        assert_eq!(hankel_matrix(&mv(&[2.0, 2.0])), DMatrix::from_row_slice(1, 1, &[2.0]));
        assert_eq!(
            hankel_matrix(&mv(&[2.0, 0.0, 0.5, 0.0])),
            DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5])
        );
        assert_eq!(
            hankel_matrix(&mv(&[1.0, 2.0, 3.0, 4.0])),
            DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 3.0])
        );
        assert_eq!(
            extended_hankel_matrix(&mv(&[2.0, 2.0])),
            DMatrix::from_row_slice(1, 2, &[2.0, 2.0])
        );
        assert_eq!(
            extended_hankel_matrix(&mv(&[2.0, 0.0, 0.5, 0.0])),
            DMatrix::from_row_slice(2, 3, &[2.0, 0.0, 0.5, 0.0, 0.5, 0.0])
        );
        let e = extended_hankel_matrix(&mv(&[1.0, 1.0, 1.0, 1.0]));
        assert_eq!(e, DMatrix::from_element(2, 3, 1.0));
        assert_eq!(numerical_rank(&e, default_rank_tol(2)), 1);
    }

    #[test]
    fn hankel_map_examples() {
        let q = hankel_map(&mv(&[2.0, 0.0, 0.5, 0.0])).unwrap();
        assert!((q.low_coeffs()[0] + 0.25).abs() < 1e-15 && q.low_coeffs()[1].abs() < 1e-15);
        let q = hankel_map(&mv(&[2.0, 2.0])).unwrap();
        assert_eq!(q.low_coeffs(), &[-1.0]);
        assert!(matches!(
            hankel_map(&mv(&[1.0, 1.0, 1.0, 1.0])),
            Err(PronyError::SingularHankel { .. })
        ));
    }

    #[test]
    fn pade_numerator_examples() {
        let q = MonicPolynomial::new(vec![-1.0]).unwrap();
        assert_eq!(pade_numerator(&mv(&[2.0, 2.0]), &q).unwrap(), vec![2.0]);
        let q = MonicPolynomial::new(vec![0.0]).unwrap();
        assert_eq!(pade_numerator(&mv(&[1.0, 0.0]), &q).unwrap(), vec![1.0]);
        let q = MonicPolynomial::new(vec![-0.25, 0.0]).unwrap();
        assert_eq!(pade_numerator(&mv(&[2.0, 0.0, 0.5, 0.0]), &q).unwrap(), vec![0.0, 2.0]);
        assert!(pade_numerator(&mv(&[2.0, 2.0]), &MonicPolynomial::new(vec![0.0, 0.0]).unwrap()).is_err());
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let e = extended_hankel_matrix(&mv(&[0.0; 4]));
        assert_eq!(numerical_rank(&e, 1e-12), 0);
    }
}
