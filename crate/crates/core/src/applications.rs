//! Classical problems that reduce to a Prony system: exponential fitting,
//! Gauss quadrature from moments and Waring decompositions of binary forms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PronyError, Result};
use crate::prony::{prony_solve, MomentVector, SolveOutcome, SpikeSignal};
use crate::solvability::real_solvable;

/// `y_k = sum_j a_j e^{k zeta_j} = sum_j a_j x_j^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit {
    pub amplitudes: Vec<Complex64>,
    pub nodes: Vec<Complex64>,
    /// `zeta_j = ln x_j`, only for positive real nodes.
    pub exponents: Vec<Option<f64>>,
    /// Max-norm error in reproducing the samples.
    pub residual: f64,
}

impl ExponentialFit {
    fn from_signal(s: &SpikeSignal, residual: f64) -> Self {
        Self {
            amplitudes: s.amplitudes().iter().map(|&a| Complex64::new(a, 0.0)).collect(),
            nodes: s.nodes().iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            exponents: s.nodes().iter().map(|&x| (x > 0.0).then(|| x.ln())).collect(),
            residual,
        }
    }

    /// The fit as a real signal, when every node and amplitude is real.
    pub fn real_signal(&self) -> Option<SpikeSignal> {
        let real = self.nodes.iter().chain(&self.amplitudes).all(|z| z.im == 0.0);
        if !real {
            return None;
        }
        SpikeSignal::new(
            self.amplitudes.iter().map(|z| z.re).collect(),
            self.nodes.iter().map(|z| z.re).collect(),
        )
        .ok()
    }
}

/// Fits `2d` equally spaced samples by `d` exponentials. A rank-deficient
/// sample vector is fitted by fewer terms.
pub fn exponential_fit(samples: &[f64]) -> Result<ExponentialFit> {
    let mu = MomentVector::new(samples.to_vec())?;
    let sol = prony_solve(&mu);
    match sol.outcome {
        SolveOutcome::Real(s) => Ok(ExponentialFit::from_signal(&s, sol.residual)),
        SolveOutcome::Complex { amplitudes, nodes } => Ok(ExponentialFit {
            exponents: vec![None; nodes.len()],
            amplitudes,
            nodes,
            residual: sol.residual,
        }),
        SolveOutcome::RankDeficient { reduced: Some(s), .. } => {
            Ok(ExponentialFit::from_signal(&s, sol.residual))
        }
        SolveOutcome::RankDeficient { rank: 0, .. } => Ok(ExponentialFit {
            amplitudes: Vec::new(),
            nodes: Vec::new(),
            exponents: Vec::new(),
            residual: sol.residual,
        }),
        SolveOutcome::RankDeficient { rank, .. } => Err(PronyError::Unsolvable(format!(
            "rank {rank} samples have no real reduced fit"
        ))),
        SolveOutcome::Unsolvable { reason } => Err(PronyError::Unsolvable(reason)),
    }
}

/// A `d`-point rule `int g dlambda ~ sum_j w_j g(x_j)`, exact for
/// polynomials of degree up to `2d - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
}

impl Quadrature {
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * g(*x)).sum()
    }
}

/// The Gauss rule of a measure given by its first `2d` moments.
pub fn gauss_quadrature_from_moments(moments: &MomentVector) -> Result<Quadrature> {
    let v = real_solvable(moments)?;
    if v.real_solvable != Some(true) {
        return Err(PronyError::NotRealSolvable);
    }
    let s = prony_solve(moments)
        .into_real_signal()
        .ok_or(PronyError::NotRealSolvable)?;
    Ok(Quadrature {
        exactness_degree: 2 * s.d() - 1,
        nodes: s.nodes().to_vec(),
        weights: s.amplitudes().to_vec(),
    })
}

/// The linear form `eta x + zeta y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearForm {
    pub eta: f64,
    pub zeta: f64,
}

impl LinearForm {
    /// `zeta / eta`, the node in the chart `x = 1`.
    pub fn xi(&self) -> f64 {
        self.zeta / self.eta
    }
}

/// `P(x, y) = sum_j (eta_j x + zeta_j y)^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaringDecomposition {
    pub degree: usize,
    pub forms: Vec<LinearForm>,
    /// Max-norm error of the re-expanded coefficients.
    pub residual: f64,
}

impl WaringDecomposition {
    /// Coefficients `b_i` of `x^{m-i} y^i` in `sum_j (eta_j x + zeta_j y)^m`.
    pub fn expand(&self) -> Vec<f64> {
        let m = self.degree;
        let binom = binomials(m);
        (0..=m)
            .map(|i| {
                self.forms
                    .iter()
                    .map(|f| binom[i] * f.eta.powi((m - i) as i32) * f.zeta.powi(i as i32))
                    .sum()
            })
            .collect()
    }
}

fn binomials(m: usize) -> Vec<f64> {
    let mut b = vec![1.0; m + 1];
    for i in 1..=m {
        b[i] = b[i - 1] * (m + 1 - i) as f64 / i as f64;
    }
    b
}

/// Decomposes `P(x, y) = sum_i b_i x^{m-i} y^i`, `m` odd, into
/// `d = (m + 1) / 2` powers of linear forms.
///
/// In the chart `x = 1`, `(eta + zeta y)^m = w (1 + xi y)^m` with
/// `w = eta^m` and `xi = zeta / eta`, so `mu_i = b_i / binom(m, i)` are the
/// moments of the spike train with weights `w_j` at nodes `xi_j`. Since `m`
/// is odd, `eta_j` is the real `m`-th root of `w_j`. Forms with `eta = 0`
/// (a pure `y^m` term) have no finite node and surface as a singular Hankel
/// matrix.
pub fn waring_decompose(coeffs: &[f64], d: usize) -> Result<WaringDecomposition> {
    if coeffs.len() < 2 || coeffs.len() % 2 != 0 {
        return Err(PronyError::InvalidInput(format!(
            "need an odd degree m, i.e. an even number of coefficients; got {}",
            coeffs.len()
        )));
    }
    let m = coeffs.len() - 1;
    if d != coeffs.len() / 2 {
        return Err(PronyError::InvalidInput(format!(
            "degree {m} forms decompose with d = {}, not {d}",
            coeffs.len() / 2
        )));
    }
    let binom = binomials(m);
    let mu = MomentVector::new(coeffs.iter().zip(&binom).map(|(b, c)| b / c).collect())?;
    let s = match prony_solve(&mu).outcome {
        SolveOutcome::Real(s) => Some(s),
        SolveOutcome::RankDeficient { reduced: Some(s), .. } => Some(s),
        SolveOutcome::RankDeficient { rank: 0, .. } => None,
        SolveOutcome::RankDeficient { rank, .. } => {
            return Err(PronyError::GenericityFailure(format!(
                "rank {rank} moments have no real reduced decomposition"
            )))
        }
        SolveOutcome::Complex { .. } => return Err(PronyError::ComplexSolution),
        SolveOutcome::Unsolvable { reason } => {
            return Err(PronyError::GenericityFailure(format!(
                "{reason}; the form may contain a y^{m} term, which has no finite node in the chart x = 1"
            )))
        }
    };
    let forms = s
        .map(|s| {
            s.amplitudes()
                .iter()
                .zip(s.nodes())
                .map(|(&w, &xi)| {
                    let eta = w.signum() * w.abs().powf(1.0 / m as f64);
                    LinearForm { eta, zeta: xi * eta }
                })
                .collect()
        })
        .unwrap_or_default();
    let mut dec = WaringDecomposition {
        degree: m,
        forms,
        residual: 0.0,
    };
    dec.residual = dec
        .expand()
        .iter()
        .zip(coeffs)
        .fold(0.0, |r, (a, b)| r.max((a - b).abs()));
    Ok(dec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mv(v: &[f64]) -> MomentVector {
        MomentVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn exponential_examples() {
        let f = exponential_fit(&[2.0, 2.0]).unwrap();
        assert_eq!(f.amplitudes[0].re, 2.0);
        assert_eq!(f.nodes[0].re, 1.0);
        assert_eq!(f.exponents, vec![Some(0.0)]);

        let y: Vec<f64> = (0..4).map(|k| (0.5 * k as f64).exp() + (-0.5 * k as f64).exp()).collect();
        let f = exponential_fit(&y).unwrap();
        let z: Vec<f64> = f.exponents.iter().map(|e| e.unwrap()).collect();
        assert!((z[0] + 0.5).abs() < 1e-12 && (z[1] - 0.5).abs() < 1e-12);
        for a in &f.amplitudes {
            assert!((a.re - 1.0).abs() < 1e-12);
        }

        let f = exponential_fit(&[1.0, -1.0]).unwrap();
        assert_eq!(f.nodes[0].re, -1.0);
        assert_eq!(f.exponents, vec![None]);

        // 2 cos(k pi / 2): complex nodes +-i
        let f = exponential_fit(&[2.0, 0.0, -2.0, 0.0]).unwrap();
        assert!(f.real_signal().is_none() && f.exponents.iter().all(Option::is_none));
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn quadrature_examples() {
        let q = gauss_quadrature_from_moments(&mv(&[2.0, 0.0, 2.0 / 3.0, 0.0])).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert!((q.nodes[0] + r).abs() < 1e-14 && (q.nodes[1] - r).abs() < 1e-14);
        assert!((q.weights[0] - 1.0).abs() < 1e-14 && (q.weights[1] - 1.0).abs() < 1e-14);
        assert_eq!(q.exactness_degree, 3);
        assert!((q.integrate(|x| x.powi(2)) - 2.0 / 3.0).abs() < 1e-14);
        // degree 4 is not integrated exactly: 2/9 vs 2/5
        assert!((q.integrate(|x| x.powi(4)) - 0.4).abs() > 0.1);

        let q = gauss_quadrature_from_moments(&mv(&[3.0, 1.5])).unwrap();
        assert_eq!((q.nodes[0], q.weights[0]), (0.5, 3.0));

        assert!(matches!(
            gauss_quadrature_from_moments(&mv(&[2.0, 0.0, -0.5, 0.0])),
            Err(PronyError::NotRealSolvable)
        ));
    }

    #[test]
    fn waring_examples() {
        let w = waring_decompose(&[1.0, 3.0, 3.0, 1.0], 2).unwrap();
        assert_eq!(w.forms.len(), 1);
        assert!((w.forms[0].eta - 1.0).abs() < 1e-12 && (w.forms[0].xi() - 1.0).abs() < 1e-12);

        assert!(matches!(
            waring_decompose(&[1.0, 0.0, 0.0, 1.0], 2),
            Err(PronyError::GenericityFailure(_))
        ));

        // (x + 2y)^3 + (x - y)^3
        let b = [2.0, 3.0, 15.0, 7.0];
        let w = waring_decompose(&b, 2).unwrap();
        let mut xi: Vec<f64> = w.forms.iter().map(LinearForm::xi).collect();
        xi.sort_by(f64::total_cmp);
        assert!((xi[0] + 1.0).abs() < 1e-12 && (xi[1] - 2.0).abs() < 1e-12);
        for f in &w.forms {
            assert!((f.eta - 1.0).abs() < 1e-12);
        }
        assert!(w.residual < 1e-12);

        assert!(waring_decompose(&[1.0, 2.0, 1.0], 2).is_err());
        assert!(waring_decompose(&[1.0, 2.0, 1.0, 0.0], 1).is_err());
    }
}
