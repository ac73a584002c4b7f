//! The Prony pipeline: rank test, Hankel map, roots, amplitudes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hankel::{default_rank_tol, hankel_map_with, rank_profile};
use super::roots::polynomial_roots;
use super::signal::{MomentVector, SpikeSignal};
use crate::error::{PronyError, Result};

/// Numerical tolerances of the solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Relative singular-value threshold for ranks; `None` means `2d * eps`.
    pub tol_rank: Option<f64>,
    /// A root is real when `|im| <= tol_real * (1 + |re|)`.
    pub tol_real: f64,
    /// Nodes closer than `min_node_gap * (1 + max |x|)` make the Vandermonde
    /// system degenerate.
    pub min_node_gap: f64,
    /// Newton refinement of real solutions on the full square system.
    pub polish: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_rank: None,
            tol_real: 1e-8,
            min_node_gap: 1e-10,
            polish: true,
        }
    }
}

impl SolverConfig {
    pub fn rank_tol(&self, d: usize) -> f64 {
        self.tol_rank.unwrap_or_else(|| default_rank_tol(d))
    }
}

/// Result of a least-squares amplitude fit.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeFit<T> {
    pub amplitudes: Vec<T>,
    /// Max-norm residual of the `2d` moment equations.
    pub residual: f64,
}

fn check_separation(gap: f64, scale: f64, tol: f64) -> Result<()> {
    if gap <= tol * (1.0 + scale) {
        Err(PronyError::NearDegenerateVandermonde { min_gap: gap })
    } else {
        Ok(())
    }
}

/// Least-squares amplitudes for known real nodes against all moments in `mu`.
pub fn amplitudes_from_nodes(mu: &MomentVector, nodes: &[f64]) -> Result<AmplitudeFit<f64>> {
    amplitudes_from_nodes_with(mu, nodes, SolverConfig::default().min_node_gap)
}

pub fn amplitudes_from_nodes_with(
    mu: &MomentVector,
    nodes: &[f64],
    min_node_gap: f64,
) -> Result<AmplitudeFit<f64>> {
    let z: Vec<Complex64> = nodes.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let fit = complex_amplitudes_from_nodes_with(mu, &z, min_node_gap)?;
    Ok(AmplitudeFit {
        amplitudes: fit.amplitudes.iter().map(|a| a.re).collect(),
        residual: fit.residual,
    })
}

/// Least-squares amplitudes for complex nodes.
pub fn complex_amplitudes_from_nodes(
    mu: &MomentVector,
    nodes: &[Complex64],
) -> Result<AmplitudeFit<Complex64>> {
    complex_amplitudes_from_nodes_with(mu, nodes, SolverConfig::default().min_node_gap)
}

pub fn complex_amplitudes_from_nodes_with(
    mu: &MomentVector,
    nodes: &[Complex64],
    min_node_gap: f64,
) -> Result<AmplitudeFit<Complex64>> {
    if nodes.is_empty() {
        return Err(PronyError::InvalidInput("no nodes".into()));
    }
    let rows = mu.values().len();
    let mut gap = f64::INFINITY;
    let mut scale = 0.0_f64;
    for (i, a) in nodes.iter().enumerate() {
        scale = scale.max(a.norm());
        for b in &nodes[i + 1..] {
            gap = gap.min((a - b).norm());
        }
    }
    check_separation(gap, scale, min_node_gap)?;

    let mut v = DMatrix::<Complex64>::from_fn(rows, nodes.len(), |k, j| nodes[j].powu(k as u32));
    // column equilibration
    let norms: Vec<f64> = (0..nodes.len()).map(|j| v.column(j).norm()).collect();
    for (j, n) in norms.iter().enumerate() {
        v.column_mut(j).unscale_mut(*n);
    }
    let b = DVector::from_iterator(rows, mu.values().iter().map(|&m| Complex64::new(m, 0.0)));
    let svd = v.clone().svd(true, true);
    let y = svd
        .solve(&b, f64::EPSILON)
        .map_err(|e| PronyError::InvalidInput(e.to_string()))?;
    let amplitudes: Vec<Complex64> = y.iter().zip(&norms).map(|(y, n)| y / *n).collect();
    let residual = complex_residual(mu, &amplitudes, nodes);
    Ok(AmplitudeFit {
        amplitudes,
        residual,
    })
}

fn complex_residual(mu: &MomentVector, a: &[Complex64], x: &[Complex64]) -> f64 {
    let mut p: Vec<Complex64> = a.to_vec();
    let mut r = 0.0_f64;
    for &m in mu.values() {
        let s: Complex64 = p.iter().sum();
        r = r.max((s - m).norm());
        for (pj, xj) in p.iter_mut().zip(x) {
            *pj *= xj;
        }
    }
    r
}

/// How the Prony system was resolved.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    /// Unique real solution with `d` distinct real nodes.
    Real(SpikeSignal),
    /// The Hankel polynomial has complex roots.
    Complex {
        amplitudes: Vec<Complex64>,
        nodes: Vec<Complex64>,
    },
    /// The extended Hankel matrix has rank `r < d` with a nonsingular leading
    /// minor; `reduced` is the real `r`-spike solution when it exists (`None`
    /// for `r = 0`, the zero signal, or a complex reduced solution).
    RankDeficient {
        rank: usize,
        reduced: Option<SpikeSignal>,
    },
    Unsolvable {
        reason: String,
    },
}

impl SolveOutcome {
    pub fn status(&self) -> &'static str {
        match self {
            SolveOutcome::Real(_) => "real",
            SolveOutcome::Complex { .. } => "complex",
            SolveOutcome::RankDeficient { .. } => "rank_deficient",
            SolveOutcome::Unsolvable { .. } => "unsolvable",
        }
    }
}

/// Outcome plus diagnostics of [`prony_solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct PronySolution {
    pub outcome: SolveOutcome,
    pub rank: usize,
    /// Condition number of `M_d(mu)`.
    pub condition: f64,
    /// Max-norm moment residual of the returned solution (`inf` if none).
    pub residual: f64,
}

impl PronySolution {
    pub fn real_signal(&self) -> Option<&SpikeSignal> {
        match &self.outcome {
            SolveOutcome::Real(s) => Some(s),
            _ => None,
        }
    }

    pub fn into_real_signal(self) -> Option<SpikeSignal> {
        match self.outcome {
            SolveOutcome::Real(s) => Some(s),
            _ => None,
        }
    }
}

pub fn prony_solve(mu: &MomentVector) -> PronySolution {
    prony_solve_with(mu, &SolverConfig::default())
}

pub fn prony_solve_with(mu: &MomentVector, cfg: &SolverConfig) -> PronySolution {
    let d = mu.d();
    let tol = cfg.rank_tol(d);
    let profile = rank_profile(mu, tol, tol);
    let unsolvable = |reason: String, rank| PronySolution {
        outcome: SolveOutcome::Unsolvable { reason },
        rank,
        condition: profile.condition,
        residual: f64::INFINITY,
    };

    if !profile.minor_nonsingular {
        return unsolvable(
            format!("rank {} with singular leading minor", profile.rank),
            profile.rank,
        );
    }
    if profile.rank < d {
        let r = profile.rank;
        let (reduced, residual) = if r == 0 {
            (None, mu.values().iter().fold(0.0, |m: f64, v| m.max(v.abs())))
        } else {
            let sub = MomentVector::new(mu.values()[..2 * r].to_vec()).expect("2r moments");
            match full_rank_solve(&sub, cfg) {
                Ok(FullRank::Real(s)) => {
                    let res = crate::prony::signal::max_abs_diff(&s.moments(2 * d), mu.values());
                    (Some(s), res)
                }
                _ => (None, f64::INFINITY),
            }
        };
        return PronySolution {
            outcome: SolveOutcome::RankDeficient { rank: r, reduced },
            rank: r,
            condition: profile.condition,
            residual,
        };
    }
    match full_rank_solve(mu, cfg) {
        Ok(FullRank::Real(s)) => {
            let residual = crate::prony::signal::max_abs_diff(&s.moments(2 * d), mu.values());
            PronySolution {
                outcome: SolveOutcome::Real(s),
                rank: d,
                condition: profile.condition,
                residual,
            }
        }
        Ok(FullRank::Complex(fit, nodes)) => PronySolution {
            residual: fit.residual,
            outcome: SolveOutcome::Complex {
                amplitudes: fit.amplitudes,
                nodes,
            },
            rank: d,
            condition: profile.condition,
        },
        Err(e) => unsolvable(e.to_string(), d),
    }
}

enum FullRank {
    Real(SpikeSignal),
    Complex(AmplitudeFit<Complex64>, Vec<Complex64>),
}

fn full_rank_solve(mu: &MomentVector, cfg: &SolverConfig) -> Result<FullRank> {
    let hs = hankel_map_with(mu, cfg.rank_tol(mu.d()))?;
    let roots = polynomial_roots(&hs.polynomial)?;
    match roots.real_parts(cfg.tol_real) {
        Some(nodes) => {
            let fit = amplitudes_from_nodes_with(mu, &nodes, cfg.min_node_gap)?;
            let (a, x) = if cfg.polish {
                polish_real(mu, fit.amplitudes, nodes)
            } else {
                (fit.amplitudes, nodes)
            };
            Ok(FullRank::Real(SpikeSignal::new(a, x)?))
        }
        None => {
            let nodes = roots.roots().to_vec();
            let fit = complex_amplitudes_from_nodes_with(mu, &nodes, cfg.min_node_gap)?;
            Ok(FullRank::Complex(fit, nodes))
        }
    }
}

fn prony_residual(mu: &[f64], a: &[f64], x: &[f64]) -> Vec<f64> {
    let mut p = a.to_vec();
    mu.iter()
        .map(|&m| {
            let s: f64 = p.iter().sum();
            for (pj, xj) in p.iter_mut().zip(x) {
                *pj *= xj;
            }
            s - m
        })
        .collect()
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Newton iterations on the square system `sum_j a_j x_j^k = m_k`, keeping
/// only steps that reduce the max-norm residual.
pub(crate) fn polish_real(mu: &MomentVector, a: Vec<f64>, x: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let d = x.len();
    let n = mu.values().len();
    if n != 2 * d {
        return (a, x);
    }
    let mut a = a;
    let mut x = x;
    let mut r = prony_residual(mu.values(), &a, &x);
    let mut rn = max_norm(&r);
    for _ in 0..6 {
        if rn == 0.0 {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for j in 0..d {
            let mut pw = 1.0; // x^k
            let mut dpw = 0.0; // k x^{k-1}
            for k in 0..n {
                jac[(k, j)] = pw;
                jac[(k, d + j)] = a[j] * dpw;
                dpw = dpw * x[j] + pw;
                pw *= x[j];
            }
        }
        let rhs = DVector::from_iterator(n, r.iter().map(|v| -v));
        let Some(step) = jac.lu().solve(&rhs) else { break };
        let a2: Vec<f64> = (0..d).map(|j| a[j] + step[j]).collect();
        let x2: Vec<f64> = (0..d).map(|j| x[j] + step[d + j]).collect();
        if a2.iter().chain(&x2).any(|v| !v.is_finite()) {
            break;
        }
        let r2 = prony_residual(mu.values(), &a2, &x2);
        let rn2 = max_norm(&r2);
        if rn2 < rn {
            a = a2;
            x = x2;
            r = r2;
            rn = rn2;
        } else {
            break;
        }
    }
    (a, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mv(v: &[f64]) -> MomentVector {
        MomentVector::new(v.to_vec()).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn amplitude_examples() {
        let f = amplitudes_from_nodes(&mv(&[2.0, 0.0, 0.5, 0.0]), &[-0.5, 0.5]).unwrap();
        assert!(close(&f.amplitudes, &[1.0, 1.0], 1e-14));
        let f = amplitudes_from_nodes(&mv(&[2.0, 2.0]), &[1.0]).unwrap();
        assert!(close(&f.amplitudes, &[2.0], 1e-15));
        // A = (1, 2) at X = (-1, 1): moments 3, 1, 3, 1
        let f = amplitudes_from_nodes(&mv(&[3.0, 1.0, 3.0, 1.0]), &[-1.0, 1.0]).unwrap();
        assert!(close(&f.amplitudes, &[1.0, 2.0], 1e-14));
        assert!(f.residual < 1e-14);
    }

    #[test]
    fn coincident_nodes_are_rejected() {
        let e = amplitudes_from_nodes(&mv(&[2.0, 0.0, 0.5, 0.0]), &[0.3, 0.3]);
        assert!(matches!(e, Err(PronyError::NearDegenerateVandermonde { .. })));
    }

    #[test]
    fn solve_symmetric_pair() {
        let sol = prony_solve(&mv(&[2.0, 0.0, 0.5, 0.0]));
        let s = sol.real_signal().expect("real");
        assert!(close(s.amplitudes(), &[1.0, 1.0], 1e-14));
        assert!(close(s.nodes(), &[-0.5, 0.5], 1e-14));
        assert_eq!(sol.rank, 2);
        assert!((sol.condition - 4.0).abs() < 1e-12);
    }

    #[test]
    fn solve_rank_deficient() {
        let sol = prony_solve(&mv(&[1.0, 1.0, 1.0, 1.0]));
        match sol.outcome {
            SolveOutcome::RankDeficient { rank: 1, reduced: Some(s) } => {
                assert!(close(s.amplitudes(), &[1.0], 1e-14));
                assert!(close(s.nodes(), &[1.0], 1e-14));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn solve_complex_pair() {
        let sol = prony_solve(&mv(&[2.0, 0.0, -0.5, 0.0]));
        match sol.outcome {
            SolveOutcome::Complex { amplitudes, nodes } => {
                assert!((nodes[0] - Complex64::new(0.0, -0.5)).norm() < 1e-14);
                assert!((nodes[1] - Complex64::new(0.0, 0.5)).norm() < 1e-14);
                for a in amplitudes {
                    assert!((a - Complex64::new(1.0, 0.0)).norm() < 1e-14);
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn solve_infeasible_and_zero() {
        let sol = prony_solve(&mv(&[0.0, 0.0, 0.0, 1.0]));
        assert_eq!(sol.outcome.status(), "unsolvable");
        assert_eq!(sol.rank, 1);
        let sol = prony_solve(&mv(&[0.0; 4]));
        assert_eq!(
            sol.outcome,
            SolveOutcome::RankDeficient { rank: 0, reduced: None }
        );
    }

    #[test]
    fn polish_does_not_hurt_exact_solutions() {
        let mu = mv(&[2.0, 0.0, 0.5, 0.0]);
        let (a, x) = polish_real(&mu, vec![1.0, 1.0], vec![-0.5, 0.5]);
        assert_eq!(a, vec![1.0, 1.0]);
        assert_eq!(x, vec![-0.5, 0.5]);
        let (a, x) = polish_real(&mu, vec![1.01, 0.98], vec![-0.49, 0.51]);
        assert!(close(&a, &[1.0, 1.0], 1e-12) && close(&x, &[-0.5, 0.5], 1e-12));
    }
}
