use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curve::PronyCurve;
use crate::error::{PronyError, Result};
use crate::prony::{amplitudes_from_nodes, condition_number, default_rank_tol, hankel_from_slice, polynomial_roots};
use crate::solvability::hyperbolicity;

const TOL_REAL: f64 = 1e-8;

/// One point of a Prony scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub t: f64,
    pub coefficients: Vec<f64>,
    pub discriminant: f64,
    pub roots: Vec<Complex64>,
    pub hyperbolic: bool,
    pub on_boundary: bool,
    /// Sorted real nodes, present when the sample is hyperbolic.
    pub nodes: Option<Vec<f64>>,
    pub amplitudes: Option<Vec<f64>>,
    /// Smallest pairwise distance between roots.
    pub min_gap: f64,
    pub max_abs_amplitude: Option<f64>,
    pub failure: Option<String>,
}

/// A point where the discriminant of `c(t)` changes sign between two grid
/// samples, refined by bisection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCrossing {
    pub t: f64,
    pub bracket: (f64, f64),
    /// `-1` if the hyperbolic side is `t < t*`, `+1` if `t > t*`, `0` if
    /// neither grid neighbour is hyperbolic.
    pub hyperbolic_side: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveTrace {
    pub curve: PronyCurve,
    pub samples: Vec<CurveSample>,
    pub crossings: Vec<BoundaryCrossing>,
}

/// Evaluates the scenario at a single parameter value.
pub fn sample_curve(curve: &PronyCurve, t: f64) -> CurveSample {
    let q = curve.eval(t);
    let mut s = CurveSample {
        t,
        coefficients: q.low_coeffs().to_vec(),
        discriminant: q.discriminant(),
        roots: Vec::new(),
        hyperbolic: false,
        on_boundary: false,
        nodes: None,
        amplitudes: None,
        min_gap: f64::NAN,
        max_abs_amplitude: None,
        failure: None,
    };
    let roots = match polynomial_roots(&q) {
        Ok(r) => r,
        Err(e) => {
            s.failure = Some(e.to_string());
            return s;
        }
    };
    s.min_gap = roots.min_gap();
    s.roots = roots.roots().to_vec();
    let h = hyperbolicity(&q, TOL_REAL);
    s.hyperbolic = h.hyperbolic;
    s.on_boundary = h.on_boundary;
    if !h.hyperbolic {
        return s;
    }
    let mut nodes = roots.projected();
    nodes.sort_by(f64::total_cmp);
    match amplitudes_from_nodes(&curve.moments_at(t), &nodes) {
        Ok(fit) => {
            s.max_abs_amplitude = Some(fit.amplitudes.iter().fold(0.0, |m, a| m.max(a.abs())));
            s.amplitudes = Some(fit.amplitudes);
        }
        Err(e) => s.failure = Some(e.to_string()),
    }
    s.nodes = Some(nodes);
    s
}

/// Samples the curve on a uniform grid of `steps` points in
/// `[t_min, t_max]` and locates hyperbolicity-boundary crossings.
pub fn trace_curve(curve: &PronyCurve, t_min: f64, t_max: f64, steps: usize) -> Result<CurveTrace> {
    if steps < 2 || !(t_min < t_max) || !t_min.is_finite() || !t_max.is_finite() {
        return Err(PronyError::InvalidInput(format!(
            "bad trace grid [{t_min}, {t_max}] with {steps} steps"
        )));
    }
    let n = (steps - 1) as f64;
    let samples: Vec<CurveSample> = (0..steps)
        .into_par_iter()
        .map(|i| {
            // Weighted form keeps grids with t_min = -t_max exactly symmetric.
            let t = (t_min * (n - i as f64) + t_max * i as f64) / n;
            sample_curve(curve, t)
        })
        .collect();
    let crossings = find_crossings(curve, &samples);
    Ok(CurveTrace {
        curve: curve.clone(),
        samples,
        crossings,
    })
}

/// Sign changes of the discriminant; a sample where it vanishes exactly is
/// itself the crossing point.
fn find_crossings(curve: &PronyCurve, samples: &[CurveSample]) -> Vec<BoundaryCrossing> {
    let mut out = Vec::new();
    let mut last: Option<usize> = None;
    for (i, s) in samples.iter().enumerate() {
        let sign = disc_sign(s.discriminant);
        if sign == 0 {
            continue;
        }
        if let Some(j) = last {
            let prev = &samples[j];
            if disc_sign(prev.discriminant) != sign {
                let t = if j + 1 < i {
                    samples[(j + i) / 2].t
                } else {
                    refine_crossing(curve, prev.t, s.t)
                };
                out.push(BoundaryCrossing {
                    t,
                    bracket: (prev.t, s.t),
                    hyperbolic_side: match (prev.hyperbolic, s.hyperbolic) {
                        (true, false) => -1,
                        (false, true) => 1,
                        _ => 0,
                    },
                });
            }
        }
        last = Some(i);
    }
    out
}

fn disc_sign(v: f64) -> i32 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Bisection on the discriminant sign, at most 80 halvings.
fn refine_crossing(curve: &PronyCurve, mut a: f64, mut b: f64) -> f64 {
    let sa = disc_sign(curve.eval(a).discriminant());
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let sm = disc_sign(curve.eval(m).discriminant());
        if sm == 0 {
            return m;
        }
        if sm == sa {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionProbe {
    /// Distance from the boundary point, relative to `max(1, |t*|)`.
    pub distance: f64,
    pub t: f64,
    pub min_gap: f64,
    pub max_abs_amplitude: Option<f64>,
    /// The closest pair of nodes and their amplitudes.
    pub pair: Option<(usize, usize)>,
    pub pair_amplitudes: Option<(f64, f64)>,
}

/// Behaviour of the scenario while approaching a hyperbolicity boundary
/// from the hyperbolic side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionFinding {
    pub t_boundary: f64,
    pub hyperbolic_side: i8,
    pub probes: Vec<CollisionProbe>,
    pub gap_shrinks: bool,
    pub amplitude_growth_monotone: bool,
    /// Least-squares slope of `log max|a|` against `log(1/gap)`.
    pub blowup_exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeProbe {
    pub t: f64,
    /// Roots ordered by real part.
    pub roots: Vec<Complex64>,
}

/// Behaviour of the roots as `t -> +-inf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeFinding {
    pub direction: i8,
    pub probes: Vec<EscapeProbe>,
    /// Index (in real-part order) of the root of largest modulus at the
    /// farthest probe.
    pub escaping_index: usize,
    /// The escaping root is an extreme one (first or last).
    pub escaping_is_extreme: bool,
    pub escape_monotone: bool,
    /// The remaining roots converge: their change between the last two
    /// probes is below `1e-2 (1 + |x|)`.
    pub others_bounded: bool,
    pub others_max_abs: f64,
}

/// Numerical check of the nondegeneracy hypotheses behind the blow-up and
/// escape statements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub hankel_condition: f64,
    pub minor_condition: f64,
    pub hankel_nonsingular: bool,
    pub minor_nonsingular: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionReport {
    pub hypotheses: HypothesisCheck,
    pub collisions: Vec<CollisionFinding>,
    pub escapes: Vec<EscapeFinding>,
    /// Hyperbolic sample with the smallest node gap.
    pub closest_approach: Option<(f64, f64)>,
}

/// Finds node collisions at the hyperbolicity boundaries of a trace and
/// node escape as `|t|` grows.
pub fn collision_diagnostics(trace: &CurveTrace) -> CollisionReport {
    let curve = &trace.curve;
    let closest_approach = trace
        .samples
        .iter()
        .filter(|s| s.hyperbolic && s.min_gap.is_finite())
        .min_by(|a, b| a.min_gap.total_cmp(&b.min_gap))
        .map(|s| (s.t, s.min_gap));
    let collisions = trace
        .crossings
        .iter()
        .filter(|c| c.hyperbolic_side != 0)
        .map(|c| collision_finding(curve, c))
        .collect();
    let escapes = if curve.d() > 1 {
        vec![escape_finding(curve, 1), escape_finding(curve, -1)]
    } else {
        Vec::new()
    };
    CollisionReport {
        hypotheses: hypothesis_check(curve),
        collisions,
        escapes,
        closest_approach,
    }
}

fn hypothesis_check(curve: &PronyCurve) -> HypothesisCheck {
    let d = curve.d();
    let limit = 1.0 / default_rank_tol(d);
    let hankel_condition = condition_number(&curve.hankel());
    let minor_condition = if d == 1 {
        1.0
    } else {
        condition_number(&hankel_from_slice(curve.fixed_moments(), d - 1, d - 1))
    };
    HypothesisCheck {
        hankel_condition,
        minor_condition,
        hankel_nonsingular: hankel_condition < limit,
        minor_nonsingular: minor_condition < limit,
    }
}

fn collision_finding(curve: &PronyCurve, c: &BoundaryCrossing) -> CollisionFinding {
    let scale = c.t.abs().max(1.0);
    let probes: Vec<CollisionProbe> = (2..=8)
        .map(|k| {
            let distance = 10f64.powi(-k);
            let t = c.t + f64::from(c.hyperbolic_side) * distance * scale;
            let s = sample_curve(curve, t);
            let mut probe = CollisionProbe {
                distance,
                t,
                min_gap: s.min_gap,
                max_abs_amplitude: s.max_abs_amplitude,
                pair: None,
                pair_amplitudes: None,
            };
            if let (Some(x), Some(a)) = (&s.nodes, &s.amplitudes) {
                let i = (0..x.len() - 1)
                    .min_by(|&i, &j| (x[i + 1] - x[i]).total_cmp(&(x[j + 1] - x[j])))
                    .unwrap_or(0);
                if x.len() > 1 {
                    probe.pair = Some((i, i + 1));
                    probe.pair_amplitudes = Some((a[i], a[i + 1]));
                }
            }
            probe
        })
        .collect();
    let gaps: Vec<f64> = probes.iter().map(|p| p.min_gap).collect();
    let gap_shrinks = gaps.windows(2).all(|w| w[1] < w[0]);
    let amps: Vec<Option<f64>> = probes.iter().map(|p| p.max_abs_amplitude).collect();
    let amplitude_growth_monotone = amps
        .windows(2)
        .all(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if b > a));
    let pts: Vec<(f64, f64)> = probes
        .iter()
        .filter_map(|p| {
            let a = p.max_abs_amplitude?;
            (p.min_gap > 0.0 && a > 0.0).then(|| ((1.0 / p.min_gap).ln(), a.ln()))
        })
        .collect();
    CollisionFinding {
        t_boundary: c.t,
        hyperbolic_side: c.hyperbolic_side,
        probes,
        gap_shrinks,
        amplitude_growth_monotone,
        blowup_exponent: fit_slope(&pts),
    }
}

fn escape_finding(curve: &PronyCurve, direction: i8) -> EscapeFinding {
    let scale = 1.0 + curve.fixed_moments().iter().fold(0.0_f64, |s, v| s.max(v.abs()));
    let probes: Vec<EscapeProbe> = (1..=6)
        .map(|k| {
            let t = f64::from(direction) * scale * 10f64.powi(k);
            let roots = polynomial_roots(&curve.eval(t))
                .map(|r| r.roots().to_vec())
                .unwrap_or_default();
            EscapeProbe { t, roots }
        })
        .collect();
    let d = curve.d();
    let last = &probes[probes.len() - 1].roots;
    let escaping_index = (0..last.len())
        .max_by(|&i, &j| last[i].norm().total_cmp(&last[j].norm()))
        .unwrap_or(0);
    let escape_monotone = probes.windows(2).all(|w| {
        match (w[0].roots.get(escaping_index), w[1].roots.get(escaping_index)) {
            (Some(a), Some(b)) => b.norm() > a.norm(),
            _ => false,
        }
    });
    let prev = &probes[probes.len() - 2].roots;
    let others = |r: &[Complex64]| -> Vec<Complex64> {
        r.iter()
            .enumerate()
            .filter(|(i, _)| *i != escaping_index)
            .map(|(_, z)| *z)
            .collect()
    };
    let (o_last, o_prev) = (others(last), others(prev));
    let others_bounded = o_last.len() == o_prev.len()
        && o_last
            .iter()
            .zip(&o_prev)
            .all(|(a, b)| (a - b).norm() <= 1e-2 * (1.0 + a.norm()));
    EscapeFinding {
        direction,
        escaping_index,
        escaping_is_extreme: escaping_index == 0 || escaping_index + 1 == d,
        escape_monotone,
        others_bounded,
        others_max_abs: o_last.iter().fold(0.0, |m, z| m.max(z.norm())),
        probes,
    }
}

fn fit_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
