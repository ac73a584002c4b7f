//! Brute-force reference computations for certifying the pronylab solver.
//!
//! Nothing here shares code with the library under test: moments are summed
//! directly, the spike search is an exhaustive grid followed by a compass
//! search, and rational series are expanded by long division.

/// Direct summation of `m_k = sum_j a_j x_j^k` for `k < count`.
pub fn forward_moments(amplitudes: &[f64], nodes: &[f64], count: usize) -> Vec<f64> {
    assert_eq!(amplitudes.len(), nodes.len());
    (0..count)
        .map(|k| {
            amplitudes
                .iter()
                .zip(nodes)
                .map(|(a, x)| a * x.powi(k as i32))
                .sum()
        })
        .collect()
}

/// Max-norm distance between the moments of `(amplitudes, nodes)` and `mu`.
pub fn moment_residual(amplitudes: &[f64], nodes: &[f64], mu: &[f64]) -> f64 {
    forward_moments(amplitudes, nodes, mu.len())
        .iter()
        .zip(mu)
        .map(|(m, t)| (m - t).abs())
        .fold(0.0, f64::max)
}

/// Search region for [`brute_force_solve`].
#[derive(Debug, Clone, Copy)]
pub struct SearchBox {
    pub amplitude: (f64, f64),
    pub node: (f64, f64),
    /// Grid points per coordinate.
    pub steps: usize,
}

impl Default for SearchBox {
    fn default() -> Self {
        Self {
            amplitude: (-4.0, 4.0),
            node: (-2.0, 2.0),
            steps: 41,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BruteForceResult {
    pub amplitudes: Vec<f64>,
    /// Sorted ascending.
    pub nodes: Vec<f64>,
    /// Max-norm moment residual at the returned point.
    pub residual: f64,
}

fn grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps < 2 {
        return vec![0.5 * (lo + hi)];
    }
    (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect()
}

/// Exhaustive search for a real `d`-spike signal (`d` is 1 or 2) whose first
/// `mu.len()` moments fit `mu`.
///
/// The coarse grid is ranked in the max norm and followed by a least-squares
/// compass search over every direction in `{-1, 0, 1}^(2d)`, started from the
/// best few grid points and confined to the box. The reported residual is
/// the max norm.
pub fn brute_force_solve(mu: &[f64], d: usize, sbox: &SearchBox) -> BruteForceResult {
    assert!(d == 1 || d == 2, "brute force supports d in {{1, 2}}");
    let amps = grid(sbox.amplitude.0, sbox.amplitude.1, sbox.steps);
    let xs = grid(sbox.node.0, sbox.node.1, sbox.steps);

    // (residual, params) with params = [a_1..a_d, x_1..x_d]
    let mut best: Vec<(f64, Vec<f64>)> = Vec::new();
    let keep = 8;
    let push = |r: f64, p: Vec<f64>, best: &mut Vec<(f64, Vec<f64>)>| {
        if best.len() < keep || r < best[best.len() - 1].0 {
            best.push((r, p));
            best.sort_by(|a, b| a.0.total_cmp(&b.0));
            best.truncate(keep);
        }
    };
    match d {
        1 => {
            for &a in &amps {
                for &x in &xs {
                    push(moment_residual(&[a], &[x], mu), vec![a, x], &mut best);
                }
            }
        }
        _ => {
            for (i, &x1) in xs.iter().enumerate() {
                for &x2 in &xs[i..] {
                    for &a1 in &amps {
                        for &a2 in &amps {
                            let r = moment_residual(&[a1, a2], &[x1, x2], mu);
                            push(r, vec![a1, a2, x1, x2], &mut best);
                        }
                    }
                }
            }
        }
    }

    let dim = 2 * d;
    let mut directions = Vec::new();
    for code in 0..3usize.pow(dim as u32) {
        let mut c = code;
        let dir: Vec<f64> = (0..dim)
            .map(|_| {
                let v = (c % 3) as f64 - 1.0;
                c /= 3;
                v
            })
            .collect();
        if dir.iter().any(|&v| v != 0.0) {
            directions.push(dir);
        }
    }
    let clamp = |p: &mut [f64]| {
        for (i, v) in p.iter_mut().enumerate() {
            let (lo, hi) = if i < d { sbox.amplitude } else { sbox.node };
            *v = v.clamp(lo, hi);
        }
    };
    // The max norm has kinks that stall a compass search; refine on the
    // squared 2-norm and report the max norm at the end.
    let objective = |p: &[f64]| {
        forward_moments(&p[..d], &p[d..], mu.len())
            .iter()
            .zip(mu)
            .map(|(m, t)| (m - t) * (m - t))
            .sum::<f64>()
    };
    let amp_step0 = (sbox.amplitude.1 - sbox.amplitude.0) / (sbox.steps.max(2) - 1) as f64;
    let node_step0 = (sbox.node.1 - sbox.node.0) / (sbox.steps.max(2) - 1) as f64;

    let mut winner: Option<(f64, Vec<f64>)> = None;
    for (_, mut p) in best {
        let mut r = objective(&p);
        let mut scale = 1.0;
        while scale > 1e-14 {
            let mut improved = false;
            for dir in &directions {
                let mut cand = p.clone();
                for i in 0..dim {
                    let step = if i < d { amp_step0 } else { node_step0 };
                    cand[i] += dir[i] * step * scale;
                }
                clamp(&mut cand);
                let rc = objective(&cand);
                if rc < r {
                    r = rc;
                    p = cand;
                    improved = true;
                }
            }
            if !improved {
                scale *= 0.5;
            }
        }
        if winner.as_ref().is_none_or(|w| r < w.0) {
            winner = Some((r, p));
        }
    }
    let (_, p) = winner.expect("grid is nonempty");
    let residual = moment_residual(&p[..d], &p[d..], mu);
    let mut pairs: Vec<(f64, f64)> = (0..d).map(|j| (p[d + j], p[j])).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    BruteForceResult {
        amplitudes: pairs.iter().map(|q| q.1).collect(),
        nodes: pairs.iter().map(|q| q.0).collect(),
        residual,
    }
}

/// Coefficients `s_0, s_1, ...` of the expansion `P(z)/Q(z) = sum_k s_k z^(-k-1)`
/// at infinity, computed by long division.
///
/// `p` holds `b_0..b_{d-1}` (ascending powers), `q_low` holds `c_0..c_{d-1}` of
/// the monic denominator `z^d + c_{d-1} z^{d-1} + ... + c_0`.
pub fn series_expand_rational(p: &[f64], q_low: &[f64], k_max: usize) -> Vec<f64> {
    let d = q_low.len();
    assert!(p.len() <= d, "numerator degree must be below the denominator's");
    let mut s = Vec::with_capacity(k_max);
    for n in 0..k_max {
        // coefficient of z^(d-1-n) in Q * sum_k s_k z^(-k-1)
        let mut v = if n < d {
            p.get(d - 1 - n).copied().unwrap_or(0.0)
        } else {
            0.0
        };
        for (j, c) in q_low.iter().enumerate() {
            if n + j >= d {
                v -= c * s[n + j - d];
            }
        }
        s.push(v);
    }
    s
}

/// Smallest value of `f` on a uniform grid of `n` points over `[a, b]`.
pub fn grid_argmin(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> (f64, f64) {
    grid(a, b, n)
        .into_iter()
        .map(|t| (t, f(t)))
        .filter(|(_, v)| v.is_finite())
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap_or((f64::NAN, f64::INFINITY))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_of_single_pole() {
        let s = series_expand_rational(&[2.0], &[-1.0], 4);
        assert_eq!(s, vec![2.0, 2.0, 2.0, 2.0]);
        let s = series_expand_rational(&[1.0], &[0.0], 3);
        assert_eq!(s, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn series_of_symmetric_pair() {
        // 1/(z-1/2) + 1/(z+1/2) = 2z / (z^2 - 1/4)
        let s = series_expand_rational(&[0.0, 2.0], &[-0.25, 0.0], 6);
        let m = forward_moments(&[1.0, 1.0], &[-0.5, 0.5], 6);
        for (a, b) in s.iter().zip(&m) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn brute_force_finds_known_pair() {
        let r = brute_force_solve(&[2.0, 0.0, 0.5, 0.0], 2, &SearchBox::default());
        assert!(r.residual < 1e-9, "{r:?}");
        assert!((r.nodes[0] + 0.5).abs() < 1e-6 && (r.nodes[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn brute_force_single_spike() {
        let r = brute_force_solve(&[2.0, 2.0], 1, &SearchBox::default());
        assert!(r.residual < 1e-12);
        assert!((r.amplitudes[0] - 2.0).abs() < 1e-9 && (r.nodes[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn brute_force_certifies_complex_moments_infeasible() {
        let r = brute_force_solve(&[2.0, 0.0, -0.5, 0.0], 2, &SearchBox::default());
        assert!(r.residual > 1e-2, "{r:?}");
    }
}
