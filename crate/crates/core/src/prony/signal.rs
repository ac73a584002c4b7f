use serde::{Deserialize, Serialize};

use crate::error::{PronyError, Result};

/// A spike train `F(x) = sum_j a_j delta(x - x_j)`, stored with nodes in
/// nondecreasing order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikeSignal {
    amplitudes: Vec<f64>,
    nodes: Vec<f64>,
}

impl SpikeSignal {
    /// Builds a signal, sorting the `(amplitude, node)` pairs by node.
    pub fn new(amplitudes: Vec<f64>, nodes: Vec<f64>) -> Result<Self> {
        if amplitudes.len() != nodes.len() {
            return Err(PronyError::InvalidInput(format!(
                "{} amplitudes but {} nodes",
                amplitudes.len(),
                nodes.len()
            )));
        }
        if nodes.is_empty() {
            return Err(PronyError::InvalidInput("a signal needs at least one spike".into()));
        }
        if amplitudes.iter().chain(&nodes).any(|v| !v.is_finite()) {
            return Err(PronyError::InvalidInput("non-finite amplitude or node".into()));
        }
        let mut pairs: Vec<(f64, f64)> = nodes.into_iter().zip(amplitudes).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, amplitudes) = pairs.into_iter().unzip();
        Ok(Self { amplitudes, nodes })
    }

    pub fn d(&self) -> usize {
        self.nodes.len()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `(m_0, ..., m_{count-1})` by direct summation.
    pub fn moments(&self, count: usize) -> Vec<f64> {
        moments(self, count)
    }

    /// The Prony map: the first `2d` moments.
    pub fn prony_map(&self) -> MomentVector {
        MomentVector {
            values: self.moments(2 * self.d()),
        }
    }

    /// Smallest distance between neighbouring nodes, `+inf` for one spike.
    pub fn min_gap(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// `max(||A - A'||_inf, ||X - X'||_inf)` with nodes paired in sorted order.
    pub fn distance(&self, other: &SpikeSignal) -> f64 {
        self.amplitude_distance(other).max(self.node_distance(other))
    }

    pub fn amplitude_distance(&self, other: &SpikeSignal) -> f64 {
        max_abs_diff(&self.amplitudes, &other.amplitudes)
    }

    pub fn node_distance(&self, other: &SpikeSignal) -> f64 {
        max_abs_diff(&self.nodes, &other.nodes)
    }
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// The right-hand side `(m_0, ..., m_{2d-1})` of a Prony system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MomentVector {
    values: Vec<f64>,
}

impl MomentVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() % 2 != 0 {
            return Err(PronyError::InvalidInput(format!(
                "moment vector must have even positive length, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(PronyError::InvalidInput("non-finite moment".into()));
        }
        Ok(Self { values })
    }

    /// Checks the length against an explicit `d`.
    pub fn with_order(d: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != 2 * d {
            return Err(PronyError::InvalidInput(format!(
                "expected {} moments for d = {d}, got {}",
                2 * d,
                values.len()
            )));
        }
        Self::new(values)
    }

    pub fn d(&self) -> usize {
        self.values.len() / 2
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// The first `2d - 1` moments, which fix a Prony curve.
    pub fn fixed_part(&self) -> &[f64] {
        &self.values[..self.values.len() - 1]
    }

    /// The free moment `m_{2d-1}`.
    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Max-norm distance.
    pub fn distance(&self, other: &MomentVector) -> f64 {
        max_abs_diff(&self.values, &other.values)
    }
}

impl TryFrom<Vec<f64>> for MomentVector {
    type Error = PronyError;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<MomentVector> for Vec<f64> {
    fn from(mu: MomentVector) -> Self {
        mu.values
    }
}

/// `m_k(F) = sum_j a_j x_j^k` for `k = 0..count`.
pub fn moments(signal: &SpikeSignal, count: usize) -> Vec<f64> {
    let mut out = vec![0.0; count];
    for (&a, &x) in signal.amplitudes.iter().zip(&signal.nodes) {
        let mut p = a;
        for m in out.iter_mut() {
            *m += p;
            p *= x;
        }
    }
    out
}
