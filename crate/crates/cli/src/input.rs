//! JSON input documents, one per command.

use std::io::Read;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// The raw input text: inline JSON if `--input` starts with `{`, otherwise
/// the named file; stdin when `--input` is absent.
pub fn read_input(input: Option<&str>) -> Result<String> {
    match input {
        Some(s) if s.trim_start().starts_with('{') => Ok(s.to_string()),
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {path}")),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
            Ok(s)
        }
    }
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).context("malformed input")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveInput {
    pub d: usize,
    pub moments: Vec<f64>,
}

impl SolveInput {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.moments.len() != 2 * self.d {
            bail!("expected 2d = {} moments, got {}", 2 * self.d, self.moments.len());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalInput {
    pub amplitudes: Vec<f64>,
    pub nodes: Vec<f64>,
    /// Number of moments, default `2d`.
    #[serde(default)]
    pub count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceInput {
    /// Either the `2d - 1` fixed moments or a full vector of `2d`.
    pub moments: Vec<f64>,
    #[serde(default)]
    pub t_min: Option<f64>,
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorScanInput {
    pub amplitudes: Vec<f64>,
    pub nodes: Vec<f64>,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingInput {
    pub d: usize,
    pub h_list: Vec<f64>,
    #[serde(default)]
    pub p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsInput {
    pub moments: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpfitInput {
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaringInput {
    /// `b_0, ..., b_m` of `sum_i b_i x^{m-i} y^i`.
    pub coefficients: Vec<f64>,
}
