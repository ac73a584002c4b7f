//! CSV tables written by the scan commands, and readers for them.
//!
//! Numbers are written with 17 significant digits so that every value
//! reads back bit-for-bit.

use std::io::{Read, Write};

use anyhow::{bail, Context, Result};

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse().with_context(|| format!("bad number {s:?}"))
}

fn parse_opt(s: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_f64(s).map(Some)
    }
}

fn parse_opt_vec(fields: &[&str]) -> Result<Option<Vec<f64>>> {
    if fields.iter().all(|s| s.is_empty()) {
        return Ok(None);
    }
    fields.iter().map(|s| parse_f64(s)).collect::<Result<_>>().map(Some)
}

fn parse_bool(s: &str) -> Result<bool> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => bail!("bad flag {s:?}"),
    }
}

fn numbered(prefix: &str, range: std::ops::Range<usize>) -> Vec<String> {
    range.map(|i| format!("{prefix}{i}")).collect()
}

/// One row of a Prony curve trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub hyperbolic: bool,
    pub on_boundary: bool,
    pub discriminant: f64,
    pub min_gap: f64,
    pub max_abs_amplitude: Option<f64>,
    /// `c_0, ..., c_{d-1}`.
    pub coefficients: Vec<f64>,
    pub nodes: Option<Vec<f64>>,
    pub amplitudes: Option<Vec<f64>>,
}

pub fn trace_header(d: usize) -> Vec<String> {
    let mut h: Vec<String> = ["t", "hyperbolic", "on_boundary", "discriminant", "min_gap", "max_abs_amplitude"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    h.extend(numbered("c", 0..d));
    h.extend(numbered("x", 1..d + 1));
    h.extend(numbered("a", 1..d + 1));
    h
}

pub fn write_trace<W: Write>(w: W, d: usize, rows: &[TraceRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(trace_header(d))?;
    for r in rows {
        let mut rec = vec![
            fmt_f64(r.t),
            r.hyperbolic.to_string(),
            r.on_boundary.to_string(),
            fmt_f64(r.discriminant),
            fmt_f64(r.min_gap),
            fmt_opt(r.max_abs_amplitude),
        ];
        rec.extend(r.coefficients.iter().map(|v| fmt_f64(*v)));
        for v in [&r.nodes, &r.amplitudes] {
            match v {
                Some(v) => rec.extend(v.iter().map(|x| fmt_f64(*x))),
                None => rec.extend(std::iter::repeat_n(String::new(), d)),
            }
        }
        out.write_record(rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_trace<R: Read>(r: R) -> Result<Vec<TraceRow>> {
    let mut rd = csv::Reader::from_reader(r);
    let ncols = rd.headers()?.len();
    if ncols < 9 || (ncols - 6) % 3 != 0 {
        bail!("unexpected trace header with {ncols} columns");
    }
    let d = (ncols - 6) / 3;
    if rd.headers()?.iter().collect::<Vec<_>>() != trace_header(d) {
        bail!("unexpected trace header");
    }
    rd.records()
        .map(|rec| {
            let rec = rec?;
            let f: Vec<&str> = rec.iter().collect();
            Ok(TraceRow {
                t: parse_f64(f[0])?,
                hyperbolic: parse_bool(f[1])?,
                on_boundary: parse_bool(f[2])?,
                discriminant: parse_f64(f[3])?,
                min_gap: parse_f64(f[4])?,
                max_abs_amplitude: parse_opt(f[5])?,
                coefficients: f[6..6 + d].iter().map(|s| parse_f64(s)).collect::<Result<_>>()?,
                nodes: parse_opt_vec(&f[6 + d..6 + 2 * d])?,
                amplitudes: parse_opt_vec(&f[6 + 2 * d..6 + 3 * d])?,
            })
        })
        .collect()
}

/// One real solution drawn from an error set.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub index: usize,
    /// `delta_0, ..., delta_{2d-1}`.
    pub perturbation: Vec<f64>,
    pub nodes: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub dist_a: f64,
    pub dist_x: f64,
    pub dist: f64,
}

pub fn scan_header(d: usize) -> Vec<String> {
    let mut h = vec!["index".to_string()];
    h.extend(numbered("delta", 0..2 * d));
    h.extend(numbered("x", 1..d + 1));
    h.extend(numbered("a", 1..d + 1));
    h.extend(["dist_a", "dist_x", "dist"].iter().map(|s| s.to_string()));
    h
}

pub fn write_scan<W: Write>(w: W, d: usize, rows: &[ScanRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(scan_header(d))?;
    for r in rows {
        let mut rec = vec![r.index.to_string()];
        rec.extend(r.perturbation.iter().chain(&r.nodes).chain(&r.amplitudes).map(|v| fmt_f64(*v)));
        rec.extend([r.dist_a, r.dist_x, r.dist].map(fmt_f64));
        out.write_record(rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_scan<R: Read>(r: R) -> Result<Vec<ScanRow>> {
    let mut rd = csv::Reader::from_reader(r);
    let ncols = rd.headers()?.len();
    if ncols < 8 || (ncols - 4) % 4 != 0 {
        bail!("unexpected scan header with {ncols} columns");
    }
    let d = (ncols - 4) / 4;
    if rd.headers()?.iter().collect::<Vec<_>>() != scan_header(d) {
        bail!("unexpected scan header");
    }
    rd.records()
        .map(|rec| {
            let rec = rec?;
            let f: Vec<&str> = rec.iter().collect();
            let nums = |s: &[&str]| s.iter().map(|v| parse_f64(v)).collect::<Result<Vec<_>>>();
            Ok(ScanRow {
                index: f[0].parse().context("bad index")?,
                perturbation: nums(&f[1..1 + 2 * d])?,
                nodes: nums(&f[1 + 2 * d..1 + 3 * d])?,
                amplitudes: nums(&f[1 + 3 * d..1 + 4 * d])?,
                dist_a: parse_f64(f[1 + 4 * d])?,
                dist_x: parse_f64(f[2 + 4 * d])?,
                dist: parse_f64(f[3 + 4 * d])?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    pub h: f64,
    pub eps: f64,
    pub rho: f64,
    pub rho_a: f64,
    pub rho_x: f64,
}

pub const SCALING_HEADER: [&str; 5] = ["h", "eps", "rho", "rho_a", "rho_x"];

pub fn write_scaling<W: Write>(w: W, rows: &[ScalingRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SCALING_HEADER)?;
    for r in rows {
        out.write_record([r.h, r.eps, r.rho, r.rho_a, r.rho_x].map(fmt_f64))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_scaling<R: Read>(r: R) -> Result<Vec<ScalingRow>> {
    let mut rd = csv::Reader::from_reader(r);
    if rd.headers()?.iter().collect::<Vec<_>>() != SCALING_HEADER {
        bail!("unexpected scaling header");
    }
    rd.records()
        .map(|rec| {
            let rec = rec?;
            let f: Vec<f64> = rec.iter().map(parse_f64).collect::<Result<_>>()?;
            if f.len() != 5 {
                bail!("scaling row with {} fields", f.len());
            }
            Ok(ScalingRow {
                h: f[0],
                eps: f[1],
                rho: f[2],
                rho_a: f[3],
                rho_x: f[4],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(parse_f64(&fmt_f64(v)).unwrap().to_bits(), v.to_bits());
        }
        assert!(parse_f64(&fmt_f64(f64::NAN)).unwrap().is_nan());
        assert_eq!(parse_f64(&fmt_f64(f64::INFINITY)).unwrap(), f64::INFINITY);
    }

    #[test]
    fn trace_round_trip() {
        let rows = vec![
            TraceRow {
                t: -0.1,
                hyperbolic: true,
                on_boundary: false,
                discriminant: 1.04,
                min_gap: 1.0198,
                max_abs_amplitude: Some(1.2),
                coefficients: vec![-0.25, 0.2],
                nodes: Some(vec![-0.6, 0.4]),
                amplitudes: Some(vec![0.8, 1.2]),
            },
            TraceRow {
                t: 0.3,
                hyperbolic: false,
                on_boundary: false,
                discriminant: -0.6,
                min_gap: 0.7,
                max_abs_amplitude: None,
                coefficients: vec![0.25, 0.6],
                nodes: None,
                amplitudes: None,
            },
        ];
        let mut buf = Vec::new();
        write_trace(&mut buf, 2, &rows).unwrap();
        assert_eq!(read_trace(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn scan_and_scaling_round_trip() {
        let rows = vec![ScanRow {
            index: 3,
            perturbation: vec![1e-3, -1e-3],
            nodes: vec![0.1],
            amplitudes: vec![2.0],
            dist_a: 1e-3,
            dist_x: 2e-3,
            dist: 2e-3,
        }];
        let mut buf = Vec::new();
        write_scan(&mut buf, 1, &rows).unwrap();
        assert_eq!(read_scan(buf.as_slice()).unwrap(), rows);

        let rows = vec![ScalingRow { h: 0.1, eps: 1e-3, rho: 0.3, rho_a: 0.3, rho_x: 0.03 }];
        let mut buf = Vec::new();
        write_scaling(&mut buf, &rows).unwrap();
        assert_eq!(read_scaling(buf.as_slice()).unwrap(), rows);
        assert!(read_scaling("a,b\n1,2\n".as_bytes()).is_err());
    }
}
