//! One function per subcommand.

use std::io::Write;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use pronylab::applications::{exponential_fit, gauss_quadrature_from_moments, waring_decompose};
use pronylab::error_geometry::{sample_error_set, scaling_experiment, worst_case_errors};
use pronylab::varieties::{collision_diagnostics, prony_curve, trace_curve};
use pronylab::{prony_solve_with, MomentVector, PronyError, SolveOutcome, SolverConfig, SpikeSignal};

use crate::input::{
    parse, read_input, ErrorScanInput, ExpfitInput, MomentsInput, ScalingInput, SignalInput, SolveInput,
    TraceInput, WaringInput,
};
use crate::tables::{write_scaling, write_scan, write_trace, ScalingRow, ScanRow, TraceRow};
use crate::{exit, Cli, Command, Common, ScalingArgs, TraceArgs};

const DEFAULT_H_LIST: [f64; 5] = [0.1, 0.07, 0.05, 0.035, 0.025];
const DEFAULT_TRACE_STEPS: usize = 201;

pub fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    let c = &cli.common;
    if !(c.tol_real > 0.0) || c.tol_rank.is_some_and(|t| !(t > 0.0)) {
        bail!("tolerances must be positive");
    }
    match &cli.command {
        Command::Solve => cmd_solve(c, stdout),
        Command::Moments => cmd_moments(c, stdout),
        Command::VarietyTrace(a) => cmd_variety_trace(c, a, stdout),
        Command::ErrorScan => cmd_error_scan(c, stdout),
        Command::Scaling(a) => cmd_scaling(c, a, stdout),
        Command::Quadrature => cmd_quadrature(c, stdout),
        Command::Expfit => cmd_expfit(c, stdout),
        Command::Waring => cmd_waring(c, stdout),
    }
}

/// Exit code for a failed command: complex solutions map to 2, inputs with
/// no real (or no generic) solution to 3, everything else to 1.
pub fn exit_code(e: &anyhow::Error) -> i32 {
    match e.downcast_ref::<PronyError>() {
        Some(PronyError::ComplexSolution) => exit::COMPLEX,
        Some(PronyError::NotRealSolvable | PronyError::Unsolvable(_) | PronyError::GenericityFailure(_)) => {
            exit::UNSOLVABLE
        }
        _ => exit::FAILURE,
    }
}

fn emit(common: &Common, stdout: &mut dyn Write, bytes: &[u8]) -> Result<()> {
    match &common.output {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => stdout.write_all(bytes).context("writing stdout"),
    }
}

fn to_json<T: Serialize + ?Sized>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(v)?;
    s.push(b'\n');
    Ok(s)
}

fn write_summary<T: Serialize>(common: &Common, v: &T) -> Result<()> {
    if let Some(p) = &common.summary {
        std::fs::write(p, to_json(v)?).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn solver_config(c: &Common) -> SolverConfig {
    SolverConfig {
        tol_rank: c.tol_rank,
        tol_real: c.tol_real,
        ..SolverConfig::default()
    }
}

fn complex_pairs(v: &[Complex64]) -> Value {
    Value::from(v.iter().map(|z| vec![z.re, z.im]).collect::<Vec<_>>())
}

pub fn cmd_solve(c: &Common, stdout: &mut dyn Write) -> Result<i32> {
    let inp: SolveInput = parse(&read_input(c.input.as_deref())?)?;
    inp.validate()?;
    let mu = MomentVector::with_order(inp.d, inp.moments)?;
    let sol = prony_solve_with(&mu, &solver_config(c));
    let (amplitudes, nodes, reason, code) = match &sol.outcome {
        SolveOutcome::Real(s) => (json!(s.amplitudes()), json!(unsigned_zero(s.nodes())), None, exit::OK),
        SolveOutcome::Complex { amplitudes, nodes } => {
            (complex_pairs(amplitudes), complex_pairs(nodes), None, exit::COMPLEX)
        }
        SolveOutcome::RankDeficient { reduced, .. } => match reduced {
            Some(s) => (json!(s.amplitudes()), json!(unsigned_zero(s.nodes())), None, exit::OK),
            None => (json!([]), json!([]), None, exit::OK),
        },
        SolveOutcome::Unsolvable { reason } => (json!([]), json!([]), Some(reason.clone()), exit::UNSOLVABLE),
    };
    let mut out = json!({
        "status": sol.outcome.status(),
        "amplitudes": amplitudes,
        "nodes": nodes,
        "rank": sol.rank,
        "condition": sol.condition,
        "residual": sol.residual,
    });
    if let Some(r) = reason {
        out["reason"] = json!(r);
    }
    emit(c, stdout, &to_json(&out)?)?;
    Ok(code)
}

pub fn cmd_moments(c: &Common, stdout: &mut dyn Write) -> Result<i32> {
    let inp: SignalInput = parse(&read_input(c.input.as_deref())?)?;
    let s = SpikeSignal::new(inp.amplitudes, inp.nodes)?;
    let count = inp.count.unwrap_or(2 * s.d());
    emit(c, stdout, &to_json(&json!({ "moments": s.moments(count) }))?)?;
    Ok(exit::OK)
}

pub fn cmd_variety_trace(c: &Common, a: &TraceArgs, stdout: &mut dyn Write) -> Result<i32> {
    let inp: TraceInput = parse(&read_input(c.input.as_deref())?)?;
    let n = inp.moments.len();
    let (fixed, t0) = if n % 2 == 1 {
        (&inp.moments[..], None)
    } else if n >= 2 {
        (&inp.moments[..n - 1], Some(inp.moments[n - 1]))
    } else {
        bail!("no moments given");
    };
    let curve = prony_curve(fixed)?;
    let half = t0.map(|t: f64| t.abs().max(1.0));
    let t_min = a.t_min.or(inp.t_min).or(t0.zip(half).map(|(t, h)| t - h));
    let t_max = a.t_max.or(inp.t_max).or(t0.zip(half).map(|(t, h)| t + h));
    let (Some(t_min), Some(t_max)) = (t_min, t_max) else {
        bail!("a t-range is required when only 2d - 1 moments are given");
    };
    let steps = a.steps.or(inp.steps).unwrap_or(DEFAULT_TRACE_STEPS);
    let trace = trace_curve(&curve, t_min, t_max, steps)?;
    let rows: Vec<TraceRow> = trace
        .samples
        .iter()
        .map(|s| TraceRow {
            t: s.t,
            hyperbolic: s.hyperbolic,
            on_boundary: s.on_boundary,
            discriminant: s.discriminant,
            min_gap: s.min_gap,
            max_abs_amplitude: s.max_abs_amplitude,
            coefficients: s.coefficients.clone(),
            nodes: s.nodes.clone(),
            amplitudes: s.amplitudes.clone(),
        })
        .collect();
    let mut buf = Vec::new();
    write_trace(&mut buf, curve.d(), &rows)?;
    emit(c, stdout, &buf)?;
    if c.summary.is_some() {
        let report = collision_diagnostics(&trace);
        write_summary(
            c,
            &json!({
                "d": curve.d(),
                "fixed_moments": curve.fixed_moments(),
                "slope": curve.slope(),
                "intercept": curve.intercept(),
                "crossings": trace.crossings,
                "diagnostics": report,
            }),
        )?;
    }
    Ok(exit::OK)
}

pub fn cmd_error_scan(c: &Common, stdout: &mut dyn Write) -> Result<i32> {
    let inp: ErrorScanInput = parse(&read_input(c.input.as_deref())?)?;
    if !(inp.eps > 0.0) {
        bail!("eps must be positive");
    }
    let signal = SpikeSignal::new(inp.amplitudes, inp.nodes)?;
    let set = sample_error_set(&signal, inp.eps, c.samples, c.seed);
    let rows: Vec<ScanRow> = set
        .samples
        .iter()
        .map(|e| ScanRow {
            index: e.index,
            perturbation: e.perturbation.clone(),
            nodes: e.signal.nodes().to_vec(),
            amplitudes: e.signal.amplitudes().to_vec(),
            dist_a: e.signal.amplitude_distance(&signal),
            dist_x: e.signal.node_distance(&signal),
            dist: e.signal.distance(&signal),
        })
        .collect();
    let mut buf = Vec::new();
    write_scan(&mut buf, signal.d(), &rows)?;
    emit(c, stdout, &buf)?;
    if c.summary.is_some() {
        write_summary(c, &worst_case_errors(&signal, inp.eps, c.samples.max(1), c.seed)?)?;
    }
    if !c.quiet {
        eprintln!(
            "{} of {} samples real ({:.1}% discarded)",
            set.samples.len(),
            set.n_drawn,
            100.0 * set.discarded_fraction
        );
    }
    Ok(exit::OK)
}

pub fn cmd_scaling(c: &Common, a: &ScalingArgs, stdout: &mut dyn Write) -> Result<i32> {
    let from_file: Option<ScalingInput> = match &c.input {
        Some(s) => Some(parse(&read_input(Some(s))?)?),
        None => None,
    };
    let d = a.d.or(from_file.as_ref().map(|f| f.d)).unwrap_or(2);
    let h_list = a
        .h_list
        .clone()
        .or(from_file.as_ref().map(|f| f.h_list.clone()))
        .unwrap_or(DEFAULT_H_LIST.to_vec());
    let p = a
        .p
        .or(from_file.as_ref().and_then(|f| f.p))
        .unwrap_or((2 * d - 1) as f64);
    let report = scaling_experiment(d, &h_list, p, c.samples, c.seed)?;
    let rows: Vec<ScalingRow> = report
        .points
        .iter()
        .map(|s| ScalingRow {
            h: s.h,
            eps: s.eps,
            rho: s.rho,
            rho_a: s.rho_a,
            rho_x: s.rho_x,
        })
        .collect();
    let mut buf = Vec::new();
    write_scaling(&mut buf, &rows)?;
    emit(c, stdout, &buf)?;
    write_summary(c, &report)?;
    if !c.quiet {
        eprintln!(
            "slopes: rho_x {:.3}, rho_a {:.3}, rho {:.3}",
            report.slope_rho_x, report.slope_rho_a, report.slope_rho
        );
    }
    Ok(exit::OK)
}

pub fn cmd_quadrature(c: &Common, stdout: &mut dyn Write) -> Result<i32> {
    let inp: MomentsInput = parse(&read_input(c.input.as_deref())?)?;
    let q = gauss_quadrature_from_moments(&MomentVector::new(inp.moments)?)?;
    emit(c, stdout, &to_json(&q)?)?;
    Ok(exit::OK)
}

pub fn cmd_expfit(c: &Common, stdout: &mut dyn Write) -> Result<i32> {
    let inp: ExpfitInput = parse(&read_input(c.input.as_deref())?)?;
    let f = exponential_fit(&inp.samples)?;
    emit(c, stdout, &to_json(&f)?)?;
    Ok(exit::OK)
}

pub fn cmd_waring(c: &Common, stdout: &mut dyn Write) -> Result<i32> {
    let inp: WaringInput = parse(&read_input(c.input.as_deref())?)?;
    let w = waring_decompose(&inp.coefficients, inp.coefficients.len() / 2)?;
    emit(c, stdout, &to_json(&w)?)?;
    Ok(exit::OK)
}

fn unsigned_zero(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x + 0.0).collect()
}
