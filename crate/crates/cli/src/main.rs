//! Command-line front end: interpolating-function traces, reconstruction
//! experiments, sampling-interval sweeps, the Walter counterexample table and
//! bound reports, all emitted as deterministic CSV or JSON.

mod config;
mod output;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use config::{CommonOpts, Config};
use freqloc_core::pipeline::{run_reconstruction, ReconstructionPlan};
use freqloc_core::spectrum::{v_space_denominator, walter_denominator, InterpKernel};
use freqloc_core::{bounds, Error as CoreError};
use output::{emit, fmt_float, report_path, CsvWriter};
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Parser)]
#[command(
    name = "freqloc",
    about = "Frequency-localized sampling experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the interpolating function in time and frequency for each
    /// sampling interval (and the resonance limit when --limit-ell is set).
    Interp {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Prefilter a test signal, sample, reconstruct, and report the error.
    Reconstruct {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Reconstruction error and bound across a list of sampling intervals.
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Partial sums of the odd-order non-centered B-spline denominator at
    /// xi = pi, with the centered denominator for contrast.
    Walter {
        #[command(flatten)]
        common: CommonOpts,
        /// Symmetric term counts for the partial sums (repeatable).
        #[arg(long = "n-terms")]
        n_terms: Vec<u64>,
    },
    /// Full bound report for one prefilter/weight/interval triple.
    Bounds {
        #[command(flatten)]
        common: CommonOpts,
    },
}

#[derive(Serialize)]
struct Report<'c> {
    config: &'c Config,
    m_w: f64,
    series_value: f64,
    bound_sq: f64,
    critical_lambda: f64,
    sup_rel: Option<f64>,
    lattice_mismatch_max: Option<f64>,
    terms_used: usize,
    remainder: f64,
}

fn error_token(err: &CoreError) -> &'static str {
    match err {
        CoreError::DivergentMoment { .. } => "divergent-moment",
        CoreError::ResonantInterval { .. } => "resonant-interval",
        CoreError::PoleDetected { .. } => "pole-detected",
        CoreError::SymmetryViolation { .. } => "symmetry-violation",
        CoreError::TruncationBudgetExceeded { .. } => "truncation-budget-exceeded",
        CoreError::WrongFamily { .. } => "wrong-family",
        CoreError::InvalidParameter { .. } => "invalid-parameter",
    }
}

fn cmd_interp(common: &CommonOpts) -> Result<i32> {
    let cfg = common.resolve()?;
    let p = cfg.prefilter()?;
    let window = cfg.window_obj()?;
    let xs = window.xs();
    let mut traces: Vec<(String, InterpKernel<f64>)> = Vec::new();
    for &lambda in &cfg.lambda {
        let kernel = InterpKernel::new(&p, lambda)
            .with_context(|| format!("interpolating kernel at lambda={lambda}"))?;
        traces.push((format!("lambda={lambda}"), kernel));
    }
    if let Some(ell) = cfg.limit_ell {
        let kernel = InterpKernel::limit(&p, ell)
            .with_context(|| format!("limit kernel at ell={ell}"))?;
        traces.push((format!("limit-ell={ell}"), kernel));
    }
    let mut csv = CsvWriter::new(&["trace", "x", "phi_int", "xi", "phi_int_hat"]);
    for (name, kernel) in &traces {
        let big_lambda = 2.0 * PI / kernel.lambda();
        let xi_half = 1.5 * big_lambda;
        let n = xs.len();
        for (k, &x) in xs.iter().enumerate() {
            let xi = -xi_half + 2.0 * xi_half * k as f64 / (n as f64 - 1.0);
            csv.row(&[
                name.clone(),
                fmt_float(x),
                fmt_float(kernel.eval(x)),
                fmt_float(xi),
                fmt_float(kernel.eval_hat(xi)),
            ]);
        }
    }
    emit(common.out.as_ref(), &csv.finish())?;
    Ok(0)
}

fn build_plan(cfg: &Config, lambda: f64) -> Result<ReconstructionPlan<f64>> {
    let mut plan = ReconstructionPlan::new(
        cfg.prefilter()?,
        lambda,
        cfg.signal()?,
        cfg.window_obj()?,
    );
    plan.weight = Some(cfg.weight()?);
    if let Some(ell) = cfg.limit_ell {
        if (lambda - 1.0 / ell as f64).abs() < 1e-12 {
            plan.limit_ell = Some(ell);
        }
    }
    Ok(plan)
}

fn cmd_reconstruct(common: &CommonOpts) -> Result<i32> {
    let cfg = common.resolve()?;
    let &lambda = cfg
        .lambda
        .first()
        .ok_or_else(|| anyhow::anyhow!("reconstruct requires a sampling interval"))?;
    let plan = build_plan(&cfg, lambda)?;
    let out = run_reconstruction(&plan).context("reconstruction failed")?;
    let bound = out.bound.as_ref().expect("plan carries a weight");

    let report = Report {
        config: &cfg,
        m_w: bound.m_w,
        series_value: bound.series_value,
        bound_sq: bound.bound_sq,
        critical_lambda: bound.critical_lambda,
        sup_rel: Some(out.stats.sup_rel),
        lattice_mismatch_max: Some(out.lattice_mismatch_max),
        terms_used: bound.terms_used,
        remainder: bound.remainder,
    };
    let report_json = format!("{}\n", serde_json::to_string_pretty(&report)?);

    if cfg.format == "json" {
        emit(common.out.as_ref(), &report_json)?;
        return Ok(0);
    }

    let mut csv = CsvWriter::new(&["x", "re_g", "re_g_tilde", "abs_err"]);
    for (k, &x) in out.xs.iter().enumerate() {
        csv.row(&[
            fmt_float(x),
            fmt_float(out.g[k].re),
            fmt_float(out.g_tilde[k].re),
            fmt_float(out.stats.per_point[k]),
        ]);
    }
    emit(common.out.as_ref(), &csv.finish())?;
    match common.out.as_ref() {
        Some(path) => std::fs::write(report_path(path), report_json)?,
        None => eprint!("{report_json}"),
    }
    Ok(0)
}

fn cmd_sweep(common: &CommonOpts) -> Result<i32> {
    let cfg = common.resolve()?;
    let mut csv = CsvWriter::new(&["lambda", "sup_rel", "bound_sqrt", "critical_lambda", "status"]);
    let mut failures = 0usize;
    for &lambda in &cfg.lambda {
        let row = build_plan(&cfg, lambda)
            .and_then(|plan| Ok(run_reconstruction(&plan)?));
        match row {
            Ok(out) => {
                let bound = out.bound.as_ref().expect("plan carries a weight");
                csv.row(&[
                    fmt_float(lambda),
                    fmt_float(out.stats.sup_rel),
                    fmt_float(bound.bound_sq.sqrt()),
                    fmt_float(bound.critical_lambda),
                    "ok".into(),
                ]);
            }
            Err(err) => {
                failures += 1;
                let token = match err.downcast_ref::<CoreError>() {
                    Some(core) => error_token(core).to_string(),
                    None => "error".to_string(),
                };
                csv.row(&[
                    fmt_float(lambda),
                    "nan".into(),
                    "nan".into(),
                    "nan".into(),
                    token,
                ]);
            }
        }
    }
    emit(common.out.as_ref(), &csv.finish())?;
    Ok(if failures == 0 { 0 } else { 1 })
}

fn cmd_walter(common: &CommonOpts, n_terms: &[u64]) -> Result<i32> {
    let cfg = common.resolve()?;
    let order = cfg.order;
    if order % 2 == 0 || order < 3 {
        bail!("the counterexample requires an odd B-spline order >= 3, got {order}");
    }
    let counts: Vec<u64> = if n_terms.is_empty() {
        vec![100, 1_000, 10_000]
    } else {
        n_terms.to_vec()
    };
    let centered = v_space_denominator(&freqloc_core::Prefilter::bspline(order)?, 1.0, PI).re;
    let mut csv = CsvWriter::new(&[
        "n_terms",
        "partial_sum",
        "remainder_bound",
        "centered_denominator_at_pi",
    ]);
    for &n in &counts {
        let (partial, remainder) = walter_denominator::<f64>(order, n)?;
        csv.row(&[
            n.to_string(),
            fmt_float(partial),
            fmt_float(remainder),
            fmt_float(centered),
        ]);
    }
    emit(common.out.as_ref(), &csv.finish())?;
    Ok(0)
}

fn cmd_bounds(common: &CommonOpts) -> Result<i32> {
    let cfg = common.resolve()?;
    let &lambda = cfg
        .lambda
        .first()
        .ok_or_else(|| anyhow::anyhow!("bounds requires a sampling interval"))?;
    let p = cfg.prefilter()?;
    let w = cfg.weight()?;
    let report = bounds::general_bound(&p, &w, lambda).context("bound evaluation failed")?;
    let json = Report {
        config: &cfg,
        m_w: report.m_w,
        series_value: report.series_value,
        bound_sq: report.bound_sq,
        critical_lambda: report.critical_lambda,
        sup_rel: None,
        lattice_mismatch_max: None,
        terms_used: report.terms_used,
        remainder: report.remainder,
    };
    emit(
        common.out.as_ref(),
        &format!("{}\n", serde_json::to_string_pretty(&json)?),
    )?;
    Ok(0)
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Interp { common } => cmd_interp(common),
        Command::Reconstruct { common } => cmd_reconstruct(common),
        Command::Sweep { common } => cmd_sweep(common),
        Command::Walter { common, n_terms } => cmd_walter(common, n_terms),
        Command::Bounds { common } => cmd_bounds(common),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}
