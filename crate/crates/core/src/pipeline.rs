//! End-to-end reconstruction experiments: synthesize a test signal, apply the
//! prefilter, sample, rebuild with the interpolating kernel, and measure the
//! error against the direct evaluator, optionally with the analytic bound.

use crate::bounds::{bound_at, BoundReport};
use crate::error::{Error, Result};
use crate::prefilter::{Prefilter, Weight};
use crate::sampling::{
    measure_error, norm_phi, prefilter_apply, reconstruct_with_kernel, sample, synthesize,
    ErrorStats, SampleSet, Signal, TestSignal, TAU_TRUNC,
};
use crate::scalar::{fl, Scalar};
use crate::spectrum::{FrequencyGrid, InterpKernel};
use num_complex::Complex;

/// Uniform evaluation window `[x0, x1]` with `points` samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window<T> {
    pub x0: T,
    pub x1: T,
    pub points: usize,
}

impl<T: Scalar> Window<T> {
    pub fn new(x0: T, x1: T, points: usize) -> Result<Self> {
        if x0 >= x1 || x0.is_nan() || x1.is_nan() {
            return Err(Error::invalid("window requires x0 < x1"));
        }
        if points < 2 {
            return Err(Error::invalid("window requires at least 2 points"));
        }
        Ok(Window { x0, x1, points })
    }

    pub fn xs(&self) -> Vec<T> {
        let dx = (self.x1 - self.x0) / fl((self.points - 1) as f64);
        (0..self.points).map(|k| self.x0 + dx * fl(k as f64)).collect()
    }
}

/// One reconstruction experiment.
#[derive(Debug, Clone)]
pub struct ReconstructionPlan<T> {
    pub prefilter: Prefilter<T>,
    pub lambda: T,
    /// When set, reconstruct with the B-spline resonance limit kernel for
    /// `lambda = 1/ell` instead of the regular interpolating function.
    pub limit_ell: Option<u32>,
    pub signal: TestSignal<T>,
    pub window: Window<T>,
    /// Weight for the accompanying error bound; omit to skip the bound.
    pub weight: Option<Weight<T>>,
    pub tau_trunc: T,
    /// Extra sampled width beyond the window on each side, in `x` units.
    /// Defaults to a family-specific margin, doubled on demand when the tail
    /// budget fails.
    pub margin_x: Option<T>,
}

impl<T: Scalar> ReconstructionPlan<T> {
    pub fn new(
        prefilter: Prefilter<T>,
        lambda: T,
        signal: TestSignal<T>,
        window: Window<T>,
    ) -> Self {
        ReconstructionPlan {
            prefilter,
            lambda,
            limit_ell: None,
            signal,
            window,
            weight: None,
            tau_trunc: fl(TAU_TRUNC),
            margin_x: None,
        }
    }
}

/// Everything measured in one experiment run.
#[derive(Debug, Clone)]
pub struct ReconstructionOutcome<T> {
    pub xs: Vec<T>,
    pub g: Vec<Complex<T>>,
    pub g_tilde: Vec<Complex<T>>,
    pub stats: ErrorStats<T>,
    /// Localized norm of the signal through the isometry.
    pub norm: T,
    /// Worst reconstruction mismatch at interior lattice points, relative to
    /// the peak interior sample.
    pub lattice_mismatch_max: T,
    pub n_range: (i64, i64),
    pub bound: Option<BoundReport<T>>,
}

impl<T: Scalar> ReconstructionOutcome<T> {
    /// Packages the reconstruction as a uniformly sampled time signal.
    pub fn reconstruction_signal(&self) -> Result<Signal<T>> {
        Signal::new(self.xs[0], self.xs[1] - self.xs[0], self.g_tilde.clone())
    }
}

fn default_margin<T: Scalar>(p: &Prefilter<T>) -> T {
    match *p {
        Prefilter::Gaussian { beta } => fl::<T>(12.0) / beta,
        Prefilter::Sinc { .. } => fl(16.0),
        Prefilter::BSplineCentered { order } | Prefilter::BSplineNonCentered { order } => {
            fl::<T>(12.0) + fl(order as f64)
        }
    }
}

/// Frequency grid sized for a signal and sampling interval: covers the
/// signal's effective band and resolves one periodization period.
pub fn signal_grid<T: Scalar>(signal: &TestSignal<T>, lambda: T) -> Result<FrequencyGrid<T>> {
    let big_lambda = fl::<T>(2.0) * T::PI() / lambda;
    let half = signal.band_hint().max(fl(4.0));
    let dx = fl::<T>(0.01).min(big_lambda / fl(200.0));
    FrequencyGrid::with_spacing(half, dx)
}

/// Builds the interpolation kernel a plan calls for (regular or resonance
/// limit).
pub fn plan_kernel<T: Scalar>(plan: &ReconstructionPlan<T>) -> Result<InterpKernel<T>> {
    match plan.limit_ell {
        Some(ell) => {
            let k = InterpKernel::limit(&plan.prefilter, ell)?;
            if (k.lambda() - plan.lambda).abs() > fl::<T>(1e-9) {
                return Err(Error::invalid(
                    "limit reconstruction requires lambda = 1/ell",
                ));
            }
            Ok(k)
        }
        None => InterpKernel::new(&plan.prefilter, plan.lambda),
    }
}

/// Runs one reconstruction experiment, building the kernel on the fly.
pub fn run_reconstruction<T: Scalar>(
    plan: &ReconstructionPlan<T>,
) -> Result<ReconstructionOutcome<T>> {
    let kernel = plan_kernel(plan)?;
    run_with_kernel(plan, &kernel)
}

/// Runs one reconstruction experiment with a caller-supplied kernel, so
/// sweeps over many signals can share one kernel per `(prefilter, lambda)`.
pub fn run_with_kernel<T: Scalar>(
    plan: &ReconstructionPlan<T>,
    kernel: &InterpKernel<T>,
) -> Result<ReconstructionOutcome<T>> {
    let p = &plan.prefilter;
    let lambda = plan.lambda;
    if (kernel.lambda() - lambda).abs() > fl::<T>(1e-9) {
        return Err(Error::invalid("kernel lattice does not match the plan"));
    }

    let grid = signal_grid(&plan.signal, lambda)?;
    let f = synthesize(&plan.signal, &grid);
    let g = prefilter_apply(&f, p);
    let norm = norm_phi(&f, p);
    if norm <= T::zero() || norm.is_nan() {
        return Err(Error::invalid("test signal has no in-band energy"));
    }

    let xs = plan.window.xs();
    let mut margin = plan.margin_x.unwrap_or_else(|| default_margin(p));
    let mut attempt = 0;
    let (samples, g_tilde) = loop {
        let n_min = ((plan.window.x0 - margin) / lambda).floor().to_i64().unwrap_or(0);
        let n_max = ((plan.window.x1 + margin) / lambda).ceil().to_i64().unwrap_or(0);
        let samples = sample(|x| g.eval(x), lambda, n_min, n_max)?;
        match reconstruct_with_kernel(&samples, kernel, &xs, plan.tau_trunc) {
            Ok(rec) => break (samples, rec),
            Err(Error::TruncationBudgetExceeded { .. }) if attempt < 3 => {
                margin = margin * fl(2.0);
                attempt += 1;
            }
            Err(e) => return Err(e),
        }
    };

    let g_true: Vec<Complex<T>> = xs.iter().map(|&x| g.eval(x)).collect();
    let stats = measure_error(|x| g.eval(x), &g_tilde, &xs, norm)?;

    let lattice_mismatch_max = lattice_mismatch(&samples, kernel, plan, &xs)?;

    let bound = match &plan.weight {
        Some(w) => Some(bound_at(p, w, lambda)?),
        None => None,
    };

    Ok(ReconstructionOutcome {
        xs,
        g: g_true,
        g_tilde,
        stats,
        norm,
        lattice_mismatch_max,
        n_range: (samples.n_min, samples.n_max),
        bound,
    })
}

/// Worst relative reconstruction error over the interior lattice points.
fn lattice_mismatch<T: Scalar>(
    samples: &SampleSet<T>,
    kernel: &InterpKernel<T>,
    plan: &ReconstructionPlan<T>,
    xs: &[T],
) -> Result<T> {
    let lambda = samples.lambda;
    let lo = (xs[0] / lambda).ceil().to_i64().unwrap_or(0) + 1;
    let hi = (xs[xs.len() - 1] / lambda).floor().to_i64().unwrap_or(0) - 1;
    if lo > hi {
        return Ok(T::zero());
    }
    let lattice_xs: Vec<T> = (lo..=hi).map(|n| lambda * fl(n as f64)).collect();
    let rec = reconstruct_with_kernel(samples, kernel, &lattice_xs, plan.tau_trunc)?;
    let mut peak = T::zero();
    for n in lo..=hi {
        peak = peak.max(samples.value(n).norm());
    }
    if peak == T::zero() {
        return Ok(T::zero());
    }
    let mut worst = T::zero();
    for (n, &r) in (lo..=hi).zip(rec.iter()) {
        worst = worst.max((r - samples.value(n)).norm());
    }
    Ok(worst / peak)
}
