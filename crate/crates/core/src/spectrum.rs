//! Periodized spectra and everything built on top of them: Riesz-bound
//! estimates, dual and interpolating functions, aliasing ratios, the B-spline
//! resonance limit, and the Walter counterexample denominator.
//!
//! The central object is the lattice sum
//! `D(xi) = Lambda * sum_n |phi_hat(xi + n Lambda)|^2` with `Lambda = 2 pi /
//! lambda`. Its lower and upper envelopes are the Riesz bounds; the
//! interpolating spectrum is `Phi_hat_int(xi) = sqrt(2 pi) |phi_hat(xi)|^2 /
//! D(xi)`; the dual generator is `phi_hat(xi) / D(xi)`.

use crate::error::{Error, Result};
use crate::prefilter::Prefilter;
use crate::quad::simpson_coeff;
use crate::scalar::{fl, sinc, Scalar};
use num_complex::Complex;

/// Absolute floor for spectral denominators. Below it, operations that can
/// amplify (the dual spectrum, the signed interpolator) refuse to divide.
pub const EPS_RIESZ: f64 = 1e-8;

/// Tolerance on the imaginary residue of nominally real inverse transforms.
pub const TAU_SYM: f64 = 1e-8;

/// Uniform symmetric frequency grid with an odd point count, so that zero is
/// always a grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid<T> {
    half_width: T,
    count: usize,
}

impl<T: Scalar> FrequencyGrid<T> {
    pub fn new(half_width: T, count: usize) -> Result<Self> {
        if half_width.is_nan() || half_width <= T::zero() || !half_width.is_finite() {
            return Err(Error::invalid("grid half width must be positive"));
        }
        if count < 3 || count.is_multiple_of(2) {
            return Err(Error::invalid("grid count must be odd and at least 3"));
        }
        Ok(FrequencyGrid { half_width, count })
    }

    /// Smallest odd-count grid whose spacing does not exceed `dx_max`.
    pub fn with_spacing(half_width: T, dx_max: T) -> Result<Self> {
        if dx_max.is_nan() || dx_max <= T::zero() {
            return Err(Error::invalid("grid spacing must be positive"));
        }
        let intervals = (fl::<T>(2.0) * half_width / dx_max)
            .ceil()
            .to_usize()
            .ok_or_else(|| Error::invalid("grid spacing too small for this width"))?;
        let intervals = intervals.max(2);
        let intervals = if intervals % 2 == 0 { intervals } else { intervals + 1 };
        FrequencyGrid::new(half_width, intervals + 1)
    }

    pub fn half_width(&self) -> T {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Grid spacing.
    pub fn dx(&self) -> T {
        fl::<T>(2.0) * self.half_width / fl((self.count - 1) as f64)
    }

    /// The `k`-th grid point, `-half_width + k dx`.
    pub fn point(&self, k: usize) -> T {
        debug_assert!(k < self.count);
        -self.half_width + self.dx() * fl(k as f64)
    }

    pub fn points(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.count).map(move |k| self.point(k))
    }

    /// Composite Simpson weight for point `k` (including the spacing factor).
    pub fn simpson_weight(&self, k: usize) -> T {
        simpson_coeff::<T>(k, self.count) * self.dx() / fl(3.0)
    }
}

/// Result of periodizing `|phi_hat|^2` over the frequency lattice.
#[derive(Debug, Clone)]
pub struct PeriodizedSpectrum<T> {
    pub lambda: T,
    pub big_lambda: T,
    pub grid: FrequencyGrid<T>,
    /// `Lambda * sum_{|n| <= truncation_terms} |phi_hat(xi_k + n Lambda)|^2`.
    pub values: Vec<T>,
    pub truncation_terms: usize,
    /// Certified bound on the dropped lattice tail (absolute, same scale as
    /// `values`).
    pub remainder_bound: T,
}

/// Number of lattice terms needed so the dropped tail of
/// `Lambda * sum |phi_hat(xi + n Lambda)|^2` stays below `tol` for every
/// `|xi| <= xi_max`. Returns the term count and the certified remainder.
fn periodization_terms<T: Scalar>(
    p: &Prefilter<T>,
    big_lambda: T,
    xi_max: T,
    tol: T,
) -> (usize, T) {
    match *p {
        Prefilter::Sinc { beta } => {
            // compact support: the sum is exactly finite
            let n = ((xi_max + T::PI() * beta) / big_lambda).ceil().to_usize().unwrap_or(0) + 1;
            (n, T::zero())
        }
        Prefilter::Gaussian { beta } => {
            let remainder = |n: usize| -> T {
                let x = big_lambda * fl((n + 1) as f64) - xi_max;
                if x <= T::zero() {
                    return T::infinity();
                }
                let geo = T::one() - (-fl::<T>(2.0) * x * big_lambda / (beta * beta)).exp();
                big_lambda / T::PI() * (-(x * x) / (beta * beta)).exp() / geo
            };
            let ln_term = (tol.recip().max(fl(10.0))).ln() * fl(2.0);
            let mut n = ((xi_max + beta * ln_term.sqrt()) / big_lambda)
                .ceil()
                .to_usize()
                .unwrap_or(1)
                .max(1);
            while remainder(n) > tol && n < 100_000 {
                n += 1;
            }
            (n, remainder(n))
        }
        Prefilter::BSplineCentered { order } | Prefilter::BSplineNonCentered { order } => {
            let two_m = fl::<T>(2.0 * order as f64);
            let coeff = fl::<T>(4f64.powi(order as i32)) / (T::PI() * (two_m - T::one()));
            let remainder = |n: usize| -> T {
                let x = big_lambda * fl(n as f64) - xi_max;
                if x <= T::zero() {
                    return T::infinity();
                }
                coeff * x.powf(T::one() - two_m)
            };
            let needed = (coeff / tol).powf((two_m - T::one()).recip());
            let mut n = ((xi_max + needed) / big_lambda).ceil().to_usize().unwrap_or(1).max(1);
            while remainder(n) > tol && n < 1_000_000 {
                n += 1;
            }
            (n, remainder(n))
        }
    }
}

/// Truncated lattice sum `Lambda * sum_{|n| <= n_terms} |phi_hat(xi + n
/// Lambda)|^2` evaluated directly.
fn lattice_sum<T: Scalar>(p: &Prefilter<T>, big_lambda: T, xi: T, n_terms: usize) -> T {
    let sqrt_2pi = (fl::<T>(2.0) * T::PI()).sqrt();
    let mut acc = p.autocorr_freq(xi);
    for n in 1..=n_terms {
        let shift = big_lambda * fl(n as f64);
        acc = acc + p.autocorr_freq(xi + shift) + p.autocorr_freq(xi - shift);
    }
    // autocorr_freq = sqrt(2 pi) |phi_hat|^2
    big_lambda * acc / sqrt_2pi
}

/// Single-point periodized sum with certified truncation: returns `(D(xi),
/// remainder_bound)`.
pub fn periodized_sum_at<T: Scalar>(p: &Prefilter<T>, lambda: T, xi: T, tol: T) -> (T, T) {
    let big_lambda = fl::<T>(2.0) * T::PI() / lambda;
    let (n, rem) = periodization_terms(p, big_lambda, xi.abs(), tol);
    (lattice_sum(p, big_lambda, xi, n), rem)
}

/// Periodized sum to *relative* accuracy: the summands are nonnegative, so
/// convergence is monotone and the sum can be extended until a whole block of
/// additional shifts stops contributing. This keeps denominators meaningful
/// even where their absolute scale is far below any fixed floor (deep
/// Gaussian gaps, B-spline near-resonances).
fn lattice_sum_relative<T: Scalar>(p: &Prefilter<T>, lambda: T, xi: T, rel_tol: T) -> T {
    let big_lambda = fl::<T>(2.0) * T::PI() / lambda;
    if matches!(p, Prefilter::Sinc { .. }) {
        // exact finite sum
        let (n_exact, _) = periodization_terms(p, big_lambda, xi.abs(), T::one());
        return lattice_sum(p, big_lambda, xi, n_exact);
    }
    // a cheap a-priori start; the relative block extension finishes the job
    let (n_start, _) = periodization_terms(p, big_lambda, xi.abs(), fl(1e-6));
    let sqrt_2pi = (fl::<T>(2.0) * T::PI()).sqrt();
    let mut acc = p.autocorr_freq(xi);
    for n in 1..=n_start {
        let shift = big_lambda * fl(n as f64);
        acc = acc + p.autocorr_freq(xi + shift) + p.autocorr_freq(xi - shift);
    }
    let mut n = n_start;
    while n < 1_000_000 {
        let mut block = T::zero();
        for k in 1..=8usize {
            let shift = big_lambda * fl((n + k) as f64);
            block = block + p.autocorr_freq(xi + shift) + p.autocorr_freq(xi - shift);
        }
        acc = acc + block;
        n += 8;
        if block <= rel_tol * acc {
            break;
        }
    }
    big_lambda * acc / sqrt_2pi
}

/// Periodizes `|phi_hat|^2` over the lattice `2 pi / lambda` on the given
/// grid. The truncation count is chosen so the dropped tail stays below `tol`
/// at every grid point; the certificate is recorded in `remainder_bound`.
pub fn periodize<T: Scalar>(
    p: &Prefilter<T>,
    lambda: T,
    grid: &FrequencyGrid<T>,
    tol: T,
) -> PeriodizedSpectrum<T> {
    let big_lambda = fl::<T>(2.0) * T::PI() / lambda;
    let (n_terms, remainder) = periodization_terms(p, big_lambda, grid.half_width(), tol);
    let values = grid.points().map(|xi| lattice_sum(p, big_lambda, xi, n_terms)).collect();
    PeriodizedSpectrum {
        lambda,
        big_lambda,
        grid: grid.clone(),
        values,
        truncation_terms: n_terms,
        remainder_bound: remainder,
    }
}

/// Riesz-bound estimates `(A, B)`: the minimum and maximum of the periodized
/// spectrum over the grid. Grid estimates, not certified enclosures.
pub fn riesz_bounds<T: Scalar>(p: &Prefilter<T>, lambda: T, grid: &FrequencyGrid<T>) -> (T, T) {
    let per = periodize(p, lambda, grid, fl(1e-12));
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for &v in &per.values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

/// Riesz lower-bound estimate over one period, on an 801-point scan.
pub fn riesz_lower_estimate<T: Scalar>(p: &Prefilter<T>, lambda: T) -> T {
    let big_lambda = fl::<T>(2.0) * T::PI() / lambda;
    let grid = FrequencyGrid::new(big_lambda * fl(0.5), 801).expect("valid period grid");
    riesz_bounds(p, lambda, &grid).0
}

fn check_admissible<T: Scalar>(p: &Prefilter<T>, lambda: T) -> Result<()> {
    if p.is_admissible(lambda) {
        Ok(())
    } else {
        Err(Error::ResonantInterval {
            lambda: lambda.to_f64().unwrap_or(f64::NAN),
            xi: f64::NAN,
            value: 0.0,
        })
    }
}

/// Dual generator spectrum `phi_hat_dual(xi) = phi_hat(xi) / D(xi)`.
///
/// Errors with `ResonantInterval` when `lambda` is inadmissible or the
/// denominator falls below [`EPS_RIESZ`].
pub fn dual_spectrum<T: Scalar>(
    p: &Prefilter<T>,
    lambda: T,
    xi: T,
    tol: T,
) -> Result<Complex<T>> {
    check_admissible(p, lambda)?;
    let den = lattice_sum_relative(p, lambda, xi, tol.max(fl(1e-14)));
    if den < fl(EPS_RIESZ) {
        return Err(Error::ResonantInterval {
            lambda: lambda.to_f64().unwrap_or(f64::NAN),
            xi: xi.to_f64().unwrap_or(f64::NAN),
            value: den.to_f64().unwrap_or(0.0),
        });
    }
    Ok(p.eval_freq(xi) / den)
}

/// Interpolating spectrum `Phi_hat_int(xi) = sqrt(2 pi) |phi_hat(xi)|^2 /
/// D(xi)`; real and bounded by `sqrt(2 pi) / Lambda`.
///
/// Near a resonance both numerator and denominator vanish together and their
/// ratio stays bounded, so the [`EPS_RIESZ`] floor is enforced only when the
/// computed ratio would exceed its telescoping bound.
pub fn interp_spectrum<T: Scalar>(p: &Prefilter<T>, lambda: T, xi: T, tol: T) -> Result<T> {
    check_admissible(p, lambda)?;
    let big_lambda = fl::<T>(2.0) * T::PI() / lambda;
    let den = lattice_sum_relative(p, lambda, xi, tol.max(fl(1e-14)));
    let num = p.autocorr_freq(xi);
    let cap = (fl::<T>(2.0) * T::PI()).sqrt() / big_lambda;
    if den <= T::zero() {
        return if num <= T::zero() {
            Ok(T::zero())
        } else {
            Err(Error::ResonantInterval {
                lambda: lambda.to_f64().unwrap_or(f64::NAN),
                xi: xi.to_f64().unwrap_or(f64::NAN),
                value: den.to_f64().unwrap_or(0.0),
            })
        };
    }
    let ratio = num / den;
    if den < fl(EPS_RIESZ) && ratio > cap * fl(1.0 + 1e-9) {
        return Err(Error::ResonantInterval {
            lambda: lambda.to_f64().unwrap_or(f64::NAN),
            xi: xi.to_f64().unwrap_or(f64::NAN),
            value: den.to_f64().unwrap_or(0.0),
        });
    }
    Ok(ratio.min(cap))
}

/// Aliasing ratio `E_lambda(xi)`: the fraction of the periodized energy
/// contributed by the nonzero lattice shifts. Always in `[0, 1]`.
pub fn aliasing_ratio<T: Scalar>(p: &Prefilter<T>, lambda: T, xi: T, tol: T) -> Result<T> {
    let big_lambda = fl::<T>(2.0) * T::PI() / lambda;
    let den = lattice_sum_relative(p, lambda, xi, tol.max(fl(1e-14)));
    if den < fl(EPS_RIESZ) {
        return Err(Error::ResonantInterval {
            lambda: lambda.to_f64().unwrap_or(f64::NAN),
            xi: xi.to_f64().unwrap_or(f64::NAN),
            value: den.to_f64().unwrap_or(0.0),
        });
    }
    let sqrt_2pi = (fl::<T>(2.0) * T::PI()).sqrt();
    let central = big_lambda * p.autocorr_freq(xi) / sqrt_2pi;
    let e = (den - central) / den;
    Ok(e.max(T::zero()).min(T::one()))
}

/// The signed spectral denominator of the shift-invariant-space interpolator,
/// `(Lambda / sqrt(2 pi)) * sum_n phi_hat(xi + n Lambda)`.
///
/// Evaluated through the sample expansion `sum_k phi(k lambda) e^{-i k lambda
/// xi}` (exact for the compactly supported splines, machine-exact truncation
/// for the Gaussian) and by direct finite summation for the sinc family.
pub fn v_space_denominator<T: Scalar>(p: &Prefilter<T>, lambda: T, xi: T) -> Complex<T> {
    let big_lambda = fl::<T>(2.0) * T::PI() / lambda;
    match *p {
        Prefilter::Sinc { beta } => {
            // count the boxes covering xi
            let mut count = 0usize;
            let reach = ((xi.abs() + T::PI() * beta) / big_lambda).ceil().to_i64().unwrap_or(0) + 1;
            for n in -reach..=reach {
                if (xi + big_lambda * fl(n as f64)).abs() <= T::PI() * beta {
                    count += 1;
                }
            }
            Complex::new(
                big_lambda * fl::<T>(count as f64) / (fl::<T>(2.0) * T::PI() * beta),
                T::zero(),
            )
        }
        Prefilter::Gaussian { .. } => {
            let phi0 = p.eval_time(T::zero());
            let cutoff = phi0 * fl(1e-18);
            let mut acc = Complex::new(phi0, T::zero());
            let mut k = 1u32;
            loop {
                let v = p.eval_time(lambda * fl(k as f64));
                if v.abs() < cutoff || k > 100_000 {
                    break;
                }
                // even function: the +-k pair sums to 2 v cos(k lambda xi)
                acc.re = acc.re + fl::<T>(2.0) * v * (fl::<T>(k as f64) * lambda * xi).cos();
                k += 1;
            }
            acc
        }
        Prefilter::BSplineCentered { order } => {
            let mut acc = Complex::new(p.eval_time(T::zero()), T::zero());
            let k_max = (fl::<T>(order as f64) * fl::<T>(0.5) / lambda).ceil().to_i64().unwrap_or(0);
            for k in 1..=k_max {
                let v = p.eval_time(lambda * fl(k as f64));
                acc.re = acc.re + fl::<T>(2.0) * v * (fl::<T>(k as f64) * lambda * xi).cos();
            }
            acc
        }
        Prefilter::BSplineNonCentered { order } => {
            let mut acc = Complex::new(T::zero(), T::zero());
            let k_max = (fl::<T>(order as f64) / lambda).ceil().to_i64().unwrap_or(0);
            for k in 0..=k_max {
                let v = p.eval_time(lambda * fl(k as f64));
                if v != T::zero() {
                    let phase = -fl::<T>(k as f64) * lambda * xi;
                    acc = acc + Complex::from_polar(v, phase);
                }
            }
            acc
        }
    }
}

/// Interpolating spectrum of the shift-invariant space `V_lambda(phi)`
/// (signed denominator, no modulus). Signals `PoleDetected` when the
/// denominator vanishes, which is the Walter counterexample path.
pub fn phi_int_v_spectrum<T: Scalar>(p: &Prefilter<T>, lambda: T, xi: T) -> Result<Complex<T>> {
    let den = v_space_denominator(p, lambda, xi);
    if den.norm() < fl(EPS_RIESZ) {
        return Err(Error::PoleDetected {
            lambda: lambda.to_f64().unwrap_or(f64::NAN),
            xi: xi.to_f64().unwrap_or(f64::NAN),
            value: den.norm().to_f64().unwrap_or(0.0),
        });
    }
    Ok(p.eval_freq(xi) / den)
}

/// Symmetric partial sums of the Walter counterexample denominator.
///
/// For the non-centered B-spline of odd order `m` at `lambda = 1` the signed
/// denominator at `xi = pi` equals `i^{-m}` times the real series
/// `sum_n ((n + 1/2) pi)^{-m}`, whose symmetric partial sums tend to zero by
/// pairwise cancellation. Returns the partial sum over `|n| <= n_terms` and
/// an integral-test bound on the remainder (of order `n_terms^{1-m}`).
pub fn walter_denominator<T: Scalar>(order: u32, n_terms: u64) -> Result<(T, T)> {
    if order.is_multiple_of(2) || order < 3 {
        return Err(Error::invalid("walter denominator requires odd order >= 3"));
    }
    let m = order as i32;
    let mut acc = T::zero();
    let n = n_terms as i64;
    for k in -n..=n {
        let base = (fl::<T>(k as f64) + fl(0.5)) * T::PI();
        acc = acc + base.powi(-m);
    }
    let remainder = fl::<T>(2.0) * T::PI().powi(-m)
        * (fl::<T>(n as f64) + fl(0.5)).powi(1 - m)
        / fl((m - 1) as f64);
    Ok((acc, remainder))
}

/// Periodized autocorrelation through the sample expansion
/// `D(xi) = sum_k Phi(k lambda) cos(k lambda xi)`: the Poisson-summation
/// route, exact for splines. Used as the denominator engine of the
/// interpolation kernels and as an independent check on [`periodize`].
pub fn periodized_autocorr_poisson<T: Scalar>(p: &Prefilter<T>, lambda: T, xi: T) -> T {
    let mut acc = p.autocorr_time(T::zero());
    let cutoff = acc * fl(1e-18);
    let k_max = match *p {
        Prefilter::Sinc { .. } => panic!("poisson route not available for the sinc family"),
        Prefilter::Gaussian { .. } => 1_000_000,
        Prefilter::BSplineCentered { order } | Prefilter::BSplineNonCentered { order } => {
            (fl::<T>(order as f64) / lambda).ceil().to_i64().unwrap_or(0).max(0) as usize
        }
    };
    for k in 1..=k_max {
        let v = p.autocorr_time(lambda * fl(k as f64));
        if matches!(p, Prefilter::Gaussian { .. }) && v.abs() < cutoff {
            break;
        }
        acc = acc + fl::<T>(2.0) * v * (fl::<T>(k as f64) * lambda * xi).cos();
    }
    acc
}

/// Interpolating spectrum at the B-spline resonance `lambda = 1/ell`, i.e.
/// the limit function obtained from the dilated autocorrelation spectrum.
/// The numerator and denominator zeros cancel analytically in this form:
/// `Phi_hat_{ell,int}(xi) = (1/ell) Phi_hat(xi/ell) / D_1(xi/ell)` where
/// `D_1` is the (strictly positive) unit-interval periodization.
pub fn interp_spectrum_limit<T: Scalar>(p: &Prefilter<T>, ell: u32, xi: T) -> Result<T> {
    match p {
        Prefilter::BSplineCentered { .. } | Prefilter::BSplineNonCentered { .. } => {}
        other => {
            return Err(Error::WrongFamily {
                expected: "bspline".into(),
                found: other.family_name().into(),
            })
        }
    }
    if ell < 2 {
        return Err(Error::invalid("resonance index ell must be at least 2"));
    }
    let u = xi / fl(ell as f64);
    let den = periodized_autocorr_poisson(p, T::one(), u);
    Ok(p.autocorr_freq(u) / (fl::<T>(ell as f64) * den))
}

/// Inverse transform of the interpolating spectrum by composite Simpson on a
/// uniform grid: `Phi_int` sampled at `xs`.
///
/// The interpolating spectrum is real and even for every family (the
/// non-centered spline's phase cancels in the autocorrelation), so the cosine
/// transform is taken and evenness holds by construction. The sine residue is
/// still accumulated; if it exceeds [`TAU_SYM`] the grid cannot represent the
/// kernel and `SymmetryViolation` is raised.
pub fn interp_time<T: Scalar>(
    p: &Prefilter<T>,
    lambda: T,
    grid: &FrequencyGrid<T>,
    xs: &[T],
    tol: T,
) -> Result<Vec<T>> {
    check_admissible(p, lambda)?;
    let n = grid.len();
    let mut hat = Vec::with_capacity(n);
    for xi in grid.points() {
        hat.push(interp_spectrum(p, lambda, xi, tol)?);
    }
    let sqrt_2pi = (fl::<T>(2.0) * T::PI()).sqrt();
    let mut out = Vec::with_capacity(xs.len());
    let mut worst_residue = T::zero();
    for &x in xs {
        let mut re = T::zero();
        let mut im = T::zero();
        for (k, &h) in hat.iter().enumerate() {
            let w = grid.simpson_weight(k) * h;
            let phase = x * grid.point(k);
            re = re + w * phase.cos();
            im = im + w * phase.sin();
        }
        worst_residue = worst_residue.max(im.abs());
        out.push(re / sqrt_2pi);
    }
    if worst_residue / sqrt_2pi > fl(TAU_SYM) {
        return Err(Error::SymmetryViolation {
            residue: (worst_residue / sqrt_2pi).to_f64().unwrap_or(f64::NAN),
            tol: TAU_SYM,
        });
    }
    Ok(out)
}

/// Default frequency grid for transforming the interpolating spectrum of a
/// given prefilter: the sinc band exactly, ten standard deviations for the
/// Gaussian, and a tail-budgeted width for splines (whose interpolating
/// spectrum decays only algebraically).
pub fn kernel_grid<T: Scalar>(
    p: &Prefilter<T>,
    lambda: T,
    tail_tol: T,
    dx_max: T,
) -> Result<FrequencyGrid<T>> {
    let big_lambda = fl::<T>(2.0) * T::PI() / lambda;
    let dx = dx_max.min(big_lambda / fl(200.0));
    match *p {
        Prefilter::Sinc { beta } => FrequencyGrid::with_spacing(T::PI() * beta, dx),
        Prefilter::Gaussian { beta } => FrequencyGrid::with_spacing(fl::<T>(10.0) * beta, dx),
        Prefilter::BSplineCentered { order } | Prefilter::BSplineNonCentered { order } => {
            let a_est = riesz_lower_estimate(p, lambda).max(fl(1e-300));
            let two_m = fl::<T>(2.0 * order as f64);
            // time-domain truncation error <= coeff * Xi^{1 - 2m} / A
            let coeff = fl::<T>(2f64.powi(2 * order as i32 + 1))
                / (fl::<T>(2.0) * T::PI() * (two_m - T::one()));
            let xi = (coeff / (a_est * tail_tol)).powf((two_m - T::one()).recip());
            let xi = xi.max(fl::<T>(40.0) * T::PI()).max(fl::<T>(2.0) * big_lambda).min(fl(4000.0));
            FrequencyGrid::with_spacing(xi, dx)
        }
    }
}

pub(crate) enum KernelForm<T> {
    /// Piecewise-constant interpolating spectrum of the sinc family on
    /// `[0, pi beta]`: `(lo, hi, value)` per piece. The time kernel is the
    /// exact closed-form transform of the pieces.
    SincBand { pieces: Vec<(T, T, T)> },
    /// `Phi_int(x) = sum_j coeffs[|j|] Phi(x - j lambda_base)` where the
    /// coefficients are the Fourier coefficients of the reciprocal
    /// periodization. `dilation != 1` realizes the resonance limit kernels.
    AutocorrSeries {
        prefilter: Prefilter<T>,
        lambda_base: T,
        dilation: T,
        coeffs: Vec<T>,
        support_radius: T,
        tail_bound: T,
    },
    /// Interpolating spectrum sampled on a Simpson grid. Used where the
    /// reciprocal periodization spans too many decades for the series form
    /// (deep Gaussian gaps at small beta*lambda, spline near-resonances):
    /// the spectrum itself stays bounded by `sqrt(2 pi)/Lambda` there.
    Tabulated {
        prefilter: Prefilter<T>,
        grid: FrequencyGrid<T>,
        /// Simpson weight times `Phi_hat_int` per grid point.
        weighted_hat: Vec<T>,
        /// Tail budget the table was built for.
        tail_tol: T,
    },
}

/// Reconstruction-grade evaluator for the interpolating function `Phi_int`
/// (or its resonance limit): cheap pointwise evaluation in time and
/// frequency, accurate to roughly `1e-10` away from resonances.
pub struct InterpKernel<T> {
    lambda: T,
    pub(crate) form: KernelForm<T>,
}

/// Lower Riesz estimate above which the reciprocal-periodization series is
/// numerically safe; below it the kernel falls back to the tabulated form.
const SERIES_FLOOR: f64 = 1e-4;

/// Accuracy policy for the tabulated kernel form: the spectral tail budget
/// and the largest admissible grid spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPolicy<T> {
    pub tail_tol: T,
    pub dx_max: T,
}

impl<T: Scalar> KernelPolicy<T> {
    /// Reconstruction-grade accuracy (~1e-9 tails).
    pub fn fine() -> Self {
        KernelPolicy {
            tail_tol: fl(1e-9),
            dx_max: fl(0.005),
        }
    }

    /// Cheaper tables for error measurements that live far above 1e-5.
    pub fn fast() -> Self {
        KernelPolicy {
            tail_tol: fl(1e-5),
            dx_max: fl(0.01),
        }
    }
}

impl<T: Scalar> InterpKernel<T> {
    /// Builds the kernel for an admissible `(prefilter, lambda)` pair at the
    /// fine accuracy policy.
    pub fn new(p: &Prefilter<T>, lambda: T) -> Result<Self> {
        InterpKernel::with_policy(p, lambda, &KernelPolicy::fine())
    }

    /// Builds the kernel with an explicit accuracy policy (the policy only
    /// affects the tabulated fallback; the closed forms are exact).
    pub fn with_policy(p: &Prefilter<T>, lambda: T, policy: &KernelPolicy<T>) -> Result<Self> {
        check_admissible(p, lambda)?;
        match *p {
            Prefilter::Sinc { beta } => Ok(InterpKernel {
                lambda,
                form: sinc_band_form(beta, lambda)?,
            }),
            _ => {
                let a_est = riesz_lower_estimate(p, lambda);
                let form = if a_est >= fl(SERIES_FLOOR) {
                    autocorr_series_form(p, lambda, T::one())?
                } else {
                    tabulated_form(p, lambda, policy)?
                };
                Ok(InterpKernel { lambda, form })
            }
        }
    }

    /// Builds the resonance limit kernel `Phi_{ell,int}` for a B-spline
    /// prefilter: the unit-interval kernel dilated by `ell`, interpolating on
    /// the lattice `1/ell`.
    pub fn limit(p: &Prefilter<T>, ell: u32) -> Result<Self> {
        match p {
            Prefilter::BSplineCentered { .. } | Prefilter::BSplineNonCentered { .. } => {}
            other => {
                return Err(Error::WrongFamily {
                    expected: "bspline".into(),
                    found: other.family_name().into(),
                })
            }
        }
        if ell < 2 {
            return Err(Error::invalid("resonance index ell must be at least 2"));
        }
        let form = autocorr_series_form(p, T::one(), fl(ell as f64))?;
        Ok(InterpKernel {
            lambda: fl::<T>(ell as f64).recip(),
            form,
        })
    }

    /// Sampling interval the kernel interpolates on.
    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// Certified bound on the truncation error of the kernel's own series or
    /// piece representation (zero for the sinc closed form; grid-tail scale
    /// for the tabulated form).
    pub fn tail_bound(&self) -> T {
        match &self.form {
            KernelForm::SincBand { .. } => T::zero(),
            KernelForm::AutocorrSeries { tail_bound, .. } => *tail_bound,
            KernelForm::Tabulated { tail_tol, .. } => *tail_tol,
        }
    }

    /// Time-domain evaluation `Phi_int(x)`.
    pub fn eval(&self, x: T) -> T {
        match &self.form {
            KernelForm::SincBand { pieces } => {
                let sqrt_2pi = (fl::<T>(2.0) * T::PI()).sqrt();
                let mut acc = T::zero();
                for &(lo, hi, v) in pieces {
                    acc = acc + v * (hi * sinc(hi * x) - lo * sinc(lo * x));
                }
                fl::<T>(2.0) / sqrt_2pi * acc
            }
            KernelForm::AutocorrSeries {
                prefilter,
                lambda_base,
                dilation,
                coeffs,
                support_radius,
                ..
            } => {
                let u = *dilation * x;
                let lo = ((u - *support_radius) / *lambda_base).floor().to_i64().unwrap_or(0);
                let hi = ((u + *support_radius) / *lambda_base).ceil().to_i64().unwrap_or(0);
                let j_max = coeffs.len() as i64 - 1;
                let mut acc = T::zero();
                for j in lo.max(-j_max)..=hi.min(j_max) {
                    let c = coeffs[j.unsigned_abs() as usize];
                    if c != T::zero() {
                        acc = acc + c * prefilter.autocorr_time(u - *lambda_base * fl(j as f64));
                    }
                }
                acc
            }
            KernelForm::Tabulated { grid, weighted_hat, .. } => {
                let sqrt_2pi = (fl::<T>(2.0) * T::PI()).sqrt();
                let mut acc = T::zero();
                for (k, &wh) in weighted_hat.iter().enumerate() {
                    acc = acc + wh * (x * grid.point(k)).cos();
                }
                acc / sqrt_2pi
            }
        }
    }

    /// Frequency-domain evaluation `Phi_hat_int(xi)`.
    pub fn eval_hat(&self, xi: T) -> T {
        match &self.form {
            KernelForm::SincBand { pieces } => {
                let a = xi.abs();
                for &(lo, hi, v) in pieces {
                    if a >= lo && a <= hi {
                        return v;
                    }
                }
                T::zero()
            }
            KernelForm::AutocorrSeries {
                prefilter,
                lambda_base,
                dilation,
                coeffs,
                ..
            } => {
                let u = xi / *dilation;
                let mut r = coeffs[0];
                for (j, &c) in coeffs.iter().enumerate().skip(1) {
                    r = r + fl::<T>(2.0) * c * (fl::<T>(j as f64) * *lambda_base * u).cos();
                }
                prefilter.autocorr_freq(u) * r / *dilation
            }
            KernelForm::Tabulated { prefilter, .. } => {
                interp_spectrum(prefilter, self.lambda, xi, fl(1e-12)).unwrap_or(T::zero())
            }
        }
    }

    /// Evaluates the kernel at many points.
    pub fn eval_many(&self, xs: &[T]) -> Vec<T> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }
}

fn tabulated_form<T: Scalar>(
    p: &Prefilter<T>,
    lambda: T,
    policy: &KernelPolicy<T>,
) -> Result<KernelForm<T>> {
    let big_lambda = fl::<T>(2.0) * T::PI() / lambda;
    let dx = policy.dx_max.min(big_lambda / fl(400.0));
    let mut grid = kernel_grid(p, lambda, policy.tail_tol, dx)?;
    // cap the table near resonances, where the tail formula explodes; the
    // spacing (which resolves the narrow spectral dips) is kept and the
    // degraded tail is recorded in `tail_tol`
    const MAX_POINTS: usize = 600_001;
    let mut achieved_tail = policy.tail_tol;
    if grid.len() > MAX_POINTS {
        grid = FrequencyGrid::with_spacing(dx * fl(((MAX_POINTS - 1) / 2) as f64), dx)?;
        if let Prefilter::BSplineCentered { order } | Prefilter::BSplineNonCentered { order } = *p
        {
            let a_est = riesz_lower_estimate(p, lambda).max(fl(1e-300));
            let two_m = fl::<T>(2.0 * order as f64);
            let coeff = fl::<T>(2f64.powi(2 * order as i32 + 1))
                / (fl::<T>(2.0) * T::PI() * (two_m - T::one()));
            achieved_tail = coeff * grid.half_width().powf(T::one() - two_m) / a_est;
        }
    }
    let mut weighted_hat = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let h = interp_spectrum(p, lambda, grid.point(k), fl(1e-12))?;
        weighted_hat.push(grid.simpson_weight(k) * h);
    }
    Ok(KernelForm::Tabulated {
        prefilter: *p,
        grid,
        weighted_hat,
        tail_tol: achieved_tail,
    })
}

fn sinc_band_form<T: Scalar>(beta: T, lambda: T) -> Result<KernelForm<T>> {
    let big_lambda = fl::<T>(2.0) * T::PI() / lambda;
    let band = T::PI() * beta;
    let sqrt_2pi = (fl::<T>(2.0) * T::PI()).sqrt();
    // Breakpoints of the box-overlap count on [0, band].
    let mut cuts = vec![T::zero(), band];
    let reach = ((fl::<T>(2.0) * band) / big_lambda).ceil().to_i64().unwrap_or(0) + 1;
    for n in -reach..=reach {
        for edge in [big_lambda * fl(n as f64) - band, big_lambda * fl(n as f64) + band] {
            if edge > T::zero() && edge < band {
                cuts.push(edge);
            }
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    cuts.dedup_by(|a, b| (*a - *b).abs() < fl(1e-14));
    let mut pieces = Vec::with_capacity(cuts.len() - 1);
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = (lo + hi) * fl(0.5);
        let mut count = 0usize;
        for n in -reach..=reach {
            if (mid - big_lambda * fl(n as f64)).abs() <= band {
                count += 1;
            }
        }
        if count == 0 {
            // a spectral gap inside the band: lambda < 1/beta, not admissible
            return Err(Error::ResonantInterval {
                lambda: lambda.to_f64().unwrap_or(f64::NAN),
                xi: mid.to_f64().unwrap_or(f64::NAN),
                value: 0.0,
            });
        }
        pieces.push((lo, hi, sqrt_2pi / (big_lambda * fl(count as f64))));
    }
    Ok(KernelForm::SincBand { pieces })
}

fn autocorr_series_form<T: Scalar>(
    p: &Prefilter<T>,
    lambda_base: T,
    dilation: T,
) -> Result<KernelForm<T>> {
    // Autocorrelation samples Phi(k lambda): the periodization is the cosine
    // polynomial D(xi) = Phi(0) + 2 sum_k Phi(k lambda) cos(k lambda xi).
    let phi0 = p.autocorr_time(T::zero());
    let mut phi_samples = vec![phi0];
    let k_cap = match *p {
        Prefilter::Sinc { .. } => unreachable!("sinc uses the band form"),
        Prefilter::Gaussian { .. } => 1_000_000usize,
        Prefilter::BSplineCentered { order } | Prefilter::BSplineNonCentered { order } => {
            (fl::<T>(order as f64) / lambda_base).ceil().to_usize().unwrap_or(0)
        }
    };
    for k in 1..=k_cap {
        let v = p.autocorr_time(lambda_base * fl(k as f64));
        if matches!(p, Prefilter::Gaussian { .. }) && v.abs() < phi0 * fl(1e-18) {
            break;
        }
        phi_samples.push(v);
    }
    // Fourier coefficients of 1/D by the periodic trapezoid rule, which is
    // exponentially accurate here. The coefficient run is extended until it
    // decays into the rule's noise floor; if it has not decayed by half the
    // sample count the period is refined.
    let mut m_points = 2048usize;
    let mut coeffs: Vec<T>;
    loop {
        let mut inv_d = Vec::with_capacity(m_points);
        let mut min_d = T::infinity();
        for i in 0..m_points {
            // one period of D at xi = i Lambda / M, i.e. angle steps of
            // 2 pi i / M in k lambda xi
            let mut d = phi_samples[0];
            for (k, &v) in phi_samples.iter().enumerate().skip(1) {
                let angle = fl::<T>(2.0) * T::PI() * fl::<T>((k * i % m_points) as f64)
                    / fl(m_points as f64);
                d = d + fl::<T>(2.0) * v * angle.cos();
            }
            min_d = min_d.min(d);
            inv_d.push(d);
        }
        if min_d <= fl(EPS_RIESZ) {
            return Err(Error::ResonantInterval {
                lambda: (lambda_base / dilation).to_f64().unwrap_or(f64::NAN),
                xi: f64::NAN,
                value: min_d.to_f64().unwrap_or(0.0),
            });
        }
        for v in inv_d.iter_mut() {
            *v = v.recip();
        }
        let r0: T = inv_d.iter().fold(T::zero(), |a, &b| a + b) / fl(m_points as f64);
        // noise floor of the periodic trapezoid rule in the working precision
        let coeff_floor = fl::<T>(1e-13).max(T::epsilon() * fl(32.0));
        let tol_r = r0 * coeff_floor;
        let mut cs = vec![r0];
        let mut quiet = 0usize;
        for j in 1..(m_points / 2).min(4096) {
            let mut acc = T::zero();
            for (i, &v) in inv_d.iter().enumerate() {
                let angle =
                    fl::<T>(2.0) * T::PI() * fl::<T>((j * i % m_points) as f64) / fl(m_points as f64);
                acc = acc + v * angle.cos();
            }
            let rj = acc / fl(m_points as f64);
            cs.push(rj);
            if rj.abs() < tol_r {
                quiet += 1;
                if quiet >= 8 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        if quiet >= 8 || m_points >= 1 << 14 {
            coeffs = cs;
            break;
        }
        m_points *= 4;
    }
    let coeff_floor = fl::<T>(1e-13).max(T::epsilon() * fl(32.0));
    while coeffs.len() > 1
        && coeffs.last().map(|c| c.abs() < coeffs[0] * coeff_floor) == Some(true)
    {
        coeffs.pop();
    }
    let tail_bound = coeffs[0] * coeff_floor * fl(16.0) * phi0;
    let support_radius = match *p {
        Prefilter::Sinc { .. } => unreachable!("sinc uses the band form"),
        Prefilter::Gaussian { beta } => {
            // |Phi(x)| < 1e-18 Phi(0) outside this radius
            fl::<T>(2.0) / beta * fl::<T>((18.0 * std::f64::consts::LN_10).sqrt())
        }
        Prefilter::BSplineCentered { order } | Prefilter::BSplineNonCentered { order } => {
            fl(order as f64)
        }
    };
    // the series must reproduce the interpolation property on the base
    // lattice before dilation; a miss means the interval is unusable
    let series_at = |u: T| -> T {
        let j_max = coeffs.len() as i64 - 1;
        let lo = ((u - support_radius) / lambda_base).floor().to_i64().unwrap_or(0);
        let hi = ((u + support_radius) / lambda_base).ceil().to_i64().unwrap_or(0);
        let mut acc = T::zero();
        for j in lo.max(-j_max)..=hi.min(j_max) {
            let c = coeffs[j.unsigned_abs() as usize];
            acc = acc + c * p.autocorr_time(u - lambda_base * fl(j as f64));
        }
        acc
    };
    let at0 = series_at(T::zero());
    let at1 = series_at(lambda_base);
    let check_tol = fl::<T>(1e-7).max(T::epsilon() * fl(2048.0));
    if (at0 - T::one()).abs() > check_tol || at1.abs() > check_tol {
        return Err(Error::ResonantInterval {
            lambda: (lambda_base / dilation).to_f64().unwrap_or(f64::NAN),
            xi: f64::NAN,
            value: (at0 - T::one()).abs().to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(KernelForm::AutocorrSeries {
        prefilter: *p,
        lambda_base,
        dilation,
        coeffs,
        support_radius,
        tail_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const SQRT_2PI: f64 = 2.5066282746310002;

    #[test]
    fn grid_construction_rules() {
        assert!(FrequencyGrid::new(1.0, 4).is_err());
        assert!(FrequencyGrid::new(0.0, 5).is_err());
        let g = FrequencyGrid::new(2.0, 5).unwrap();
        assert_eq!(g.point(2), 0.0);
        assert_eq!(g.len(), 5);
        let g = FrequencyGrid::with_spacing(1.0, 0.3).unwrap();
        assert!(g.dx() <= 0.3);
        assert_eq!(g.len() % 2, 1);
    }

    #[test]
    fn sinc_tiling_gives_constant_periodization() {
        let p = Prefilter::sinc(4.0).unwrap();
        let grid = FrequencyGrid::new(30.0, 401).unwrap();
        let per = periodize(&p, 0.25, &grid, 1e-12);
        for (k, &v) in per.values.iter().enumerate() {
            // interior points: boxes tile exactly, D = 1/beta
            let xi: f64 = grid.point(k);
            if (xi.abs() - 4.0 * PI).abs() > 0.2 {
                assert_relative_eq!(v, 0.25, max_relative = 1e-12);
            }
        }
        assert_eq!(per.remainder_bound, 0.0);
    }

    #[test]
    fn periodization_is_periodic() {
        let p = Prefilter::gaussian(2.0).unwrap();
        let lambda = 0.4;
        let big = 2.0 * PI / lambda;
        for &xi in &[0.0, 1.3, -5.2] {
            let (a, _) = periodized_sum_at(&p, lambda, xi, 1e-12);
            let (b, _) = periodized_sum_at(&p, lambda, xi + big, 1e-12);
            assert_relative_eq!(a, b, max_relative = 1e-10);
        }
    }

    #[test]
    fn periodize_matches_brute_force_oracle() {
        // direct summation with four times the certified term count
        for p in [
            Prefilter::gaussian(2.0).unwrap(),
            Prefilter::bspline(2).unwrap(),
            Prefilter::bspline_noncentered(3).unwrap(),
        ] {
            let lambda = 0.45;
            let grid = FrequencyGrid::new(10.0, 101).unwrap();
            let per = periodize(&p, lambda, &grid, 1e-9);
            let big = per.big_lambda;
            for (k, &v) in per.values.iter().enumerate() {
                let xi = grid.point(k);
                let n4 = 4 * per.truncation_terms;
                let mut oracle = p.autocorr_freq(xi);
                for n in 1..=n4 {
                    oracle += p.autocorr_freq(xi + big * n as f64)
                        + p.autocorr_freq(xi - big * n as f64);
                }
                oracle *= big / SQRT_2PI;
                assert_abs_diff_eq!(v, oracle, epsilon = per.remainder_bound + 1e-13);
            }
        }
    }

    #[test]
    fn frequency_and_sample_expansions_agree() {
        // lattice sum vs Poisson route through autocorrelation samples
        for p in [
            Prefilter::gaussian(2.0).unwrap(),
            Prefilter::bspline(2).unwrap(),
            Prefilter::bspline(3).unwrap(),
        ] {
            for &lambda in &[0.3, 0.45, 1.0] {
                for &xi in &[0.0, 0.9, 4.4] {
                    let (freq_route, rem) = periodized_sum_at(&p, lambda, xi, 1e-12);
                    let poisson = periodized_autocorr_poisson(&p, lambda, xi);
                    assert_abs_diff_eq!(freq_route, poisson, epsilon = rem + 1e-10);
                }
            }
        }
    }

    #[test]
    fn riesz_bounds_for_the_tiling_case() {
        // stay off the exact box edge, where the closed indicator overlaps
        let p = Prefilter::sinc(4.0).unwrap();
        let grid = FrequencyGrid::new(11.9, 501).unwrap();
        let (a, b) = riesz_bounds(&p, 0.25, &grid);
        assert_relative_eq!(a, 0.25, max_relative = 1e-12);
        assert_relative_eq!(b, 0.25, max_relative = 1e-12);
    }

    #[test]
    fn spline_lower_bound_collapses_towards_resonance() {
        let p = Prefilter::<f64>::bspline(2).unwrap();
        let mut last = f64::INFINITY;
        for &lambda in &[0.6, 0.55, 0.51, 0.501] {
            let a = riesz_lower_estimate(&p, lambda);
            assert!(a < last, "A estimate should fall towards lambda = 1/2");
            assert!(a > 0.0);
            last = a;
        }
        // resonance detection: the estimate 1e-3 away from 1/2 sits far
        // below the estimate 1e-1 away
        let near = riesz_lower_estimate(&p, 0.5 + 1e-3);
        let far = riesz_lower_estimate(&p, 0.5 + 1e-1);
        assert!(near < 0.1 * far, "near {near:e} vs far {far:e}");
    }

    #[test]
    fn single_precision_kernel_round_trip() {
        // smoke check: the whole machinery instantiates at f32, with
        // accuracy bottoming out around three to four digits
        let p = Prefilter::<f32>::gaussian(2.0).unwrap();
        let kernel = InterpKernel::new(&p, 0.5f32).unwrap();
        assert!((kernel.eval(0.0) - 1.0).abs() < 1e-3);
        assert!(kernel.eval(0.5).abs() < 1e-3);
        let (d, _) = periodized_sum_at(&p, 0.5f32, 0.0, 1e-5);
        assert!(d > 0.0 && d.is_finite());
    }

    #[test]
    fn gaussian_riesz_bounds_are_positive_finite() {
        let p = Prefilter::gaussian(2.0).unwrap();
        let big = 2.0 * PI / 0.25;
        let grid = FrequencyGrid::new(big / 2.0, 501).unwrap();
        let (a, b) = riesz_bounds(&p, 0.25, &grid);
        assert!(a > 0.0 && b >= a && b.is_finite());
    }

    #[test]
    fn dual_spectrum_of_the_tiling_case_scales_the_filter() {
        let p = Prefilter::sinc(4.0).unwrap();
        for &xi in &[0.0, 3.0, -11.0] {
            let d = dual_spectrum(&p, 0.25, xi, 1e-12).unwrap();
            let expect = p.eval_freq(xi) * 4.0;
            assert_abs_diff_eq!(d.re, expect.re, epsilon = 1e-13);
            assert_abs_diff_eq!(d.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn dual_spectrum_positive_for_gaussian() {
        let p = Prefilter::gaussian(2.0).unwrap();
        let v = dual_spectrum(&p, 0.5, 0.0, 1e-12).unwrap();
        assert!(v.re > 0.0 && v.im == 0.0);
    }

    #[test]
    fn dual_biorthogonality_by_quadrature() {
        // <phi_dual, phi(.-n lambda)> = integral phi_hat_dual conj(phi_hat) e^{i n lambda xi}
        // Tolerances reflect the quadrature route: the sinc integrand jumps at
        // the band edge, and the spline dual decays only algebraically.
        let cases: Vec<(Prefilter<f64>, f64, f64, f64, f64)> = vec![
            (Prefilter::gaussian(2.0).unwrap(), 0.5, 22.0, 0.005, 1e-8),
            (Prefilter::bspline(2).unwrap(), 0.6, 340.0, 0.01, 1e-3),
            (Prefilter::sinc(4.0).unwrap(), 0.25, 4.0 * PI, 0.005, 1e-3),
        ];
        for (p, lambda, half, dx, tol) in cases {
            let grid = FrequencyGrid::with_spacing(half, dx).unwrap();
            let weighted: Vec<num_complex::Complex64> = (0..grid.len())
                .map(|k| {
                    let xi = grid.point(k);
                    let dual = dual_spectrum(&p, lambda, xi, 1e-9).unwrap();
                    dual * p.eval_freq(xi).conj() * grid.simpson_weight(k)
                })
                .collect();
            for n in -5i32..=5 {
                let mut acc = num_complex::Complex64::new(0.0, 0.0);
                for (k, &w) in weighted.iter().enumerate() {
                    let phase =
                        num_complex::Complex64::from_polar(1.0, n as f64 * lambda * grid.point(k));
                    acc += w * phase;
                }
                let expect = if n == 0 { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(acc.re, expect, epsilon = tol);
                assert_abs_diff_eq!(acc.im, 0.0, epsilon = tol);
            }
        }
    }

    #[test]
    fn interp_spectrum_of_the_tiling_case_is_flat() {
        let p = Prefilter::sinc(4.0).unwrap();
        let expect = SQRT_2PI / (2.0 * PI / 0.25); // sqrt(2 pi) / Lambda
        for &xi in &[0.0, 5.0, -12.0] {
            let v = interp_spectrum(&p, 0.25, xi, 1e-12).unwrap();
            assert_relative_eq!(v, expect, max_relative = 1e-12);
        }
        assert_eq!(interp_spectrum(&p, 0.25, 13.0, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn interp_spectrum_telescopes_to_one() {
        for (p, lambda) in [
            (Prefilter::gaussian(2.0).unwrap(), 0.25),
            (Prefilter::bspline(3).unwrap(), 0.45),
            (Prefilter::sinc(4.0).unwrap(), 0.3),
        ] {
            let big = 2.0 * PI / lambda;
            for &xi in &[0.0, 0.7, 3.9] {
                let mut acc = 0.0;
                let n: i32 = 40;
                for k in -n..=n {
                    acc += interp_spectrum(&p, lambda, xi + big * k as f64, 1e-12).unwrap();
                }
                assert_relative_eq!(acc * big / SQRT_2PI, 1.0, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn gaussian_interp_spectrum_is_flat_near_zero() {
        let p = Prefilter::gaussian(2.0).unwrap();
        let lambda = 0.25;
        let expect = SQRT_2PI / (2.0 * PI / lambda);
        let v = interp_spectrum(&p, lambda, 0.0, 1e-12).unwrap();
        assert_relative_eq!(v, expect, max_relative = 1e-9);
        // decaying tails
        assert!(interp_spectrum(&p, lambda, 12.0, 1e-12).unwrap() < v);
    }

    #[test]
    fn near_resonant_interp_spectrum_stays_bounded() {
        // just off 1/4 the denominator dips below the floor but the ratio
        // must stay under its telescoping cap
        let p = Prefilter::<f64>::bspline(3).unwrap();
        let lambda = 0.2501;
        let cap = SQRT_2PI / (2.0 * PI / lambda);
        for &xi in &[4.0 * PI, 4.0 * PI + 0.01, 2.0 * PI] {
            let v = interp_spectrum(&p, lambda, xi, 1e-12).unwrap();
            assert!((0.0..=cap * (1.0 + 1e-9)).contains(&v));
        }
    }

    #[test]
    fn aliasing_zero_for_disjoint_boxes_and_bounded_everywhere() {
        let p = Prefilter::sinc(4.0).unwrap();
        for &xi in &[0.0, 6.0, -12.0] {
            assert_eq!(aliasing_ratio(&p, 0.25, xi, 1e-12).unwrap(), 0.0);
        }
        let g = Prefilter::gaussian(2.0).unwrap();
        for k in 0..100 {
            let xi = -12.0 + 0.24 * k as f64;
            let e = aliasing_ratio(&g, 0.4, xi, 1e-12).unwrap();
            assert!((0.0..=1.0).contains(&e));
        }
    }

    #[test]
    fn gaussian_aliasing_grows_with_frequency() {
        let p = Prefilter::gaussian(2.0).unwrap();
        let lambda = 0.4;
        let big = 2.0 * PI / lambda;
        let mut last = -1.0;
        for k in 0..=60 {
            let xi = big / 2.0 * k as f64 / 60.0;
            let e = aliasing_ratio(&p, lambda, xi, 1e-13).unwrap();
            // direct-summation oracle with a fixed generous term count
            let mut num = 0.0;
            let mut den = p.autocorr_freq(xi);
            for n in 1..=40 {
                let t = p.autocorr_freq(xi + big * n as f64) + p.autocorr_freq(xi - big * n as f64);
                num += t;
                den += t;
            }
            assert_abs_diff_eq!(e, num / den, epsilon = 1e-10);
            assert!(e >= last - 1e-12, "E should be nondecreasing on [0, Lambda/2]");
            last = e;
        }
    }

    #[test]
    fn walter_pole_and_centered_contrast() {
        let nc = Prefilter::<f64>::bspline_noncentered(3).unwrap();
        match phi_int_v_spectrum(&nc, 1.0, PI) {
            Err(Error::PoleDetected { .. }) => {}
            other => panic!("expected pole, got {other:?}"),
        }
        // centered order-2 spline: denominator is exactly 1 at xi = pi
        let c2 = Prefilter::<f64>::bspline(2).unwrap();
        let v = phi_int_v_spectrum(&c2, 1.0, PI).unwrap();
        let expect = c2.eval_freq(PI);
        assert_abs_diff_eq!(v.re, expect.re, epsilon = 1e-14);
        // centered order-3 spline: denominator = 1/2 at xi = pi
        let c3 = Prefilter::<f64>::bspline(3).unwrap();
        let den = v_space_denominator(&c3, 1.0, PI);
        assert_abs_diff_eq!(den.re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(den.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn noncentered_periodization_positive_where_signed_sum_vanishes() {
        let nc = Prefilter::<f64>::bspline_noncentered(3).unwrap();
        let (d, _) = periodized_sum_at(&nc, 1.0, PI, 1e-12);
        assert!(d > 0.05);
        assert!(v_space_denominator(&nc, 1.0, PI).norm() < 1e-14);
    }

    #[test]
    fn sinc_v_denominator_is_unity_at_nyquist() {
        let p = Prefilter::sinc(4.0).unwrap();
        let den = v_space_denominator(&p, 0.25, 1.0);
        assert_relative_eq!(den.re, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn walter_partial_sums_decay() {
        let (s10, _) = walter_denominator::<f64>(3, 10).unwrap();
        let (s100, _) = walter_denominator::<f64>(3, 100).unwrap();
        let (s1e4, r1e4) = walter_denominator::<f64>(3, 10_000).unwrap();
        assert!(s100.abs() < s10.abs());
        assert!(s1e4.abs() < 1e-6);
        assert!(r1e4 > s1e4.abs());
        // exact pairwise collapse: sum = ((N + 1/2) pi)^{-m}
        let expect = ((10_000.5) * PI).powi(-3);
        assert_relative_eq!(s1e4, expect, max_relative = 1e-6);
        // faster decay at higher order
        let (s5, _) = walter_denominator::<f64>(5, 100).unwrap();
        assert!(s5.abs() < s100.abs());
        assert!(walter_denominator::<f64>(4, 10).is_err());
        assert!(walter_denominator::<f64>(1, 10).is_err());
    }

    #[test]
    fn limit_spectrum_telescopes_and_peaks_correctly() {
        let p = Prefilter::<f64>::bspline(3).unwrap();
        let ell = 4u32;
        let v0 = interp_spectrum_limit(&p, ell, 0.0).unwrap();
        assert_relative_eq!(v0, 1.0 / (4.0 * SQRT_2PI), max_relative = 1e-12);
        let big = 2.0 * PI * ell as f64;
        for &xi in &[0.3, 2.0, 7.7] {
            let mut acc = 0.0;
            for n in -30i32..=30 {
                acc += interp_spectrum_limit(&p, ell, xi + big * n as f64).unwrap();
            }
            assert_relative_eq!(acc * big / SQRT_2PI, 1.0, max_relative = 1e-8);
        }
        assert!(interp_spectrum_limit(&Prefilter::gaussian(2.0).unwrap(), 4, 0.0).is_err());
    }

    #[test]
    fn interp_time_interpolates_for_gaussian() {
        let p = Prefilter::gaussian(2.0).unwrap();
        let lambda = 0.5;
        let grid = kernel_grid(&p, lambda, 1e-8, 0.01).unwrap();
        let xs: Vec<f64> = (-5..=5).map(|n| n as f64 * lambda).collect();
        let vals = interp_time(&p, lambda, &grid, &xs, 1e-10).unwrap();
        for (n, &v) in (-5i32..=5).zip(vals.iter()) {
            let expect = if n == 0 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(v, expect, epsilon = 1e-7);
        }
    }

    #[test]
    fn interp_time_matches_the_closed_form_for_sinc_at_nyquist() {
        // The grid route samples the boxed spectrum, whose edge points carry
        // the overlap value; that one-point artifact limits the quadrature to
        // O(dx * jump). The band kernel below is the exact evaluator.
        let p = Prefilter::sinc(4.0).unwrap();
        let grid = kernel_grid(&p, 0.25, 1e-8, 0.002).unwrap();
        let xs = [0.0, 0.1, 0.37, 1.2, 4.9];
        let vals = interp_time(&p, 0.25, &grid, &xs, 1e-12).unwrap();
        for (&x, &v) in xs.iter().zip(vals.iter()) {
            assert_abs_diff_eq!(v, sinc(4.0 * PI * x), epsilon = 1e-4);
        }
        let kernel = InterpKernel::new(&p, 0.25).unwrap();
        for &x in &xs {
            assert_abs_diff_eq!(kernel.eval(x), sinc(4.0 * PI * x), epsilon = 1e-13);
        }
    }

    #[test]
    fn kernels_agree_with_quadrature_route() {
        // per-family tolerance: the quadrature route is exact only up to its
        // grid (box edges for sinc, algebraic tails for splines)
        let cases: Vec<(Prefilter<f64>, f64, f64, f64, f64)> = vec![
            (Prefilter::sinc(4.0).unwrap(), 0.3, 2e-3, 1e-7, 0.005),
            (Prefilter::gaussian(2.0).unwrap(), 0.25, 1e-7, 1e-8, 0.005),
            (Prefilter::bspline(2).unwrap(), 0.45, 1e-4, 3e-6, 0.01),
        ];
        for (p, lambda, eps, tail, dx) in cases {
            let kernel = InterpKernel::new(&p, lambda).unwrap();
            let grid = kernel_grid(&p, lambda, tail, dx).unwrap();
            let xs = [0.0, 0.21, 1.3, 2.9];
            let quad = interp_time(&p, lambda, &grid, &xs, 1e-8).unwrap();
            for (&x, &q) in xs.iter().zip(quad.iter()) {
                assert_abs_diff_eq!(kernel.eval(x), q, epsilon = eps);
            }
        }
    }

    #[test]
    fn kernel_interpolation_property() {
        let cases: Vec<(Prefilter<f64>, f64)> = vec![
            (Prefilter::sinc(4.0).unwrap(), 0.25),
            (Prefilter::gaussian(2.0).unwrap(), 0.5),
            (Prefilter::bspline(3).unwrap(), 0.3),
            (Prefilter::bspline_noncentered(2).unwrap(), 0.45),
        ];
        for (p, lambda) in cases {
            let kernel = InterpKernel::new(&p, lambda).unwrap();
            for n in -20i32..=20 {
                let expect = if n == 0 { 1.0 } else { 0.0 };
                let v = kernel.eval(n as f64 * lambda);
                assert_abs_diff_eq!(v, expect, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn kernel_hat_telescopes() {
        let p = Prefilter::gaussian(2.0).unwrap();
        let lambda = 0.25;
        let kernel = InterpKernel::new(&p, lambda).unwrap();
        let big = 2.0 * PI / lambda;
        for &xi in &[0.0, 1.1, 6.0] {
            let mut acc = 0.0;
            for n in -20i32..=20 {
                acc += kernel.eval_hat(xi + big * n as f64);
            }
            assert_relative_eq!(acc * big / SQRT_2PI, 1.0, max_relative = 1e-9);
        }
        // and the frequency form matches the pointwise ratio
        for &xi in &[0.0, 0.7, 3.0] {
            let direct = interp_spectrum(&p, lambda, xi, 1e-12).unwrap();
            assert_relative_eq!(kernel.eval_hat(xi), direct, max_relative = 1e-9);
        }
    }

    #[test]
    fn limit_kernel_interpolates_on_the_coarse_lattice() {
        let p = Prefilter::<f64>::bspline(3).unwrap();
        let kernel = InterpKernel::limit(&p, 4).unwrap();
        assert_relative_eq!(kernel.lambda(), 0.25, max_relative = 1e-15);
        for n in -20i32..=20 {
            let expect = if n == 0 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(kernel.eval(n as f64 / 4.0), expect, epsilon = 1e-9);
        }
        // frequency form agrees with the dilated closed form
        for &xi in &[0.0, 0.9, 5.5] {
            let direct = interp_spectrum_limit(&p, 4, xi).unwrap();
            assert_relative_eq!(kernel.eval_hat(xi), direct, max_relative = 1e-9);
        }
    }

    #[test]
    fn inadmissible_lambda_is_rejected() {
        let p = Prefilter::sinc(4.0).unwrap();
        assert!(matches!(
            InterpKernel::new(&p, 0.2),
            Err(Error::ResonantInterval { .. })
        ));
        let b = Prefilter::<f64>::bspline(2).unwrap();
        assert!(matches!(
            interp_spectrum(&b, 0.5, 0.3, 1e-10),
            Err(Error::ResonantInterval { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn aliasing_ratio_always_in_unit_interval(
            lambda in 0.4f64..0.9,
            xi in -12.0f64..12.0,
        ) {
            // lambda range keeps the periodized spectrum above the Riesz
            // floor everywhere on the xi range
            let p = Prefilter::gaussian(2.0).unwrap();
            let e = aliasing_ratio(&p, lambda, xi, 1e-10).unwrap();
            prop_assert!((0.0..=1.0).contains(&e));
        }

        #[test]
        fn periodization_positive_for_gaussian(
            lambda in 0.1f64..1.5,
            xi in -40.0f64..40.0,
        ) {
            let p = Prefilter::gaussian(2.0).unwrap();
            let (d, rem) = periodized_sum_at(&p, lambda, xi, 1e-10);
            prop_assert!(d > 0.0);
            prop_assert!(rem <= 1e-10 * 1.0001 + 1e-30);
        }
    }
}
