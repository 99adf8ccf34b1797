//! Reconstruction-error bounds: the generalized Chebyshev inequality, the
//! odd-index weight series, the general squared-error estimate
//! `8 M_w(phi) sum_{n>=1} 1/w((2n-1) pi / lambda)` per unit localized norm,
//! its monomial (zeta) specialization, and critical sampling intervals.

use crate::error::{Error, Result};
use crate::prefilter::{Prefilter, Weight};
use crate::quad::integrate_to_infinity;
use crate::scalar::{fl, Scalar};
use crate::special::{odd_power_sum, zeta};

/// Relative truncation target for the odd-index series.
pub const SERIES_TOL: f64 = 1e-12;

/// Everything that goes into (and comes out of) one bound evaluation.
#[derive(Debug, Clone)]
pub struct BoundReport<T> {
    pub prefilter: Prefilter<T>,
    pub weight: Weight<T>,
    pub lambda: T,
    /// Generalized moment `M_w(phi)`.
    pub m_w: T,
    /// Value of `sum_{n>=1} 1/w((2n-1) pi / lambda)`.
    pub series_value: T,
    /// Squared-error bound per unit localized norm: `8 M_w * series_value`.
    pub bound_sq: T,
    /// Critical sampling interval associated with this prefilter/weight pair.
    pub critical_lambda: T,
    pub terms_used: usize,
    /// Certified remainder of the series truncation.
    pub remainder: T,
}

/// Result of an odd-index series evaluation.
#[derive(Debug, Clone, Copy)]
pub struct SeriesResult<T> {
    pub value: T,
    pub terms_used: usize,
    pub remainder: T,
}

/// Tail mass of a density versus its generalized Chebyshev bound `M / w(t)`:
/// returns `(tail, bound)` with the tail integrated by adaptive quadrature.
/// The density need not be normalized.
pub fn chebyshev_tail<T: Scalar, F: Fn(T) -> T>(
    density: F,
    w: &Weight<T>,
    m_value: T,
    t: T,
) -> (T, T) {
    let tol = fl::<T>(1e-12);
    let right = integrate_to_infinity(&|x| density(x), t, t.max(T::one()), tol, tol);
    let left = integrate_to_infinity(&|x: T| density(-x), t, t.max(T::one()), tol, tol);
    (left + right, m_value / w.eval(t))
}

/// The series `sum_{n>=1} 1/w((2n-1) pi / lambda)` with a certified
/// truncation remainder below `tol` (relative).
///
/// Monomial-type weights use Euler-Maclaurin completion; the exponential
/// weight terminates by geometric domination.
pub fn odd_series<T: Scalar>(w: &Weight<T>, lambda: T, tol: T) -> Result<SeriesResult<T>> {
    w.validate()?;
    if lambda.is_nan() || lambda <= T::zero() {
        return Err(Error::invalid("sampling interval must be positive"));
    }
    match *w {
        Weight::Monomial { s } => {
            // (lambda/pi)^s sum (2n-1)^{-s}
            let (base, terms, rem) = odd_power_sum(s);
            let scale = (lambda / T::PI()).powf(s);
            Ok(SeriesResult {
                value: scale * base,
                terms_used: terms,
                remainder: scale * rem,
            })
        }
        Weight::SincScaled { s, beta } => {
            // 1/w((2n-1) pi/lambda) = ((beta lambda)^{s-1} / s) (2n-1)^{-(s-1)}
            let (base, terms, rem) = odd_power_sum(s - T::one());
            let scale = (beta * lambda).powf(s - T::one()) / s;
            Ok(SeriesResult {
                value: scale * base,
                terms_used: terms,
                remainder: scale * rem,
            })
        }
        Weight::GaussExp { a } => {
            let ratio_exp = a * (T::PI() / lambda) * (T::PI() / lambda);
            // term_n = exp(-a ((2n-1) pi / lambda)^2)
            let term = |n: u32| -> T {
                let u = fl::<T>((2 * n - 1) as f64) * T::PI() / lambda;
                (-a * u * u).exp()
            };
            let mut acc = T::zero();
            let mut n = 1u32;
            while n <= 1_000_000 {
                let t_n = term(n);
                acc = acc + t_n;
                // successive ratio exp(-8 a n (pi/lambda)^2) is decreasing
                let ratio = (-fl::<T>(8.0) * fl::<T>(n as f64) * ratio_exp).exp();
                let rem = t_n * ratio / (T::one() - ratio).max(fl(1e-300));
                if rem <= tol * acc.max(fl(1e-300)) || t_n == T::zero() {
                    return Ok(SeriesResult {
                        value: acc,
                        terms_used: n as usize,
                        remainder: rem,
                    });
                }
                n += 1;
            }
            Err(Error::invalid("exponential weight series failed to converge"))
        }
    }
}

/// General squared-error bound per unit localized norm (right-hand side of
/// the sampling-theorem estimate): `bound_sq = 8 M_w(phi) * odd_series`.
///
/// The critical interval recorded alongside comes from the weight family:
/// `pi / mu_s` for monomial weights, `1/beta` for the Gaussian prefilter with
/// its exponential weight (and for the sinc prefilter with its band-scaled
/// weight, where it is the Nyquist interval), and the reciprocal soft
/// bandwidth otherwise.
pub fn general_bound<T: Scalar>(
    p: &Prefilter<T>,
    w: &Weight<T>,
    lambda: T,
) -> Result<BoundReport<T>> {
    if !p.is_admissible(lambda) {
        return Err(Error::ResonantInterval {
            lambda: lambda.to_f64().unwrap_or(f64::NAN),
            xi: f64::NAN,
            value: 0.0,
        });
    }
    bound_at(p, w, lambda)
}

/// Same as [`general_bound`] without the admissibility gate: the estimate
/// extends by continuity to the B-spline resonances, where reconstruction
/// uses the limit kernel.
pub fn bound_at<T: Scalar>(p: &Prefilter<T>, w: &Weight<T>, lambda: T) -> Result<BoundReport<T>> {
    let m_w = p.moment(w)?;
    let series = odd_series(w, lambda, fl(SERIES_TOL))?;
    let critical_lambda = match (p, w) {
        (_, Weight::Monomial { s }) => critical_interval(p, CriticalMode::Monomial { s: *s })?,
        (Prefilter::Gaussian { .. }, Weight::GaussExp { .. }) => {
            critical_interval(p, CriticalMode::Gaussian)?
        }
        (Prefilter::Sinc { beta }, Weight::SincScaled { .. }) => beta.recip(),
        _ => critical_interval(p, CriticalMode::Soft)?,
    };
    Ok(BoundReport {
        prefilter: *p,
        weight: *w,
        lambda,
        m_w,
        series_value: series.value,
        bound_sq: fl::<T>(8.0) * m_w * series.value,
        critical_lambda,
        terms_used: series.terms_used,
        remainder: series.remainder,
    })
}

/// Monomial-weight specialization of `bound_sq` via the zeta closed form:
/// `8 (1 - 2^{-s}) zeta(s) [mu_s lambda / pi]^s ||phi||^2` per unit
/// localized norm. Agrees with [`general_bound`] under the same weight.
pub fn monomial_bound<T: Scalar>(p: &Prefilter<T>, s: T, lambda: T) -> Result<T> {
    let mu = p.mu_s(s)?;
    let z = zeta(s);
    let factor = T::one() - fl::<T>(2.0).powf(-s);
    Ok(fl::<T>(8.0) * factor * z * (mu * lambda / T::PI()).powf(s) * p.norm_sq())
}

/// Which notion of critical sampling interval to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriticalMode<T> {
    /// `pi / mu_s(phi)`: the interval below which the monomial bound decays
    /// at order `s`.
    Monomial { s: T },
    /// `1/beta` for the Gaussian prefilter (its own decay threshold).
    Gaussian,
    /// Reciprocal soft bandwidth `1 / sigma(phi)`.
    Soft,
}

/// Critical sampling interval for the given mode.
pub fn critical_interval<T: Scalar>(p: &Prefilter<T>, mode: CriticalMode<T>) -> Result<T> {
    match mode {
        CriticalMode::Monomial { s } => Ok(T::PI() / p.mu_s(s)?),
        CriticalMode::Gaussian => match *p {
            Prefilter::Gaussian { beta } => Ok(beta.recip()),
            ref other => Err(Error::WrongFamily {
                expected: "gaussian".into(),
                found: other.family_name().into(),
            }),
        },
        CriticalMode::Soft => Ok(p.soft_bandwidth()?.recip()),
    }
}
