//! Generalized sampling for frequency-localized signals.
//!
//! A finite-energy signal is localized by crosscorrelation with a prefilter
//! (sinc, Gaussian, or B-spline), sampled on a regular lattice, and rebuilt
//! by the series over the interpolating function of the associated
//! shift-invariant structure. The crate provides the prefilter families with
//! their spectral moments, the periodized-spectrum machinery (Riesz bounds,
//! dual and interpolating spectra, aliasing ratios, resonance limits), the
//! sampling/reconstruction pipeline with an independent projection oracle,
//! and the analytic error bounds with their critical sampling intervals.
//!
//! Everything is generic over the floating scalar ([`scalar::Scalar`]);
//! double-precision aliases are exported at the crate root.
//!
//! Module map:
//! * [`prefilter`] - filter families, weights, moments, soft bandwidth
//! * [`spectrum`] - periodization, Riesz bounds, interpolating kernels
//! * [`sampling`] - signals, the prefilter operator, sampling, series
//!   reconstruction, projection oracle, norms
//! * [`bounds`] - Chebyshev inequality, error bounds, critical intervals
//! * [`pipeline`] - end-to-end reconstruction experiments
//! * [`special`], [`quad`] - zeta evaluation and quadrature primitives

pub mod bounds;
pub mod error;
pub mod pipeline;
pub mod prefilter;
pub mod quad;
pub mod sampling;
pub mod scalar;
pub mod special;
pub mod spectrum;

pub use bounds::{BoundReport, CriticalMode};
pub use error::{Error, Result};
pub use pipeline::{ReconstructionOutcome, ReconstructionPlan, Window};
pub use prefilter::{Prefilter, Weight};
pub use sampling::{SampleSet, Signal, Spectrum, TestSignal};
pub use scalar::Scalar;
pub use special::zeta;
pub use spectrum::{FrequencyGrid, InterpKernel, KernelPolicy, PeriodizedSpectrum};

/// Double-precision prefilter selector.
pub type Prefilter64 = Prefilter<f64>;
/// Double-precision weight selector.
pub type Weight64 = Weight<f64>;
/// Double-precision frequency grid.
pub type FrequencyGrid64 = FrequencyGrid<f64>;
/// Double-precision interpolation kernel.
pub type InterpKernel64 = InterpKernel<f64>;
/// Double-precision signal spectrum.
pub type Spectrum64 = Spectrum<f64>;
/// Double-precision bound report.
pub type BoundReport64 = BoundReport<f64>;
