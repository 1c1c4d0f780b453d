//! Cyclostationarity-based spectrum sensing.
//!
//! Communication waveforms have statistics that repeat with the symbol clock,
//! guard intervals and coding structure. This crate detects such signals in
//! noise by estimating (conjugate) cyclic autocorrelations at a set of lags,
//! forming a GLRT statistic per cyclic frequency, and combining statistics
//! across frequencies and across cooperating sensors:
//!
//! * [`signal`] — cyclic-prefix OFDM test-signal generation, AWGN channels and
//!   log-normal (dB-domain Gaussian) shadowing.
//! * [`estimation`] — cyclic autocorrelation and cyclic periodogram
//!   estimators, frequency-smoothed cyclic spectra and the covariance of the
//!   stacked feature vector.
//! * [`detect`] — the single-frequency quadratic-form statistic, the
//!   max/sum multicycle statistics and threshold decisions.
//! * [`dist`] — closed-form chi-square CDF/quantile for even degrees of
//!   freedom and the distribution of the maximum of several chi-squares.
//! * [`fusion`] — combining (optionally quantized) statistics from several
//!   sensors, plus a binary voting rule.
//! * [`window`] — spectral smoothing windows (Kaiser).
//!
//! All numeric code is generic over the floating-point type via [`Scalar`];
//! `f64` aliases for the main data types live at the crate root.

pub mod detect;
pub mod dist;
pub mod estimation;
pub mod fusion;
pub mod signal;
pub mod window;

mod fft;
mod num;

pub use num::Scalar;

/// Errors surfaced by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Invalid static configuration (constellation order, window length, ...).
    #[error("invalid configuration: {0}")]
    Config(String),
    /// Arguments outside an operation's domain (lag out of range, shape
    /// mismatch, non-finite input, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical procedure could not produce a finite result.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// `f64` specializations of the main data types.
pub type Series64 = signal::ComplexSeries<f64>;
pub type FeatureVector64 = estimation::CyclicFeatureVector<f64>;
pub type Covariance64 = estimation::FeatureCovariance<f64>;
pub type Statistic64 = detect::CyclicStatistic<f64>;

/// `f32` specializations, for callers trading precision for footprint.
pub type Series32 = signal::ComplexSeries<f32>;
pub type Statistic32 = detect::CyclicStatistic<f32>;
