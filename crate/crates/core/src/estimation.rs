//! Cyclic autocorrelation estimation and the covariance of the stacked
//! feature vector.
//!
//! For a record `x(0..M)` the (conjugate) cyclic autocorrelation estimate at
//! cyclic frequency `α` (cycles/sample) and lag `τ` is
//!
//! ```text
//! R̂(α, τ) = (1/M) Σ_t x(t) x^{(*)}(t+τ) e^{-j2παt}
//! ```
//!
//! with out-of-range lag products treated as zero. Stacking real and
//! imaginary parts over a lag set gives the feature vector; its asymptotic
//! covariance is assembled from two frequency-smoothed cyclic spectra of the
//! lag-product sequences.
//!
//! [`cyclic_autocorrelation`] and [`cyclic_periodogram_transform`] are direct
//! summations and serve as the reference route. [`LagProducts`] evaluates the
//! same transforms through FFTs of the lag-product sequences — bin lookups
//! when the requested frequency lands on the DFT grid, a modulated FFT
//! otherwise — and is what the Monte Carlo pipelines use.

use num_complex::Complex;

use crate::signal::ComplexSeries;
use crate::{fft, window, Error, Result, Scalar};

/// Frequencies are treated as DFT-bin-aligned when `α·M` is within this
/// distance of an integer.
const BIN_SNAP: f64 = 1e-9;

/// Ordered set of distinct lags, plus whether the second factor of the lag
/// product is conjugated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LagSet {
    lags: Vec<i64>,
    conjugate: bool,
}

impl LagSet {
    pub fn new(lags: Vec<i64>, conjugate: bool) -> Result<Self> {
        if lags.is_empty() {
            return Err(Error::Config("lag set must be nonempty".into()));
        }
        for (i, a) in lags.iter().enumerate() {
            if lags[..i].contains(a) {
                return Err(Error::Config(format!("duplicate lag {a}")));
            }
        }
        Ok(Self { lags, conjugate })
    }

    pub fn lags(&self) -> &[i64] {
        &self.lags
    }

    pub fn conjugate(&self) -> bool {
        self.conjugate
    }

    /// Number of lags `N`.
    pub fn len(&self) -> usize {
        self.lags.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees at least one lag
    }
}

/// Ordered set of distinct nonzero cyclic frequencies, in cycles/sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicFrequencySet<T> {
    frequencies: Vec<T>,
}

impl<T: Scalar> CyclicFrequencySet<T> {
    pub fn new(frequencies: Vec<T>) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(Error::Config("frequency set must be nonempty".into()));
        }
        for (i, f) in frequencies.iter().enumerate() {
            if !f.is_finite() || *f == T::zero() {
                return Err(Error::Config(format!(
                    "cyclic frequency must be finite and nonzero, got {f}"
                )));
            }
            if frequencies[..i].contains(f) {
                return Err(Error::Config(format!("duplicate cyclic frequency {f}")));
            }
        }
        Ok(Self { frequencies })
    }

    pub fn frequencies(&self) -> &[T] {
        &self.frequencies
    }

    /// Number of frequencies `N_α`.
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Odd-length spectral smoothing window, normalized so its coefficients sum
/// to the window length.
#[derive(Debug, Clone, PartialEq)]
pub struct SmootherSpec<T> {
    window: Vec<T>,
}

impl<T: Scalar> SmootherSpec<T> {
    pub fn new(window: Vec<T>) -> Result<Self> {
        if window.len().is_multiple_of(2) {
            return Err(Error::Config(format!(
                "smoothing window length must be odd, got {}",
                window.len()
            )));
        }
        let sum = window.iter().fold(T::zero(), |a, &w| a + w);
        if sum <= T::zero() || window.iter().any(|w| !w.is_finite() || *w < T::zero()) {
            return Err(Error::Config(
                "smoothing window must be nonnegative with positive sum".into(),
            ));
        }
        let scale = T::from_count(window.len()) / sum;
        Ok(Self {
            window: window.into_iter().map(|w| w * scale).collect(),
        })
    }

    /// Kaiser window normalized for smoothing.
    pub fn kaiser(len: usize, beta: T) -> Result<Self> {
        Self::new(window::kaiser(len, beta)?)
    }

    /// All-ones window (no shaping, pure averaging).
    pub fn rectangular(len: usize) -> Result<Self> {
        Self::new(vec![T::one(); len])
    }

    pub fn window(&self) -> &[T] {
        &self.window
    }

    /// Window length `L` (odd).
    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Half-width `(L-1)/2`.
    pub fn half_width(&self) -> usize {
        (self.window.len() - 1) / 2
    }
}

/// Real and imaginary parts of the cyclic autocorrelation estimates at one
/// cyclic frequency, stacked as `[Re τ_1..τ_N, Im τ_1..τ_N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicFeatureVector<T> {
    alpha: T,
    values: Vec<T>,
    sample_count: usize,
    lag_set: LagSet,
}

impl<T: Scalar> CyclicFeatureVector<T> {
    /// Builds a feature vector from externally computed parts; `values` must
    /// hold the `N` real parts followed by the `N` imaginary parts.
    pub fn from_parts(
        alpha: T,
        values: Vec<T>,
        sample_count: usize,
        lag_set: LagSet,
    ) -> Result<Self> {
        if values.len() != 2 * lag_set.len() {
            return Err(Error::Domain(format!(
                "expected {} stacked values for {} lags, got {}",
                2 * lag_set.len(),
                lag_set.len(),
                values.len()
            )));
        }
        if sample_count == 0 {
            return Err(Error::Domain("sample count must be >= 1".into()));
        }
        Ok(Self {
            alpha,
            values,
            sample_count,
            lag_set,
        })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// The stacked `1 × 2N` vector.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Record length `M` behind the estimates.
    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn lag_set(&self) -> &LagSet {
        &self.lag_set
    }

    pub fn num_lags(&self) -> usize {
        self.lag_set.len()
    }

    /// Rebuilds the complex estimates `R̂(α, τ_n)` from the stacked parts.
    pub fn complex_estimates(&self) -> Vec<Complex<T>> {
        let n = self.num_lags();
        (0..n)
            .map(|i| Complex::new(self.values[i], self.values[n + i]))
            .collect()
    }
}

/// The pair of smoothed cyclic spectra `(Q, Q*)` of the lag-product
/// sequences, each `N × N`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedSpectra<T> {
    dim: usize,
    q: Vec<Complex<T>>,
    q_star: Vec<Complex<T>>,
}

impl<T: Scalar> SmoothedSpectra<T> {
    pub fn new(dim: usize, q: Vec<Complex<T>>, q_star: Vec<Complex<T>>) -> Result<Self> {
        if q.len() != dim * dim || q_star.len() != dim * dim {
            return Err(Error::Domain(format!(
                "spectra matrices must be {dim}×{dim}, got {} and {} entries",
                q.len(),
                q_star.len()
            )));
        }
        Ok(Self { dim, q, q_star })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn q(&self, m: usize, n: usize) -> Complex<T> {
        self.q[m * self.dim + n]
    }

    pub fn q_star(&self, m: usize, n: usize) -> Complex<T> {
        self.q_star[m * self.dim + n]
    }
}

/// The `2N × 2N` covariance matrix of a stacked feature vector together with
/// the `(Q, Q*)` spectra it was assembled from.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureCovariance<T> {
    dim: usize,
    sigma: Vec<T>,
    spectra: SmoothedSpectra<T>,
}

impl<T: Scalar> FeatureCovariance<T> {
    /// Matrix dimension `2N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major `2N × 2N` matrix.
    pub fn sigma(&self) -> &[T] {
        &self.sigma
    }

    pub fn sigma_at(&self, row: usize, col: usize) -> T {
        self.sigma[row * self.dim + col]
    }

    pub fn spectra(&self) -> &SmoothedSpectra<T> {
        &self.spectra
    }
}

fn check_lag(m: usize, tau: i64) -> Result<()> {
    if tau.unsigned_abs() as usize >= m {
        return Err(Error::Domain(format!(
            "lag {tau} out of range for {m} samples"
        )));
    }
    Ok(())
}

/// Range of `t` for which both `x(t)` and `x(t+τ)` exist.
fn valid_range(m: usize, tau: i64) -> (usize, usize) {
    if tau >= 0 {
        (0, m - tau as usize)
    } else {
        ((-tau) as usize, m)
    }
}

fn lag_factor<T: Scalar>(z: Complex<T>, conjugate: bool) -> Complex<T> {
    if conjugate {
        z.conj()
    } else {
        z
    }
}

/// Direct-summation cyclic autocorrelation estimate `R̂(α, τ)`.
pub fn cyclic_autocorrelation<T: Scalar>(
    x: &ComplexSeries<T>,
    alpha: T,
    tau: i64,
    conjugate: bool,
) -> Result<Complex<T>> {
    let m = x.len();
    check_lag(m, tau)?;
    let s = x.samples();
    let (lo, hi) = valid_range(m, tau);
    let mut acc = Complex::new(T::zero(), T::zero());
    for t in lo..hi {
        let shifted = (t as i64 + tau) as usize;
        let product = s[t] * lag_factor(s[shifted], conjugate);
        let phase = -T::lit(2.0) * T::PI() * alpha * T::from_count(t);
        acc += product * Complex::from_polar(T::one(), phase);
    }
    Ok(acc.unscale(T::from_count(m)))
}

/// Direct-summation cyclic periodogram transform
/// `F_τ(ω) = Σ_t x(t) x^{(*)}(t+τ) e^{-jωt}` (unnormalized), `ω` in
/// radians/sample.
pub fn cyclic_periodogram_transform<T: Scalar>(
    x: &ComplexSeries<T>,
    tau: i64,
    omega: T,
    conjugate: bool,
) -> Result<Complex<T>> {
    let m = x.len();
    check_lag(m, tau)?;
    let s = x.samples();
    let (lo, hi) = valid_range(m, tau);
    let mut acc = Complex::new(T::zero(), T::zero());
    for t in lo..hi {
        let shifted = (t as i64 + tau) as usize;
        let product = s[t] * lag_factor(s[shifted], conjugate);
        acc += product * Complex::from_polar(T::one(), -omega * T::from_count(t));
    }
    Ok(acc)
}

/// Stacks the real and imaginary parts of the direct estimates over a lag
/// set into the `1 × 2N` feature vector.
pub fn feature_vector<T: Scalar>(
    x: &ComplexSeries<T>,
    alpha: T,
    lag_set: &LagSet,
) -> Result<CyclicFeatureVector<T>> {
    let estimates: Vec<Complex<T>> = lag_set
        .lags()
        .iter()
        .map(|&tau| cyclic_autocorrelation(x, alpha, tau, lag_set.conjugate()))
        .collect::<Result<_>>()?;
    Ok(assemble_feature_vector(alpha, x.len(), lag_set, &estimates))
}

fn assemble_feature_vector<T: Scalar>(
    alpha: T,
    sample_count: usize,
    lag_set: &LagSet,
    estimates: &[Complex<T>],
) -> CyclicFeatureVector<T> {
    let n = lag_set.len();
    let mut values = Vec::with_capacity(2 * n);
    values.extend(estimates.iter().map(|e| e.re));
    values.extend(estimates.iter().map(|e| e.im));
    CyclicFeatureVector {
        alpha,
        values,
        sample_count,
        lag_set: lag_set.clone(),
    }
}

/// Lag-product sequences `f(t, τ) = x(t)·x^{(*)}(t+τ)` for a lag set,
/// together with their unnormalized DFTs.
///
/// Transform values at DFT-bin frequencies come from a single FFT per lag;
/// off-grid frequencies fall back to exact evaluation (a modulated FFT for
/// whole smoothing grids, a direct dot product for single frequencies), so
/// results agree with the direct-summation route at floating-point accuracy.
#[derive(Debug, Clone)]
pub struct LagProducts<T> {
    sample_count: usize,
    lag_set: LagSet,
    products: Vec<Vec<Complex<T>>>,
    spectra: Vec<Vec<Complex<T>>>,
}

impl<T: Scalar> LagProducts<T> {
    pub fn compute(x: &ComplexSeries<T>, lag_set: &LagSet) -> Result<Self> {
        let m = x.len();
        let s = x.samples();
        let zero = Complex::new(T::zero(), T::zero());
        let mut products = Vec::with_capacity(lag_set.len());
        let mut spectra = Vec::with_capacity(lag_set.len());
        for &tau in lag_set.lags() {
            check_lag(m, tau)?;
            let (lo, hi) = valid_range(m, tau);
            let mut f = vec![zero; m];
            for t in lo..hi {
                let shifted = (t as i64 + tau) as usize;
                f[t] = s[t] * lag_factor(s[shifted], lag_set.conjugate());
            }
            let mut spectrum = f.clone();
            fft::forward(&mut spectrum);
            products.push(f);
            spectra.push(spectrum);
        }
        Ok(Self {
            sample_count: m,
            lag_set: lag_set.clone(),
            products,
            spectra,
        })
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn lag_set(&self) -> &LagSet {
        &self.lag_set
    }

    /// `F_τ` at all DFT bin frequencies `2πk/M`, `k = 0..M`.
    pub fn spectrum(&self, lag_index: usize) -> &[Complex<T>] {
        &self.spectra[lag_index]
    }

    fn bin_of(&self, cycles_per_sample: T) -> Option<usize> {
        let m = self.sample_count;
        let pos = cycles_per_sample * T::from_count(m);
        let rounded = pos.round();
        if (pos - rounded).abs() <= T::lit(BIN_SNAP) {
            let k = rounded.to_f64().expect("bin index representable") as i64;
            Some(k.rem_euclid(m as i64) as usize)
        } else {
            None
        }
    }

    /// `F_τ(ω)`, `ω` in radians/sample.
    pub fn transform_at(&self, lag_index: usize, omega: T) -> Complex<T> {
        let alpha = omega / (T::lit(2.0) * T::PI());
        if let Some(bin) = self.bin_of(alpha) {
            return self.spectra[lag_index][bin];
        }
        self.products[lag_index]
            .iter()
            .enumerate()
            .fold(Complex::new(T::zero(), T::zero()), |acc, (t, f)| {
                acc + f * Complex::from_polar(T::one(), -omega * T::from_count(t))
            })
    }

    /// `R̂(α, τ)` for the lag at `lag_index`.
    pub fn autocorrelation(&self, lag_index: usize, alpha: T) -> Complex<T> {
        let omega = T::lit(2.0) * T::PI() * alpha;
        self.transform_at(lag_index, omega)
            .unscale(T::from_count(self.sample_count))
    }

    /// Feature vector at `alpha` over this lag set.
    pub fn feature_vector(&self, alpha: T) -> CyclicFeatureVector<T> {
        let estimates: Vec<Complex<T>> = (0..self.lag_set.len())
            .map(|i| self.autocorrelation(i, alpha))
            .collect();
        assemble_feature_vector(alpha, self.sample_count, &self.lag_set, &estimates)
    }

    /// `F_τ(2π(α + u/M))` for `u = -half..=half`, one vector per lag.
    fn smoothing_grid(&self, alpha: T, half: usize) -> Vec<Vec<Complex<T>>> {
        let m = self.sample_count as i64;
        let offset_bin = |center: i64, u: i64| ((center + u).rem_euclid(m)) as usize;
        if let Some(bin) = self.bin_of(alpha) {
            let center = bin as i64;
            return self
                .spectra
                .iter()
                .map(|spec| {
                    (-(half as i64)..=half as i64)
                        .map(|u| spec[offset_bin(center, u)])
                        .collect()
                })
                .collect();
        }
        // Off-grid center: shift the products to baseband with e^{-j2παt};
        // the offsets u/M then land exactly on DFT bins.
        self.products
            .iter()
            .map(|f| {
                let mut g: Vec<Complex<T>> = f
                    .iter()
                    .enumerate()
                    .map(|(t, v)| {
                        let phase = -T::lit(2.0) * T::PI() * alpha * T::from_count(t);
                        v * Complex::from_polar(T::one(), phase)
                    })
                    .collect();
                fft::forward(&mut g);
                (-(half as i64)..=half as i64)
                    .map(|u| g[offset_bin(0, u)])
                    .collect()
            })
            .collect()
    }

    /// Frequency-smoothed cyclic spectra `(Q, Q*)` of the lag products at
    /// cyclic frequency `alpha`:
    ///
    /// ```text
    /// Q(m,n)  = (1/ML) Σ_s W(s) · F_{τ_n}(2πα - 2πs/M) · F_{τ_m}(2πα + 2πs/M)
    /// Q*(m,n) = (1/ML) Σ_s W(s) · conj(F_{τ_n}(2πα + 2πs/M)) · F_{τ_m}(2πα + 2πs/M)
    /// ```
    pub fn smoothed_spectra(
        &self,
        alpha: T,
        smoother: &SmootherSpec<T>,
    ) -> Result<SmoothedSpectra<T>> {
        let n = self.lag_set.len();
        let half = smoother.half_width();
        let grid = self.smoothing_grid(alpha, half);
        let w = smoother.window();
        let l = smoother.len();
        let norm = (T::from_count(self.sample_count) * T::from_count(l)).recip();
        let mut q = Vec::with_capacity(n * n);
        let mut q_star = Vec::with_capacity(n * n);
        for row in 0..n {
            for col in 0..n {
                let mut acc_q = Complex::new(T::zero(), T::zero());
                let mut acc_qs = Complex::new(T::zero(), T::zero());
                for i in 0..l {
                    // i indexes s = i - half; grid[.][i] holds F at α + (i-half)/M.
                    let opposite = l - 1 - i;
                    acc_q += grid[col][opposite] * grid[row][i].scale(w[i]);
                    acc_qs += grid[col][i].conj() * grid[row][i].scale(w[i]);
                }
                q.push(acc_q.scale(norm));
                q_star.push(acc_qs.scale(norm));
            }
        }
        SmoothedSpectra::new(n, q, q_star)
    }
}

/// Frequency-smoothed cyclic spectra of the lag products of `x` at `alpha`.
/// Convenience wrapper over [`LagProducts`].
pub fn smoothed_cyclic_spectra<T: Scalar>(
    x: &ComplexSeries<T>,
    alpha: T,
    lag_set: &LagSet,
    smoother: &SmootherSpec<T>,
) -> Result<SmoothedSpectra<T>> {
    LagProducts::compute(x, lag_set)?.smoothed_spectra(alpha, smoother)
}

/// Assembles the `2N × 2N` feature-vector covariance from `(Q, Q*)`:
///
/// ```text
/// Σ = [ Re{(Q+Q*)/2}   Im{(Q-Q*)/2} ]
///     [ Im{(Q+Q*)/2}   Re{(Q*-Q)/2} ]
/// ```
pub fn feature_covariance<T: Scalar>(spectra: &SmoothedSpectra<T>) -> FeatureCovariance<T> {
    let n = spectra.dim();
    let dim = 2 * n;
    let half = T::lit(0.5);
    let mut sigma = vec![T::zero(); dim * dim];
    for m in 0..n {
        for k in 0..n {
            let q = spectra.q(m, k);
            let qs = spectra.q_star(m, k);
            let sum = (q + qs).scale(half);
            let diff = (q - qs).scale(half);
            sigma[m * dim + k] = sum.re;
            sigma[m * dim + (n + k)] = diff.im;
            sigma[(n + m) * dim + k] = sum.im;
            sigma[(n + m) * dim + (n + k)] = -diff.re;
        }
    }
    FeatureCovariance {
        dim,
        sigma,
        spectra: spectra.clone(),
    }
}
