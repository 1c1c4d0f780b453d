//! Test-signal generation: cyclic-prefix OFDM, AWGN channels and per-user
//! shadowed SNR draws.
//!
//! Every stochastic operation takes an explicit RNG so that callers control
//! reproducibility; identical seeds produce bit-identical output.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{fft, Error, Result, Scalar};

/// Finite complex-valued discrete-time record.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSeries<T> {
    samples: Vec<Complex<T>>,
}

impl<T: Scalar> ComplexSeries<T> {
    pub fn new(samples: Vec<Complex<T>>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Domain(
                "series must contain at least one sample".into(),
            ));
        }
        Ok(Self { samples })
    }

    /// Number of samples `M`.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees at least one sample
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex<T>> {
        self.samples
    }

    /// Sample mean of `|x(t)|²`.
    pub fn mean_power(&self) -> T {
        let sum = self
            .samples
            .iter()
            .fold(T::zero(), |acc, s| acc + s.norm_sqr());
        sum / T::from_count(self.len())
    }

    /// Pointwise scaling by a complex constant.
    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self {
            samples: self.samples.iter().map(|s| s * c).collect(),
        }
    }
}

/// Cyclic-prefix OFDM waveform parameters, in samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OfdmParams {
    num_subcarriers: usize,
    useful_len: usize,
    cp_len: usize,
    qam_order: usize,
    num_symbols: usize,
}

impl OfdmParams {
    pub fn new(
        num_subcarriers: usize,
        useful_len: usize,
        cp_len: usize,
        qam_order: usize,
        num_symbols: usize,
    ) -> Result<Self> {
        qam_side(qam_order)?;
        if num_subcarriers == 0 || useful_len == 0 || num_symbols == 0 {
            return Err(Error::Config(
                "subcarriers, useful length and symbol count must be >= 1".into(),
            ));
        }
        if num_subcarriers > useful_len {
            return Err(Error::Config(format!(
                "{num_subcarriers} subcarriers do not fit in a useful length of {useful_len}"
            )));
        }
        Ok(Self {
            num_subcarriers,
            useful_len,
            cp_len,
            qam_order,
            num_symbols,
        })
    }

    pub fn num_subcarriers(&self) -> usize {
        self.num_subcarriers
    }

    pub fn useful_len(&self) -> usize {
        self.useful_len
    }

    pub fn cp_len(&self) -> usize {
        self.cp_len
    }

    pub fn qam_order(&self) -> usize {
        self.qam_order
    }

    pub fn num_symbols(&self) -> usize {
        self.num_symbols
    }

    /// Full symbol length: useful part plus cyclic prefix.
    pub fn symbol_len(&self) -> usize {
        self.useful_len + self.cp_len
    }

    /// Total record length `num_symbols · symbol_len`.
    pub fn total_len(&self) -> usize {
        self.num_symbols * self.symbol_len()
    }
}

impl Default for OfdmParams {
    /// 32 subcarriers over 32 useful samples, prefix a quarter of the useful
    /// part, 16-QAM, 100 symbols.
    fn default() -> Self {
        Self::new(32, 32, 8, 16, 100).expect("default parameters are valid")
    }
}

/// AWGN level and per-user shadowing law, in decibels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams<T> {
    snr_db: T,
    shadow_mean_db: T,
    shadow_std_db: T,
}

impl<T: Scalar> ChannelParams<T> {
    pub fn new(snr_db: T, shadow_mean_db: T, shadow_std_db: T) -> Result<Self> {
        if shadow_std_db < T::zero() || shadow_std_db.is_nan() {
            return Err(Error::Config(format!(
                "shadowing standard deviation must be >= 0, got {shadow_std_db}"
            )));
        }
        Ok(Self {
            snr_db,
            shadow_mean_db,
            shadow_std_db,
        })
    }

    pub fn snr_db(&self) -> T {
        self.snr_db
    }

    pub fn shadow_mean_db(&self) -> T {
        self.shadow_mean_db
    }

    pub fn shadow_std_db(&self) -> T {
        self.shadow_std_db
    }

    pub fn with_snr_db(mut self, snr_db: T) -> Self {
        self.snr_db = snr_db;
        self
    }
}

fn qam_side(order: usize) -> Result<usize> {
    let side = (order as f64).sqrt().round() as usize;
    if order < 4 || side * side != order {
        return Err(Error::Config(format!(
            "QAM order must be a perfect square >= 4, got {order}"
        )));
    }
    Ok(side)
}

/// Draws `count` i.i.d. symbols from a square QAM constellation scaled to
/// unit average energy.
pub fn generate_qam_symbols<T, R>(
    count: usize,
    order: usize,
    rng: &mut R,
) -> Result<ComplexSeries<T>>
where
    T: Scalar,
    R: Rng + ?Sized,
{
    let side = qam_side(order)?;
    if count == 0 {
        return Err(Error::Config("symbol count must be >= 1".into()));
    }
    // Per-axis levels ±1, ±3, ..., ±(side-1); mean symbol energy 2(side²-1)/3.
    let energy = T::lit(2.0) * T::from_count(side * side - 1) / T::lit(3.0);
    let scale = energy.sqrt().recip();
    let level = |idx: usize| {
        let raw = T::from_count(2 * idx + 1) - T::from_count(side);
        raw * scale
    };
    let samples = (0..count)
        .map(|_| {
            let re = level(rng.random_range(0..side));
            let im = level(rng.random_range(0..side));
            Complex::new(re, im)
        })
        .collect();
    ComplexSeries::new(samples)
}

/// Generates `num_symbols` cyclic-prefix OFDM symbols with unit average power.
///
/// Each symbol is the inverse DFT, over `useful_len` samples, of
/// `num_subcarriers` QAM symbols placed on the lowest bins, scaled by
/// `1/√num_subcarriers` so the average sample power is exactly 1; the last
/// `cp_len` samples are then prepended as the cyclic prefix.
pub fn generate_ofdm<T, R>(params: &OfdmParams, rng: &mut R) -> Result<ComplexSeries<T>>
where
    T: Scalar,
    R: Rng + ?Sized,
{
    let nc = params.num_subcarriers();
    let td = params.useful_len();
    let data = generate_qam_symbols::<T, R>(nc * params.num_symbols(), params.qam_order(), rng)?;
    let data = data.into_samples();

    let scale = T::from_count(nc).sqrt().recip();
    let mut out = Vec::with_capacity(params.total_len());
    let mut bins = vec![Complex::new(T::zero(), T::zero()); td];
    for sym in 0..params.num_symbols() {
        bins.iter_mut()
            .for_each(|b| *b = Complex::new(T::zero(), T::zero()));
        bins[..nc].copy_from_slice(&data[sym * nc..(sym + 1) * nc]);
        fft::inverse(&mut bins);
        for b in bins.iter_mut() {
            *b *= scale;
        }
        out.extend_from_slice(&bins[td - params.cp_len()..]);
        out.extend_from_slice(&bins);
    }
    ComplexSeries::new(out)
}

/// Adds circularly-symmetric complex Gaussian noise at the given SNR,
/// taking the input to be unit average power. An infinite `snr_db` returns
/// the input unchanged.
pub fn apply_awgn<T, R>(signal: &ComplexSeries<T>, snr_db: T, rng: &mut R) -> ComplexSeries<T>
where
    T: Scalar,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    if snr_db.is_infinite() && snr_db > T::zero() {
        return signal.clone();
    }
    let noise_var = T::lit(10.0).powf(-snr_db / T::lit(10.0));
    let component_sigma = (noise_var / T::lit(2.0)).sqrt();
    let samples = signal
        .samples()
        .iter()
        .map(|s| {
            let re: T = StandardNormal.sample(rng);
            let im: T = StandardNormal.sample(rng);
            s + Complex::new(re * component_sigma, im * component_sigma)
        })
        .collect();
    ComplexSeries { samples }
}

/// Draws one shadowed SNR per user from a Gaussian in the dB domain
/// (log-normal received power).
pub fn draw_shadowed_snrs<T, R>(
    channel: &ChannelParams<T>,
    num_users: usize,
    rng: &mut R,
) -> Result<Vec<T>>
where
    T: Scalar,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    if num_users == 0 {
        return Err(Error::Config("user count must be >= 1".into()));
    }
    Ok((0..num_users)
        .map(|_| {
            let z: T = StandardNormal.sample(rng);
            channel.shadow_mean_db() + channel.shadow_std_db() * z
        })
        .collect())
}
