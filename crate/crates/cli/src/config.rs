//! Experiment configuration: TOML file sections mirroring the scenario
//! fields, with every value overridable from the command line.

use serde::Deserialize;

use cyclodet::detect::{DetectorSpec, StatisticKind};
use cyclodet::estimation::{CyclicFrequencySet, LagSet, SmootherSpec};
use cyclodet::fusion::QuantizerSpec;
use cyclodet::signal::{ChannelParams, OfdmParams};

use crate::{HarnessError, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OfdmConfig {
    pub num_subcarriers: usize,
    pub useful_len: usize,
    pub cp_len: usize,
    pub qam_order: usize,
    pub num_symbols: usize,
}

impl Default for OfdmConfig {
    fn default() -> Self {
        Self {
            num_subcarriers: 32,
            useful_len: 32,
            cp_len: 8,
            qam_order: 16,
            num_symbols: 100,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub snr_db: f64,
    pub shadow_mean_db: f64,
    pub shadow_std_db: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            snr_db: -7.0,
            shadow_mean_db: -9.0,
            shadow_std_db: 10.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    pub false_alarm_rate: f64,
    pub window_len: usize,
    pub kaiser_beta: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            false_alarm_rate: 0.05,
            window_len: 2049,
            kaiser_beta: 10.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuantizerConfig {
    /// "exact" or "uniform".
    pub mode: String,
    pub bits: u32,
    /// Saturation level; defaults to the 0.9999 quantile of the local null
    /// law when absent.
    pub clip_max: Option<f64>,
}

impl Default for QuantizerConfig {
    fn default() -> Self {
        Self {
            mode: "exact".into(),
            bits: 8,
            clip_max: None,
        }
    }
}

/// Full experiment description as read from the config file.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub master_seed: u64,
    pub num_trials: usize,
    pub num_users: usize,
    pub shadowing: bool,
    pub snr_grid_db: Vec<f64>,
    pub far_grid: Vec<f64>,
    pub ofdm: OfdmConfig,
    pub channel: ChannelConfig,
    pub detector: DetectorConfig,
    pub quantizer: QuantizerConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            master_seed: 42,
            num_trials: 1000,
            num_users: 1,
            shadowing: false,
            snr_grid_db: (-8..=0).map(|s| (2 * s) as f64).collect(),
            far_grid: vec![0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9],
            ofdm: OfdmConfig::default(),
            channel: ChannelConfig::default(),
            detector: DetectorConfig::default(),
            quantizer: QuantizerConfig::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Validates the configuration and builds the runtime scenario with the
    /// detector bank derived from the OFDM timing: cyclic frequencies
    /// `1/T_s` and `2/T_s`, lags `±T_d`, conjugate lag products.
    pub fn build(&self) -> Result<Scenario> {
        if self.num_trials == 0 {
            return Err(HarnessError::Config("num_trials must be >= 1".into()));
        }
        if self.num_users == 0 {
            return Err(HarnessError::Config("num_users must be >= 1".into()));
        }
        for p in &self.far_grid {
            if !(*p > 0.0 && *p < 1.0) {
                return Err(HarnessError::Config(format!(
                    "far_grid values must lie in (0, 1), got {p}"
                )));
            }
        }
        let ofdm = OfdmParams::new(
            self.ofdm.num_subcarriers,
            self.ofdm.useful_len,
            self.ofdm.cp_len,
            self.ofdm.qam_order,
            self.ofdm.num_symbols,
        )?;
        let channel = ChannelParams::new(
            self.channel.snr_db,
            self.channel.shadow_mean_db,
            self.channel.shadow_std_db,
        )?;
        let symbol_len = ofdm.symbol_len() as f64;
        let alphas = vec![1.0 / symbol_len, 2.0 / symbol_len];
        let freq_set = CyclicFrequencySet::new(alphas.clone())?;
        let lag_set = LagSet::new(
            vec![ofdm.useful_len() as i64, -(ofdm.useful_len() as i64)],
            true,
        )?;
        let smoother = SmootherSpec::kaiser(self.detector.window_len, self.detector.kaiser_beta)?;
        let p = self.detector.false_alarm_rate;
        let specs = [
            StatisticKind::SingleCycle,
            StatisticKind::MultiMax,
            StatisticKind::MultiSum,
        ]
        .map(|kind| {
            DetectorSpec::new(freq_set.clone(), lag_set.clone(), smoother.clone(), p, kind)
        });
        let mut detector_specs = Vec::with_capacity(3);
        for spec in specs {
            detector_specs.push(spec?);
        }
        let dof_per_user = 2 * lag_set.len();
        let quantizer = match self.quantizer.mode.as_str() {
            "exact" => QuantizerSpec::Exact,
            "uniform" => match self.quantizer.clip_max {
                Some(clip) => QuantizerSpec::uniform(self.quantizer.bits, clip)?,
                None => match QuantizerSpec::default_uniform_for_dof(dof_per_user)? {
                    QuantizerSpec::Uniform { clip_max, .. } => {
                        QuantizerSpec::uniform(self.quantizer.bits, clip_max)?
                    }
                    QuantizerSpec::Exact => unreachable!("default quantizer is uniform"),
                },
            },
            other => {
                return Err(HarnessError::Config(format!(
                    "quantizer mode must be \"exact\" or \"uniform\", got \"{other}\""
                )))
            }
        };
        let mut snr_grid_db = self.snr_grid_db.clone();
        snr_grid_db.sort_by(|a, b| a.partial_cmp(b).expect("finite SNR grid"));
        Ok(Scenario {
            ofdm,
            channel,
            alphas,
            lag_set,
            smoother,
            detector_specs,
            false_alarm_rate: p,
            num_users: self.num_users,
            num_trials: self.num_trials,
            snr_grid_db,
            far_grid: self.far_grid.clone(),
            shadowing: self.shadowing,
            master_seed: self.master_seed,
            quantizer,
        })
    }
}

/// Validated runtime form of the configuration, with the detector bank
/// spelled out.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub ofdm: OfdmParams,
    pub channel: ChannelParams<f64>,
    /// Tested cyclic frequencies, cycles/sample.
    pub alphas: Vec<f64>,
    pub lag_set: LagSet,
    pub smoother: SmootherSpec<f64>,
    /// Specs for the single-cycle, multi-max and multi-sum statistics (also
    /// used for their fused counterparts).
    pub detector_specs: Vec<DetectorSpec<f64>>,
    pub false_alarm_rate: f64,
    pub num_users: usize,
    pub num_trials: usize,
    pub snr_grid_db: Vec<f64>,
    pub far_grid: Vec<f64>,
    pub shadowing: bool,
    pub master_seed: u64,
    pub quantizer: QuantizerSpec<f64>,
}

impl Scenario {
    /// Degrees of freedom of one user's single-frequency statistic (2N).
    pub fn dof_per_user(&self) -> usize {
        2 * self.lag_set.len()
    }

    /// Record length of one observation.
    pub fn record_len(&self) -> usize {
        self.ofdm.total_len()
    }

    pub fn with_snr_db(&self, snr_db: f64) -> Self {
        let mut sc = self.clone();
        sc.channel = sc.channel.with_snr_db(snr_db);
        sc
    }

    pub fn with_num_users(&self, num_users: usize) -> Self {
        let mut sc = self.clone();
        sc.num_users = num_users.max(1);
        sc
    }

    pub fn with_num_trials(&self, num_trials: usize) -> Self {
        let mut sc = self.clone();
        sc.num_trials = num_trials.max(1);
        sc
    }
}
