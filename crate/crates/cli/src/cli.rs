//! Command-line interface: subcommands for signal generation, one-shot
//! detection and the Monte Carlo experiment suites.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cyclodet::detect::{decide, multicycle_max, multicycle_sum, single_cycle_statistic};
use cyclodet::estimation::{feature_covariance, LagProducts};
use cyclodet::signal::{apply_awgn, generate_ofdm, ComplexSeries};

use crate::config::{Scenario, ScenarioConfig};
use crate::runner::{
    detection_curve_table, estimate_cooperation_curves, report_dump_csv, roc_table,
    run_detection_curve, run_roc_trials, run_shadowing_experiment, run_trials, trial_dump_csv,
    DetectorKind, Hypothesis,
};
use crate::{HarnessError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "cyclodet",
    version,
    about = "Cyclostationarity-based spectrum sensing: OFDM signal generation, GLRT detection and Monte Carlo experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

/// Global flags; each scenario field is overridable by the flag of the same
/// name.
#[derive(Debug, Args)]
pub struct Overrides {
    /// TOML config file mirroring the scenario fields
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed (config: master_seed)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Trials per grid point (config: num_trials)
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Use the full-scale trial count (10000) unless --trials is given
    #[arg(long, global = true)]
    pub paper: bool,
    /// Worker threads for trial execution (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Override config: ofdm.num_subcarriers
    #[arg(long, global = true)]
    pub num_subcarriers: Option<usize>,
    /// Override config: ofdm.useful_len
    #[arg(long, global = true)]
    pub useful_len: Option<usize>,
    /// Override config: ofdm.cp_len
    #[arg(long, global = true)]
    pub cp_len: Option<usize>,
    /// Override config: ofdm.qam_order
    #[arg(long, global = true)]
    pub qam_order: Option<usize>,
    /// Override config: ofdm.num_symbols
    #[arg(long, global = true)]
    pub num_symbols: Option<usize>,
    /// Override config: channel.snr_db
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub snr_db: Option<f64>,
    /// Override config: channel.shadow_mean_db
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub shadow_mean_db: Option<f64>,
    /// Override config: channel.shadow_std_db
    #[arg(long, global = true)]
    pub shadow_std_db: Option<f64>,
    /// Override config: detector.false_alarm_rate
    #[arg(long, global = true)]
    pub false_alarm_rate: Option<f64>,
    /// Override config: detector.window_len
    #[arg(long, global = true)]
    pub window_len: Option<usize>,
    /// Override config: detector.kaiser_beta
    #[arg(long, global = true)]
    pub kaiser_beta: Option<f64>,
    /// Override config: num_users
    #[arg(long, global = true)]
    pub num_users: Option<usize>,
    /// Override config: shadowing (true/false)
    #[arg(long, global = true, value_parser = clap::value_parser!(bool))]
    pub shadowing: Option<bool>,
    /// Comma-separated SNR grid in dB (config: snr_grid_db)
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub snr_grid_db: Option<Vec<f64>>,
    /// Comma-separated false-alarm grid (config: far_grid)
    #[arg(long, global = true, value_delimiter = ',')]
    pub far_grid: Option<Vec<f64>>,
    /// "exact" or "uniform" (config: quantizer.mode)
    #[arg(long, global = true)]
    pub quantizer_mode: Option<String>,
    /// Override config: quantizer.bits
    #[arg(long, global = true)]
    pub quantizer_bits: Option<u32>,
    /// Override config: quantizer.clip_max
    #[arg(long, global = true)]
    pub clip_max: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a cyclic-prefix OFDM record and write it to a sample file
    Generate {
        /// Output path
        #[arg(long)]
        out: PathBuf,
        /// Pass the signal through the configured AWGN channel first
        #[arg(long)]
        with_noise: bool,
        /// Write plain-text two-column samples instead of the binary format
        #[arg(long)]
        text: bool,
    },
    /// Run the detector bank on a sample file and report each statistic
    Detect {
        /// Input sample file (CYCS binary or two-column text)
        #[arg(long)]
        input: PathBuf,
        /// Write the report CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo detection probability vs SNR
    Mc {
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write one row per (trial, detector) to this CSV
        #[arg(long)]
        dump_trials: Option<PathBuf>,
    },
    /// Detection probability vs false alarm rate at the configured SNR
    Roc {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dump_trials: Option<PathBuf>,
    },
    /// Cooperative detection: single user vs the configured user count
    Fuse {
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write per-user fusion-center report rows to this CSV
        #[arg(long)]
        reports: Option<PathBuf>,
    },
    /// Shadowing experiment: per-user random SNRs, one vs many users
    Shadow {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dump_trials: Option<PathBuf>,
        #[arg(long)]
        reports: Option<PathBuf>,
    },
}

impl Overrides {
    /// Layered configuration: defaults, then the config file, then flags.
    pub fn resolve(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(path) => ScenarioConfig::from_toml(&fs::read_to_string(path)?)?,
            None => ScenarioConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.master_seed = seed;
        }
        match (self.trials, self.paper) {
            (Some(trials), _) => cfg.num_trials = trials,
            (None, true) => cfg.num_trials = 10_000,
            (None, false) => {}
        }
        macro_rules! set {
            ($target:expr, $src:expr) => {
                if let Some(v) = $src.clone() {
                    $target = v;
                }
            };
        }
        set!(cfg.ofdm.num_subcarriers, self.num_subcarriers);
        set!(cfg.ofdm.useful_len, self.useful_len);
        set!(cfg.ofdm.cp_len, self.cp_len);
        set!(cfg.ofdm.qam_order, self.qam_order);
        set!(cfg.ofdm.num_symbols, self.num_symbols);
        set!(cfg.channel.snr_db, self.snr_db);
        set!(cfg.channel.shadow_mean_db, self.shadow_mean_db);
        set!(cfg.channel.shadow_std_db, self.shadow_std_db);
        set!(cfg.detector.false_alarm_rate, self.false_alarm_rate);
        set!(cfg.detector.window_len, self.window_len);
        set!(cfg.detector.kaiser_beta, self.kaiser_beta);
        set!(cfg.num_users, self.num_users);
        set!(cfg.shadowing, self.shadowing);
        set!(cfg.snr_grid_db, self.snr_grid_db);
        set!(cfg.far_grid, self.far_grid);
        set!(cfg.quantizer.mode, self.quantizer_mode);
        set!(cfg.quantizer.bits, self.quantizer_bits);
        if let Some(clip) = self.clip_max {
            cfg.quantizer.clip_max = Some(clip);
        }
        Ok(cfg)
    }
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

/// Detector-bank report for one imported record.
fn detect_report(sc: &Scenario, samples: Vec<num_complex::Complex<f64>>) -> Result<String> {
    let x = ComplexSeries::new(samples)?;
    let products = LagProducts::compute(&x, &sc.lag_set)?;
    let per_freq = sc
        .alphas
        .iter()
        .map(|&alpha| {
            let r = products.feature_vector(alpha);
            let cov = feature_covariance(&products.smoothed_spectra(alpha, &sc.smoother)?);
            single_cycle_statistic(&r, &cov)
        })
        .collect::<cyclodet::Result<Vec<_>>>()?;
    let bank = [
        (DetectorKind::SingleCycle, per_freq[0]),
        (DetectorKind::MultiMax, multicycle_max(&per_freq)?),
        (DetectorKind::MultiSum, multicycle_sum(&per_freq)?),
    ];
    let mut out = String::from("detector_kind,num_samples,value,dof,num_freqs,p_value,reject\n");
    for (kind, stat) in bank {
        let spec = match kind {
            DetectorKind::SingleCycle => &sc.detector_specs[0],
            DetectorKind::MultiMax => &sc.detector_specs[1],
            _ => &sc.detector_specs[2],
        };
        out.push_str(&format!(
            "{},{},{},{},{},{:e},{}\n",
            kind.label(),
            x.len(),
            stat.value(),
            stat.dof(),
            stat.num_freqs(),
            stat.p_value(),
            decide(&stat, spec)?,
        ));
    }
    Ok(out)
}

fn run_command(command: &Command, sc: &Scenario) -> Result<()> {
    match command {
        Command::Generate {
            out,
            with_noise,
            text,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(sc.master_seed);
            let signal = generate_ofdm::<f64, _>(&sc.ofdm, &mut rng)?;
            let signal = if *with_noise {
                apply_awgn(&signal, sc.channel.snr_db(), &mut rng)
            } else {
                signal
            };
            if *text {
                crate::sampfile::write_text(out, signal.samples())?;
            } else {
                crate::sampfile::write_binary(out, signal.samples())?;
            }
            eprintln!("wrote {} samples to {}", signal.len(), out.display());
        }
        Command::Detect { input, out } => {
            let samples = crate::sampfile::read(input)?;
            emit(out.as_deref(), &detect_report(sc, samples)?)?;
        }
        Command::Mc { out, dump_trials } => {
            let points = run_detection_curve(sc)?;
            emit(out.as_deref(), &detection_curve_table(sc, &points).to_csv())?;
            if let Some(path) = dump_trials {
                let outcomes: Vec<_> = points.into_iter().flat_map(|p| p.outcomes).collect();
                fs::write(path, trial_dump_csv(&outcomes))?;
            }
        }
        Command::Roc { out, dump_trials } => {
            let run = run_roc_trials(sc)?;
            emit(out.as_deref(), &roc_table(sc, &run).to_csv())?;
            if let Some(path) = dump_trials {
                let mut outcomes = run.h0;
                outcomes.extend(run.h1);
                fs::write(path, trial_dump_csv(&outcomes))?;
            }
        }
        Command::Fuse { out, reports } => {
            emit(out.as_deref(), &estimate_cooperation_curves(sc)?.to_csv())?;
            if let Some(path) = reports {
                let outcomes = run_trials(sc, Hypothesis::H1, sc.num_trials)?;
                fs::write(path, report_dump_csv(sc, &outcomes))?;
            }
        }
        Command::Shadow {
            out,
            dump_trials,
            reports,
        } => {
            emit(out.as_deref(), &run_shadowing_experiment(sc)?.to_csv())?;
            if dump_trials.is_some() || reports.is_some() {
                let mut shadowed = sc.clone();
                shadowed.shadowing = true;
                let run = run_roc_trials(&shadowed)?;
                let mut outcomes = run.h0;
                outcomes.extend(run.h1);
                if let Some(path) = dump_trials {
                    fs::write(path, trial_dump_csv(&outcomes))?;
                }
                if let Some(path) = reports {
                    fs::write(path, report_dump_csv(&shadowed, &outcomes))?;
                }
            }
        }
    }
    Ok(())
}

/// Parses nothing: takes an already-parsed CLI and executes it.
pub fn run(cli: &Cli) -> Result<()> {
    let sc = cli.overrides.resolve()?.build()?;
    match cli.overrides.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build()
                .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
            pool.install(|| run_command(&cli.command, &sc))
        }
        None => run_command(&cli.command, &sc),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn overrides_layer_on_top_of_defaults() {
        let cli = Cli::parse_from([
            "cyclodet",
            "mc",
            "--seed",
            "9",
            "--trials",
            "25",
            "--num-users",
            "5",
            "--snr-grid-db",
            "-10,-5",
            "--qam-order",
            "64",
        ]);
        let cfg = cli.overrides.resolve().unwrap();
        assert_eq!(cfg.master_seed, 9);
        assert_eq!(cfg.num_trials, 25);
        assert_eq!(cfg.num_users, 5);
        assert_eq!(cfg.snr_grid_db, vec![-10.0, -5.0]);
        assert_eq!(cfg.ofdm.qam_order, 64);
    }

    #[test]
    fn paper_flag_raises_trials_unless_explicit() {
        let cli = Cli::parse_from(["cyclodet", "roc", "--paper"]);
        assert_eq!(cli.overrides.resolve().unwrap().num_trials, 10_000);
        let cli = Cli::parse_from(["cyclodet", "roc", "--paper", "--trials", "7"]);
        assert_eq!(cli.overrides.resolve().unwrap().num_trials, 7);
    }
}
