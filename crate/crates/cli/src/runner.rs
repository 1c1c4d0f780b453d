//! Trial execution and result aggregation.
//!
//! Every random draw comes from a ChaCha substream keyed by
//! `(master_seed, trial, user, role, hypothesis)`, so results are identical
//! no matter how trials are scheduled across worker threads.

use num_complex::Complex;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use cyclodet::detect::{decide, multicycle_max, multicycle_sum, single_cycle_statistic};
use cyclodet::estimation::{feature_covariance, LagProducts};
use cyclodet::fusion::{fuse_multicycle, fuse_single_cycle, quantize_statistic, FusionMode};
use cyclodet::signal::{apply_awgn, draw_shadowed_snrs, generate_ofdm, ComplexSeries};
use cyclodet::Statistic64;

use crate::config::Scenario;
use crate::table::{wilson_interval, ResultRow, ResultTable};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    H0,
    H1,
}

impl Hypothesis {
    fn tag(self) -> u64 {
        match self {
            Hypothesis::H0 => 0,
            Hypothesis::H1 => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Hypothesis::H0 => "H0",
            Hypothesis::H1 => "H1",
        }
    }
}

/// Detector bank evaluated on every trial. The fused variants coincide with
/// the local ones when `num_users == 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorKind {
    SingleCycle,
    MultiMax,
    MultiSum,
    FusedSingle,
    FusedMax,
    FusedSum,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 6] = [
        DetectorKind::SingleCycle,
        DetectorKind::MultiMax,
        DetectorKind::MultiSum,
        DetectorKind::FusedSingle,
        DetectorKind::FusedMax,
        DetectorKind::FusedSum,
    ];

    pub fn label(self) -> &'static str {
        match self {
            DetectorKind::SingleCycle => "single_cycle",
            DetectorKind::MultiMax => "multi_max",
            DetectorKind::MultiSum => "multi_sum",
            DetectorKind::FusedSingle => "fused_single",
            DetectorKind::FusedMax => "fused_max",
            DetectorKind::FusedSum => "fused_sum",
        }
    }

    pub fn index(self) -> usize {
        Self::ALL
            .iter()
            .position(|k| *k == self)
            .expect("kind listed")
    }

    /// Index into the scenario's three detector specs.
    fn spec_index(self) -> usize {
        match self {
            DetectorKind::SingleCycle | DetectorKind::FusedSingle => 0,
            DetectorKind::MultiMax | DetectorKind::FusedMax => 1,
            DetectorKind::MultiSum | DetectorKind::FusedSum => 2,
        }
    }
}

mod role {
    pub const SIGNAL: u64 = 1;
    pub const NOISE: u64 = 2;
    pub const SHADOW: u64 = 3;
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent substream for one (trial, user, role, hypothesis) slot.
fn substream(master: u64, path: &[u64]) -> ChaCha8Rng {
    let mut state = splitmix(master);
    for &p in path {
        state = splitmix(state ^ p);
    }
    ChaCha8Rng::seed_from_u64(state)
}

/// Everything observed in one sensing interval.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub hypothesis: Hypothesis,
    /// One statistic per [`DetectorKind::ALL`] entry.
    pub statistics: Vec<Statistic64>,
    /// Decisions at the configured false alarm rate, same order.
    pub decisions: Vec<bool>,
    pub per_user_snrs_db: Vec<f64>,
    /// `K × N_α` local statistic values.
    pub per_user_stats: Vec<Vec<f64>>,
    /// The same values after the configured quantizer.
    pub per_user_quantized: Vec<Vec<f64>>,
}

impl TrialOutcome {
    pub fn statistic(&self, kind: DetectorKind) -> &Statistic64 {
        &self.statistics[kind.index()]
    }

    pub fn decision(&self, kind: DetectorKind) -> bool {
        self.decisions[kind.index()]
    }
}

/// Runs one trial: under H1 all users observe the same OFDM realization
/// through independent noise; under H0 pure unit-variance noise.
pub fn run_trial(sc: &Scenario, hypothesis: Hypothesis, trial: u64) -> Result<TrialOutcome> {
    let k = sc.num_users;
    let hyp = hypothesis.tag();
    let seed = sc.master_seed;

    let per_user_snrs_db: Vec<f64> = if sc.shadowing {
        let mut rng = substream(seed, &[trial, 0, role::SHADOW, hyp]);
        draw_shadowed_snrs(&sc.channel, k, &mut rng)?
    } else {
        vec![sc.channel.snr_db(); k]
    };

    let signal = match hypothesis {
        Hypothesis::H1 => {
            let mut rng = substream(seed, &[trial, 0, role::SIGNAL, hyp]);
            Some(generate_ofdm::<f64, _>(&sc.ofdm, &mut rng)?)
        }
        Hypothesis::H0 => None,
    };
    let silence = ComplexSeries::new(vec![Complex::new(0.0, 0.0); sc.record_len()])?;

    let mut per_user_stats: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut first_user_stats: Vec<Statistic64> = Vec::new();
    for (user, &user_snr_db) in per_user_snrs_db.iter().enumerate() {
        let mut rng = substream(seed, &[trial, user as u64 + 1, role::NOISE, hyp]);
        let observed = match &signal {
            Some(x) => apply_awgn(x, user_snr_db, &mut rng),
            None => apply_awgn(&silence, 0.0, &mut rng),
        };
        let products = LagProducts::compute(&observed, &sc.lag_set)?;
        let mut row = Vec::with_capacity(sc.alphas.len());
        for &alpha in &sc.alphas {
            let r = products.feature_vector(alpha);
            let cov = feature_covariance(&products.smoothed_spectra(alpha, &sc.smoother)?);
            let stat = single_cycle_statistic(&r, &cov)?;
            row.push(stat.value());
            if user == 0 {
                first_user_stats.push(stat);
            }
        }
        per_user_stats.push(row);
    }

    let per_user_quantized: Vec<Vec<f64>> = per_user_stats
        .iter()
        .map(|row| {
            row.iter()
                .map(|&v| quantize_statistic(v, &sc.quantizer))
                .collect()
        })
        .collect();

    let dof = sc.dof_per_user();
    let fused_first: Vec<f64> = per_user_quantized.iter().map(|row| row[0]).collect();
    let statistics = vec![
        first_user_stats[0],
        multicycle_max(&first_user_stats)?,
        multicycle_sum(&first_user_stats)?,
        fuse_single_cycle(&fused_first, dof)?,
        fuse_multicycle(&per_user_quantized, dof, FusionMode::Max)?,
        fuse_multicycle(&per_user_quantized, dof, FusionMode::Sum)?,
    ];
    let decisions = DetectorKind::ALL
        .iter()
        .map(|kind| {
            decide(
                &statistics[kind.index()],
                &sc.detector_specs[kind.spec_index()],
            )
        })
        .collect::<cyclodet::Result<Vec<bool>>>()?;

    Ok(TrialOutcome {
        hypothesis,
        statistics,
        decisions,
        per_user_snrs_db,
        per_user_stats,
        per_user_quantized,
    })
}

/// Runs `n` trials in parallel; the outcome vector is ordered by trial index
/// regardless of scheduling.
pub fn run_trials(sc: &Scenario, hypothesis: Hypothesis, n: usize) -> Result<Vec<TrialOutcome>> {
    (0..n as u64)
        .into_par_iter()
        .map(|trial| run_trial(sc, hypothesis, trial))
        .collect()
}

fn rate_row(
    sc: &Scenario,
    kind: DetectorKind,
    snr_db: Option<f64>,
    far: f64,
    pd: Option<(usize, usize)>,
    far_counts: Option<(usize, usize)>,
) -> ResultRow {
    let (ci_successes, ci_trials) = pd.or(far_counts).unwrap_or((0, 0));
    let (wilson_ci_low, wilson_ci_high) = wilson_interval(ci_successes, ci_trials);
    ResultRow {
        detector_kind: kind.label().into(),
        num_users: sc.num_users,
        snr_db,
        far: Some(far),
        num_trials: ci_trials,
        empirical_pd: pd.map(|(s, n)| s as f64 / n as f64),
        empirical_far: far_counts.map(|(s, n)| s as f64 / n as f64),
        wilson_ci_low,
        wilson_ci_high,
    }
}

/// One Pd-vs-SNR grid point: the H1 outcomes at that SNR.
pub struct CurvePoint {
    pub snr_db: f64,
    pub outcomes: Vec<TrialOutcome>,
}

pub fn run_detection_curve(sc: &Scenario) -> Result<Vec<CurvePoint>> {
    sc.snr_grid_db
        .iter()
        .map(|&snr_db| {
            let at_snr = sc.with_snr_db(snr_db);
            Ok(CurvePoint {
                snr_db,
                outcomes: run_trials(&at_snr, Hypothesis::H1, sc.num_trials)?,
            })
        })
        .collect()
}

pub fn detection_curve_table(sc: &Scenario, points: &[CurvePoint]) -> ResultTable {
    let mut table = ResultTable::default();
    for kind in DetectorKind::ALL {
        for point in points {
            let hits = point.outcomes.iter().filter(|o| o.decision(kind)).count();
            table.push(rate_row(
                sc,
                kind,
                Some(point.snr_db),
                sc.false_alarm_rate,
                Some((hits, point.outcomes.len())),
                None,
            ));
        }
    }
    table
}

/// Empirical detection probability per detector as a function of SNR, at the
/// configured false alarm rate.
pub fn estimate_detection_curve(sc: &Scenario) -> Result<ResultTable> {
    Ok(detection_curve_table(sc, &run_detection_curve(sc)?))
}

/// The H0 and H1 trial sets an ROC sweep is built from.
pub struct RocRun {
    pub h0: Vec<TrialOutcome>,
    pub h1: Vec<TrialOutcome>,
}

pub fn run_roc_trials(sc: &Scenario) -> Result<RocRun> {
    Ok(RocRun {
        h0: run_trials(sc, Hypothesis::H0, sc.num_trials)?,
        h1: run_trials(sc, Hypothesis::H1, sc.num_trials)?,
    })
}

pub fn roc_table(sc: &Scenario, run: &RocRun) -> ResultTable {
    let mut table = ResultTable::default();
    for kind in DetectorKind::ALL {
        for &p in &sc.far_grid {
            let detections = run
                .h1
                .iter()
                .filter(|o| o.statistic(kind).p_value() < p)
                .count();
            let false_alarms = run
                .h0
                .iter()
                .filter(|o| o.statistic(kind).p_value() < p)
                .count();
            // Under shadowing the per-user SNRs are random draws, so no
            // single snr_db describes the row.
            let snr_db = (!sc.shadowing).then(|| sc.channel.snr_db());
            table.push(rate_row(
                sc,
                kind,
                snr_db,
                p,
                Some((detections, run.h1.len())),
                Some((false_alarms, run.h0.len())),
            ));
        }
    }
    table
}

/// Empirical (Pd, FAR) per detector over the configured false-alarm grid.
pub fn estimate_roc(sc: &Scenario) -> Result<ResultTable> {
    Ok(roc_table(sc, &run_roc_trials(sc)?))
}

/// Cooperation experiment: the detection curve for a single user and for the
/// configured user count, side by side.
pub fn estimate_cooperation_curves(sc: &Scenario) -> Result<ResultTable> {
    let mut table = estimate_detection_curve(&sc.with_num_users(1))?;
    if sc.num_users > 1 {
        table.extend(estimate_detection_curve(sc)?);
    }
    Ok(table)
}

/// Shadowing experiment: per-user SNRs drawn from the dB-domain Gaussian,
/// ROC rows for one user and for the configured user count side by side.
pub fn run_shadowing_experiment(sc: &Scenario) -> Result<ResultTable> {
    let mut shadowed = sc.clone();
    shadowed.shadowing = true;
    let single = shadowed.with_num_users(1);
    let mut table = roc_table(&single, &run_roc_trials(&single)?);
    if shadowed.num_users > 1 {
        table.extend(roc_table(&shadowed, &run_roc_trials(&shadowed)?));
    }
    Ok(table)
}

/// Per-trial raw dump: one row per (trial, detector), with the per-user SNRs
/// attached to every row.
pub fn trial_dump_csv(outcomes: &[TrialOutcome]) -> String {
    let mut out = String::from(
        "trial_index,hypothesis,detector_kind,value,p_value,decision,per_user_snrs_db\n",
    );
    for (trial, outcome) in outcomes.iter().enumerate() {
        let snrs = outcome
            .per_user_snrs_db
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(";");
        for kind in DetectorKind::ALL {
            let stat = outcome.statistic(kind);
            out.push_str(&format!(
                "{},{},{},{},{:e},{},{}\n",
                trial,
                outcome.hypothesis.label(),
                kind.label(),
                stat.value(),
                stat.p_value(),
                outcome.decision(kind),
                snrs,
            ));
        }
    }
    out
}

/// Per-user report rows as the fusion center would receive them.
pub fn report_dump_csv(sc: &Scenario, outcomes: &[TrialOutcome]) -> String {
    let mut out = String::from("trial_index,user_id,alpha,statistic,quantized_statistic\n");
    for (trial, outcome) in outcomes.iter().enumerate() {
        for (user, (row, qrow)) in outcome
            .per_user_stats
            .iter()
            .zip(&outcome.per_user_quantized)
            .enumerate()
        {
            for (freq, (&value, &quantized)) in row.iter().zip(qrow).enumerate() {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    trial, user, sc.alphas[freq], value, quantized,
                ));
            }
        }
    }
    out
}
