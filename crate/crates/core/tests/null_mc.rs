//! Null-hypothesis Monte Carlo calibration: under pure complex white noise
//! the detector statistics must follow their stated asymptotic laws.

use std::sync::OnceLock;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use cyclodet::detect::{
    decide, multicycle_max, multicycle_sum, single_cycle_statistic, CyclicStatistic, DetectorSpec,
    StatisticKind,
};
use cyclodet::dist::{chi2_cdf_even, max_cdf};
use cyclodet::estimation::{
    feature_covariance, CyclicFrequencySet, LagProducts, LagSet, SmootherSpec,
};
use cyclodet::signal::{apply_awgn, ComplexSeries};

const M: usize = 4000;
const ALPHAS: [f64; 2] = [1.0 / 40.0, 2.0 / 40.0];
const TRIALS: usize = 10_000;

fn unit_noise(seed: u64) -> ComplexSeries<f64> {
    let zero = ComplexSeries::new(vec![Complex::new(0.0, 0.0); M]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    apply_awgn(&zero, 0.0, &mut rng)
}

fn lag_set() -> LagSet {
    LagSet::new(vec![32, -32], true).unwrap()
}

fn smoother() -> SmootherSpec<f64> {
    SmootherSpec::kaiser(2049, 10.0).unwrap()
}

/// Per-frequency single-cycle statistics for one record.
fn per_freq_stats(x: &ComplexSeries<f64>) -> Vec<CyclicStatistic<f64>> {
    let lp = LagProducts::compute(x, &lag_set()).unwrap();
    let sm = smoother();
    ALPHAS
        .iter()
        .map(|&alpha| {
            let r = lp.feature_vector(alpha);
            let cov = feature_covariance(&lp.smoothed_spectra(alpha, &sm).unwrap());
            single_cycle_statistic(&r, &cov).unwrap()
        })
        .collect()
}

type NullDraw = (
    CyclicStatistic<f64>,
    CyclicStatistic<f64>,
    CyclicStatistic<f64>,
);

/// One shared 10000-trial single-user null run: (T(α₁), D_m, D_s) per trial.
fn null_draws() -> &'static Vec<NullDraw> {
    static CELL: OnceLock<Vec<NullDraw>> = OnceLock::new();
    CELL.get_or_init(|| {
        (0..TRIALS as u64)
            .into_par_iter()
            .map(|trial| {
                let x = unit_noise(0xA100_0000 + trial);
                let per_freq = per_freq_stats(&x);
                let dm = multicycle_max(&per_freq).unwrap();
                let ds = multicycle_sum(&per_freq).unwrap();
                (per_freq[0], dm, ds)
            })
            .collect()
    })
}

fn ks_distance(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn single_cycle_null_mean_matches_dof() {
    let draws = null_draws();
    let mean: f64 = draws.iter().map(|(t, _, _)| t.value()).sum::<f64>() / draws.len() as f64;
    assert!((mean - 4.0).abs() / 4.0 < 0.02, "mean T = {mean}");
}

#[test]
fn single_cycle_null_cdf_matches_chi2_4() {
    let values: Vec<f64> = null_draws().iter().map(|(t, _, _)| t.value()).collect();
    let ks = ks_distance(values, |x| chi2_cdf_even(x, 4).unwrap());
    assert!(ks < 0.03, "KS distance {ks}");
}

#[test]
fn multicycle_max_null_cdf_matches_max_law() {
    let values: Vec<f64> = null_draws().iter().map(|(_, dm, _)| dm.value()).collect();
    let ks = ks_distance(values, |x| max_cdf(x, 4, 2).unwrap());
    assert!(ks < 0.03, "KS distance {ks}");
}

#[test]
fn multicycle_sum_null_mean_matches_dof() {
    let draws = null_draws();
    let mean: f64 = draws.iter().map(|(_, _, ds)| ds.value()).sum::<f64>() / draws.len() as f64;
    assert!((mean - 8.0).abs() / 8.0 < 0.02, "mean D_s = {mean}");
}

#[test]
fn multicycle_sum_null_cdf_matches_chi2_8() {
    let values: Vec<f64> = null_draws().iter().map(|(_, _, ds)| ds.value()).collect();
    let ks = ks_distance(values, |x| chi2_cdf_even(x, 8).unwrap());
    assert!(ks < 0.03, "KS distance {ks}");
}

#[test]
fn decide_holds_the_false_alarm_rate() {
    let spec = DetectorSpec::new(
        CyclicFrequencySet::new(vec![ALPHAS[0]]).unwrap(),
        lag_set(),
        smoother(),
        0.05,
        StatisticKind::SingleCycle,
    )
    .unwrap();
    let rejections = null_draws()
        .iter()
        .filter(|(t, _, _)| decide(t, &spec).unwrap())
        .count();
    let far = rejections as f64 / TRIALS as f64;
    assert!((0.04..=0.06).contains(&far), "empirical FAR {far}");
}

/// Shared K=5 null run for the fusion rules: per-user per-frequency values.
fn fused_null_draws() -> &'static Vec<Vec<Vec<f64>>> {
    static CELL: OnceLock<Vec<Vec<Vec<f64>>>> = OnceLock::new();
    CELL.get_or_init(|| {
        (0..TRIALS as u64)
            .into_par_iter()
            .map(|trial| {
                (0..5u64)
                    .map(|user| {
                        let x = unit_noise(0xB200_0000 + trial * 8 + user);
                        per_freq_stats(&x).iter().map(|s| s.value()).collect()
                    })
                    .collect()
            })
            .collect()
    })
}

#[test]
fn fused_single_cycle_null_cdf_matches_chi2_20() {
    use cyclodet::fusion::fuse_single_cycle;
    let values: Vec<f64> = fused_null_draws()
        .iter()
        .map(|users| {
            let col: Vec<f64> = users.iter().map(|row| row[0]).collect();
            fuse_single_cycle(&col, 4).unwrap().value()
        })
        .collect();
    let ks = ks_distance(values, |x| chi2_cdf_even(x, 20).unwrap());
    assert!(ks < 0.03, "KS distance {ks}");
}

#[test]
fn fused_rules_hold_the_false_alarm_rate() {
    use cyclodet::fusion::{fuse_multicycle, fuse_single_cycle, FusionMode};
    let p = 0.05;
    let mut rejections = [0usize; 3];
    for users in fused_null_draws() {
        let col: Vec<f64> = users.iter().map(|row| row[0]).collect();
        let fused = [
            fuse_single_cycle(&col, 4).unwrap(),
            fuse_multicycle(users, 4, FusionMode::Max).unwrap(),
            fuse_multicycle(users, 4, FusionMode::Sum).unwrap(),
        ];
        for (count, stat) in rejections.iter_mut().zip(fused) {
            if stat.p_value() < p {
                *count += 1;
            }
        }
    }
    for (label, count) in ["sum-single", "multi-max", "multi-sum"]
        .iter()
        .zip(rejections)
    {
        let far = count as f64 / TRIALS as f64;
        assert!((0.04..=0.06).contains(&far), "{label} FAR {far}");
    }
}
