//! Combining local test statistics from `K` cooperating sensors.
//!
//! Each sensor reports its (optionally quantized) per-frequency GLRT values;
//! the combiner sums them across users, which under conditional independence
//! keeps the chi-square null machinery with `K`-scaled degrees of freedom.
//! Very coarse reporting degenerates to binary decisions counted against a
//! vote threshold.

use crate::detect::CyclicStatistic;
use crate::dist::chi2_quantile_even;
use crate::{Error, Result, Scalar};

/// How a reported statistic value is quantized before fusion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuantizerSpec<T> {
    /// Full-precision reporting.
    Exact,
    /// Uniform mid-rise quantizer with `2^bits` level centers over
    /// `[0, clip_max]`; inputs above `clip_max` saturate.
    Uniform { bits: u32, clip_max: T },
}

impl<T: Scalar> QuantizerSpec<T> {
    pub fn uniform(bits: u32, clip_max: T) -> Result<Self> {
        if bits == 0 || bits > 52 {
            return Err(Error::Config(format!(
                "quantizer bits must be in 1..=52, got {bits}"
            )));
        }
        if clip_max <= T::zero() || !clip_max.is_finite() {
            return Err(Error::Config(format!(
                "quantizer clip level must be positive and finite, got {clip_max}"
            )));
        }
        Ok(Self::Uniform { bits, clip_max })
    }

    /// 8-bit quantizer clipped at the 0.9999 quantile of the local null law.
    pub fn default_uniform_for_dof(dof: usize) -> Result<Self> {
        Self::uniform(8, chi2_quantile_even(T::lit(0.9999), dof)?)
    }
}

/// Applies the quantizer to a nonnegative statistic value; idempotent.
pub fn quantize_statistic<T: Scalar>(value: T, spec: &QuantizerSpec<T>) -> T {
    match *spec {
        QuantizerSpec::Exact => value,
        QuantizerSpec::Uniform { bits, clip_max } => {
            let levels = T::lit(2.0).powi(bits as i32);
            let step = clip_max / levels;
            let clipped = value.max(T::zero()).min(clip_max);
            let idx = (clipped / step).floor().min(levels - T::one());
            (idx + T::lit(0.5)) * step
        }
    }
}

/// Network-level fusion rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FusionRule {
    SumSingle,
    MultiMax,
    MultiSum,
    BinaryCount,
}

/// Multicycle combining mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FusionMode {
    Max,
    Sum,
}

fn check_values<T: Scalar>(values: &[T]) -> Result<()> {
    if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < T::zero()) {
        return Err(Error::Domain(format!(
            "reported statistics must be finite and >= 0, got {bad}"
        )));
    }
    Ok(())
}

/// Sum of `K` single-frequency statistics, each chi-square with
/// `dof_per_user` degrees of freedom under the null; the fused statistic is
/// chi-square with `K · dof_per_user`.
pub fn fuse_single_cycle<T: Scalar>(
    stats: &[T],
    dof_per_user: usize,
) -> Result<CyclicStatistic<T>> {
    if stats.is_empty() {
        return Err(Error::Domain("no per-user statistics to fuse".into()));
    }
    check_values(stats)?;
    let value = stats.iter().fold(T::zero(), |acc, &v| acc + v);
    CyclicStatistic::single_cycle(value, dof_per_user * stats.len())
}

/// Fuses a `K × N_α` matrix of per-user per-frequency statistics.
///
/// `Max` takes the maximum over frequencies of the per-frequency user sums
/// (each chi-square with `2NK` dof); `Sum` takes the grand total
/// (chi-square with `2N·N_α·K` dof).
pub fn fuse_multicycle<T: Scalar>(
    per_user_per_freq: &[Vec<T>],
    dof_per_user: usize,
    mode: FusionMode,
) -> Result<CyclicStatistic<T>> {
    let num_users = per_user_per_freq.len();
    let num_freqs = per_user_per_freq.first().map_or(0, Vec::len);
    if num_users == 0 || num_freqs == 0 {
        return Err(Error::Domain("per-user statistic matrix is empty".into()));
    }
    for row in per_user_per_freq {
        if row.len() != num_freqs {
            return Err(Error::Domain(format!(
                "inconsistent per-user row lengths: {} vs {num_freqs}",
                row.len()
            )));
        }
        check_values(row)?;
    }
    let freq_sums: Vec<T> = (0..num_freqs)
        .map(|f| {
            per_user_per_freq
                .iter()
                .fold(T::zero(), |acc, row| acc + row[f])
        })
        .collect();
    match mode {
        FusionMode::Max => {
            let value = freq_sums.iter().copied().fold(T::zero(), T::max);
            CyclicStatistic::multi_max(value, dof_per_user * num_users, num_freqs)
        }
        FusionMode::Sum => {
            let value = freq_sums.iter().fold(T::zero(), |acc, &v| acc + v);
            CyclicStatistic::multi_sum(value, dof_per_user * num_freqs * num_users, num_freqs)
        }
    }
}

/// Counting rule over binary local decisions: detect when at least
/// `min_votes` of the `K` users report a detection.
pub fn fuse_binary(decisions: &[bool], min_votes: usize) -> Result<bool> {
    if decisions.is_empty() {
        return Err(Error::Domain("no local decisions to fuse".into()));
    }
    if min_votes == 0 || min_votes > decisions.len() {
        return Err(Error::Config(format!(
            "vote threshold {min_votes} out of range for {} users",
            decisions.len()
        )));
    }
    Ok(decisions.iter().filter(|d| **d).count() >= min_votes)
}

/// Everything a fusion center saw for one sensing interval: the raw per-user
/// per-frequency statistics and the fused result.
#[derive(Debug, Clone)]
pub struct FusionReport<T> {
    num_users: usize,
    per_user_stats: Vec<Vec<T>>,
    fused: CyclicStatistic<T>,
    rule: FusionRule,
}

impl<T: Scalar> FusionReport<T> {
    pub fn new(
        per_user_stats: Vec<Vec<T>>,
        fused: CyclicStatistic<T>,
        rule: FusionRule,
    ) -> Result<Self> {
        let num_users = per_user_stats.len();
        let num_freqs = per_user_stats.first().map_or(0, Vec::len);
        if num_users == 0 || num_freqs == 0 {
            return Err(Error::Domain("per-user statistics must be nonempty".into()));
        }
        if per_user_stats.iter().any(|row| row.len() != num_freqs) {
            return Err(Error::Domain("per-user rows must have equal length".into()));
        }
        Ok(Self {
            num_users,
            per_user_stats,
            fused,
            rule,
        })
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn per_user_stats(&self) -> &[Vec<T>] {
        &self.per_user_stats
    }

    pub fn fused(&self) -> &CyclicStatistic<T> {
        &self.fused
    }

    pub fn rule(&self) -> FusionRule {
        self.rule
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::StatisticKind;

    #[test]
    fn exact_mode_is_identity() {
        assert_eq!(quantize_statistic(7.31, &QuantizerSpec::Exact), 7.31);
    }

    #[test]
    fn one_bit_quantizer_levels() {
        let q = QuantizerSpec::uniform(1, 10.0).unwrap();
        assert_eq!(quantize_statistic(3.0, &q), 2.5);
        assert_eq!(quantize_statistic(6.0, &q), 7.5);
        assert_eq!(quantize_statistic(0.0, &q), 2.5);
        assert_eq!(quantize_statistic(25.0, &q), 7.5);
    }

    #[test]
    fn quantizer_rejects_bad_config() {
        assert!(QuantizerSpec::uniform(0, 10.0).is_err());
        assert!(QuantizerSpec::uniform(8, 0.0).is_err());
        assert!(QuantizerSpec::<f64>::uniform(8, f64::INFINITY).is_err());
    }

    #[test]
    fn default_quantizer_clips_at_null_tail() {
        let q = QuantizerSpec::<f64>::default_uniform_for_dof(4).unwrap();
        match q {
            QuantizerSpec::Uniform { bits, clip_max } => {
                assert_eq!(bits, 8);
                assert!((clip_max - 23.5127424449911).abs() < 1e-6);
            }
            _ => panic!("expected uniform quantizer"),
        }
    }

    #[test]
    fn fuse_single_cycle_sums_values_and_dof() {
        let fused = fuse_single_cycle(&[4.0; 5], 4).unwrap();
        assert_eq!(fused.value(), 20.0);
        assert_eq!(fused.dof(), 20);
        assert_eq!(fused.kind(), StatisticKind::SingleCycle);
    }

    #[test]
    fn fuse_single_cycle_k1_matches_local() {
        let local = CyclicStatistic::single_cycle(6.25, 4).unwrap();
        let fused = fuse_single_cycle(&[6.25], 4).unwrap();
        assert_eq!(fused.value(), local.value());
        assert_eq!(fused.dof(), local.dof());
        assert_eq!(fused.p_value(), local.p_value());
    }

    #[test]
    fn fuse_single_cycle_rejects_bad_input() {
        assert!(fuse_single_cycle::<f64>(&[], 4).is_err());
        assert!(fuse_single_cycle(&[1.0, -0.5], 4).is_err());
        assert!(fuse_single_cycle(&[1.0, f64::NAN], 4).is_err());
    }

    #[test]
    fn fuse_multicycle_modes() {
        let matrix = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        let mx = fuse_multicycle(&matrix, 4, FusionMode::Max).unwrap();
        assert_eq!(mx.value(), 6.0);
        assert_eq!(mx.dof(), 8);
        assert_eq!(mx.num_freqs(), 2);
        let sm = fuse_multicycle(&matrix, 4, FusionMode::Sum).unwrap();
        assert_eq!(sm.value(), 10.0);
        assert_eq!(sm.dof(), 16);
    }

    #[test]
    fn fuse_multicycle_k1_reduces_to_local_multicycle() {
        let a = CyclicStatistic::single_cycle(3.1, 4).unwrap();
        let b = CyclicStatistic::single_cycle(7.2, 4).unwrap();
        let local_max = crate::detect::multicycle_max(&[a, b]).unwrap();
        let local_sum = crate::detect::multicycle_sum(&[a, b]).unwrap();
        let matrix = vec![vec![3.1, 7.2]];
        let fused_max = fuse_multicycle(&matrix, 4, FusionMode::Max).unwrap();
        let fused_sum = fuse_multicycle(&matrix, 4, FusionMode::Sum).unwrap();
        assert_eq!(fused_max.value(), local_max.value());
        assert_eq!(fused_max.p_value(), local_max.p_value());
        assert_eq!(fused_sum.value(), local_sum.value());
        assert_eq!(fused_sum.dof(), local_sum.dof());
        assert_eq!(fused_sum.p_value(), local_sum.p_value());
    }

    #[test]
    fn fuse_multicycle_rejects_ragged_matrix() {
        let matrix = vec![vec![1.0, 2.0], vec![3.0]];
        assert!(fuse_multicycle(&matrix, 4, FusionMode::Sum).is_err());
        assert!(fuse_multicycle::<f64>(&[], 4, FusionMode::Sum).is_err());
    }

    #[test]
    fn binary_voting_rules() {
        let one_true = [true, false, false, false, false];
        assert!(fuse_binary(&one_true, 1).unwrap()); // OR
        let four_true = [true, true, true, true, false];
        assert!(!fuse_binary(&four_true, 5).unwrap()); // AND
        assert!(fuse_binary(&[true, true, false], 2).unwrap()); // majority
        assert!(fuse_binary(&[true], 0).is_err());
        assert!(fuse_binary(&[true], 2).is_err());
        assert!(fuse_binary(&[], 1).is_err());
    }

    #[test]
    fn report_shape_validation() {
        let fused = CyclicStatistic::single_cycle(1.0, 4).unwrap();
        assert!(FusionReport::new(vec![], fused, FusionRule::SumSingle).is_err());
        assert!(FusionReport::new(vec![vec![1.0], vec![]], fused, FusionRule::SumSingle).is_err());
        let ok =
            FusionReport::new(vec![vec![1.0], vec![2.0]], fused, FusionRule::SumSingle).unwrap();
        assert_eq!(ok.num_users(), 2);
    }
}
