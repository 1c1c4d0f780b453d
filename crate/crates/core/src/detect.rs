//! GLRT statistics for the presence of cyclostationarity and their
//! threshold decisions.
//!
//! At a single cyclic frequency the statistic is the quadratic form
//! `T = M · r̂ Σ̂⁻¹ r̂ᵀ`, asymptotically chi-square with `2N` degrees of
//! freedom under the null. Across a set of frequencies either the maximum or
//! the sum of the per-frequency statistics is used.

use crate::dist::chi2_sf_even;
use crate::estimation::{
    CyclicFeatureVector, CyclicFrequencySet, FeatureCovariance, LagSet, SmootherSpec,
};
use crate::{Error, Result, Scalar};

/// Which detector produced a statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatisticKind {
    SingleCycle,
    MultiMax,
    MultiSum,
}

/// A test-statistic value with its null-law parameters and p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CyclicStatistic<T> {
    value: T,
    dof: usize,
    num_freqs: usize,
    p_value: T,
    kind: StatisticKind,
}

impl<T: Scalar> CyclicStatistic<T> {
    fn check_value(value: T) -> Result<T> {
        if !value.is_finite() || value < T::zero() {
            return Err(Error::Domain(format!(
                "statistic value must be finite and >= 0, got {value}"
            )));
        }
        Ok(value)
    }

    /// Statistic for one cyclic frequency (or a sum of such statistics over
    /// users); null law chi-square with `dof` degrees of freedom.
    pub fn single_cycle(value: T, dof: usize) -> Result<Self> {
        let value = Self::check_value(value)?;
        Ok(Self {
            value,
            dof,
            num_freqs: 1,
            p_value: chi2_sf_even(value, dof)?,
            kind: StatisticKind::SingleCycle,
        })
    }

    /// Maximum over `num_freqs` frequencies of chi-square(`dof`) statistics.
    pub fn multi_max(value: T, dof: usize, num_freqs: usize) -> Result<Self> {
        let value = Self::check_value(value)?;
        if num_freqs == 0 {
            return Err(Error::Domain("maximum over zero frequencies".into()));
        }
        // 1 - F^d evaluated as -expm1(d·log1p(-sf)) so small p-values keep
        // their precision.
        let sf = chi2_sf_even(value, dof)?;
        let d = T::from_count(num_freqs);
        let p_value = -(d * (-sf).ln_1p()).exp_m1();
        Ok(Self {
            value,
            dof,
            num_freqs,
            p_value: p_value.max(T::zero()).min(T::one()),
            kind: StatisticKind::MultiMax,
        })
    }

    /// Sum over frequencies; `dof` is the total degrees of freedom.
    pub fn multi_sum(value: T, dof: usize, num_freqs: usize) -> Result<Self> {
        let value = Self::check_value(value)?;
        if num_freqs == 0 {
            return Err(Error::Domain("sum over zero frequencies".into()));
        }
        Ok(Self {
            value,
            dof,
            num_freqs,
            p_value: chi2_sf_even(value, dof)?,
            kind: StatisticKind::MultiSum,
        })
    }

    pub fn value(&self) -> T {
        self.value
    }

    /// Degrees of freedom of the null law (for `MultiMax`, of each of the
    /// `num_freqs` variables the maximum is taken over).
    pub fn dof(&self) -> usize {
        self.dof
    }

    pub fn num_freqs(&self) -> usize {
        self.num_freqs
    }

    pub fn p_value(&self) -> T {
        self.p_value
    }

    pub fn kind(&self) -> StatisticKind {
        self.kind
    }
}

/// Full description of a detector: frequencies, lags, smoothing window,
/// statistic family and target false alarm rate.
#[derive(Debug, Clone)]
pub struct DetectorSpec<T> {
    freq_set: CyclicFrequencySet<T>,
    lag_set: LagSet,
    smoother: SmootherSpec<T>,
    false_alarm_rate: T,
    statistic_kind: StatisticKind,
}

impl<T: Scalar> DetectorSpec<T> {
    pub fn new(
        freq_set: CyclicFrequencySet<T>,
        lag_set: LagSet,
        smoother: SmootherSpec<T>,
        false_alarm_rate: T,
        statistic_kind: StatisticKind,
    ) -> Result<Self> {
        if !(false_alarm_rate > T::zero() && false_alarm_rate < T::one()) {
            return Err(Error::Config(format!(
                "false alarm rate must lie in (0, 1), got {false_alarm_rate}"
            )));
        }
        Ok(Self {
            freq_set,
            lag_set,
            smoother,
            false_alarm_rate,
            statistic_kind,
        })
    }

    pub fn freq_set(&self) -> &CyclicFrequencySet<T> {
        &self.freq_set
    }

    pub fn lag_set(&self) -> &LagSet {
        &self.lag_set
    }

    pub fn smoother(&self) -> &SmootherSpec<T> {
        &self.smoother
    }

    pub fn false_alarm_rate(&self) -> T {
        self.false_alarm_rate
    }

    pub fn statistic_kind(&self) -> StatisticKind {
        self.statistic_kind
    }
}

/// Gaussian elimination with partial pivoting; returns the solution of
/// `A x = b` and the max/min pivot magnitude ratio as a cheap condition
/// estimate.
fn solve_with_cond<T: Scalar>(a: &[T], dim: usize, b: &[T]) -> Option<(Vec<T>, T)> {
    let mut m = a.to_vec();
    let mut rhs = b.to_vec();
    let mut max_piv = T::zero();
    let mut min_piv = T::infinity();
    for col in 0..dim {
        let mut best = col;
        let mut best_val = m[col * dim + col].abs();
        for row in col + 1..dim {
            let v = m[row * dim + col].abs();
            if v > best_val {
                best = row;
                best_val = v;
            }
        }
        if best_val <= T::zero() || !best_val.is_finite() {
            return None;
        }
        if best != col {
            for c in 0..dim {
                m.swap(col * dim + c, best * dim + c);
            }
            rhs.swap(col, best);
        }
        max_piv = max_piv.max(best_val);
        min_piv = min_piv.min(best_val);
        let pivot = m[col * dim + col];
        for row in col + 1..dim {
            let factor = m[row * dim + col] / pivot;
            if factor != T::zero() {
                for c in col..dim {
                    let v = m[col * dim + c];
                    m[row * dim + c] -= factor * v;
                }
                rhs[row] = rhs[row] - factor * rhs[col];
            }
        }
    }
    let mut x = vec![T::zero(); dim];
    for row in (0..dim).rev() {
        let mut acc = rhs[row];
        for c in row + 1..dim {
            acc -= m[row * dim + c] * x[c];
        }
        x[row] = acc / m[row * dim + row];
    }
    if x.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some((x, max_piv / min_piv))
}

/// The single-frequency GLRT statistic `T = M · r̂ Σ̂⁻¹ r̂ᵀ`.
///
/// The covariance system is solved rather than inverted. If the pivot-ratio
/// condition estimate exceeds `1e12` (or elimination breaks down) a ridge
/// `δ·I` with `δ = 1e-8 · trace(Σ̂)/2N` is added and escalated until the
/// solve succeeds.
pub fn single_cycle_statistic<T: Scalar>(
    r: &CyclicFeatureVector<T>,
    cov: &FeatureCovariance<T>,
) -> Result<CyclicStatistic<T>> {
    let dim = cov.dim();
    if r.values().len() != dim {
        return Err(Error::Domain(format!(
            "feature vector has {} entries, covariance is {dim}×{dim}",
            r.values().len()
        )));
    }
    if r.values().iter().any(|v| !v.is_finite()) || cov.sigma().iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(
            "non-finite feature vector or covariance".into(),
        ));
    }

    let m = T::from_count(r.sample_count());
    let trace = (0..dim).fold(T::zero(), |acc, i| acc + cov.sigma_at(i, i));
    let ridge_unit = if trace > T::zero() {
        trace / T::from_count(dim)
    } else {
        T::one()
    };
    let norm_sq = r.values().iter().fold(T::zero(), |acc, &v| acc + v * v);
    // Scale of the quadratic form if Σ̂ were trace-matched to the identity;
    // used to tell rounding noise from genuinely negative forms.
    let form_scale = (m * norm_sq / ridge_unit).max(T::one());

    let cond_limit = T::lit(1e12);
    for (attempt, ridge) in [0.0, 1e-8, 1e-6, 1e-4, 1e-2].into_iter().enumerate() {
        let last = attempt == 4;
        let delta = ridge_unit * T::lit(ridge);
        let mut a = cov.sigma().to_vec();
        for d in 0..dim {
            a[d * dim + d] += delta;
        }
        if let Some((y, cond)) = solve_with_cond(&a, dim, r.values()) {
            if cond <= cond_limit || last {
                let quad = m * r
                    .values()
                    .iter()
                    .zip(&y)
                    .fold(T::zero(), |acc, (&ri, &yi)| acc + ri * yi);
                if quad.is_finite() && quad >= -T::lit(1e-9) * form_scale {
                    return CyclicStatistic::single_cycle(quad.max(T::zero()), dim);
                }
            }
        }
    }
    Err(Error::Numerical(
        "covariance system unsolvable even with ridge regularization".into(),
    ))
}

fn common_single_cycle_dof<T: Scalar>(per_freq: &[CyclicStatistic<T>]) -> Result<usize> {
    let first = per_freq
        .first()
        .ok_or_else(|| Error::Domain("empty per-frequency statistic list".into()))?;
    if per_freq
        .iter()
        .any(|s| s.kind() != StatisticKind::SingleCycle || s.dof() != first.dof())
    {
        return Err(Error::Domain(
            "per-frequency statistics must be single-cycle with equal dof".into(),
        ));
    }
    Ok(first.dof())
}

/// Maximum of the per-frequency statistics.
pub fn multicycle_max<T: Scalar>(per_freq: &[CyclicStatistic<T>]) -> Result<CyclicStatistic<T>> {
    let dof = common_single_cycle_dof(per_freq)?;
    let value = per_freq.iter().map(|s| s.value()).fold(T::zero(), T::max);
    CyclicStatistic::multi_max(value, dof, per_freq.len())
}

/// Sum of the per-frequency statistics; total dof `2N · N_α`.
pub fn multicycle_sum<T: Scalar>(per_freq: &[CyclicStatistic<T>]) -> Result<CyclicStatistic<T>> {
    let dof = common_single_cycle_dof(per_freq)?;
    let value = per_freq.iter().fold(T::zero(), |acc, s| acc + s.value());
    CyclicStatistic::multi_sum(value, dof * per_freq.len(), per_freq.len())
}

/// Threshold decision: `true` rejects the null hypothesis, declaring a
/// cyclostationary signal present.
///
/// The null is rejected when the statistic's null CDF exceeds
/// `1 - false_alarm_rate` — strictly, so exact threshold equality accepts.
/// With p-values kept in survival form this is the comparison
/// `p_value < false_alarm_rate`.
pub fn decide<T: Scalar>(stat: &CyclicStatistic<T>, spec: &DetectorSpec<T>) -> Result<bool> {
    if stat.kind() != spec.statistic_kind() {
        return Err(Error::Domain(format!(
            "statistic kind {:?} does not match detector kind {:?}",
            stat.kind(),
            spec.statistic_kind()
        )));
    }
    match stat.kind() {
        StatisticKind::SingleCycle => {}
        StatisticKind::MultiMax | StatisticKind::MultiSum => {
            if stat.num_freqs() != spec.freq_set().len() {
                return Err(Error::Domain(format!(
                    "statistic covers {} frequencies, detector tests {}",
                    stat.num_freqs(),
                    spec.freq_set().len()
                )));
            }
        }
    }
    if !stat.dof().is_multiple_of(2 * spec.lag_set().len()) {
        return Err(Error::Domain(format!(
            "dof {} inconsistent with {} lags",
            stat.dof(),
            spec.lag_set().len()
        )));
    }
    Ok(stat.p_value() < spec.false_alarm_rate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{feature_covariance, SmoothedSpectra};
    use num_complex::Complex;

    fn identity_cov(n: usize) -> FeatureCovariance<f64> {
        // Q = 0, Q* = 2I gives Σ = I.
        let zero = Complex::new(0.0, 0.0);
        let mut q_star = vec![zero; n * n];
        for i in 0..n {
            q_star[i * n + i] = Complex::new(2.0, 0.0);
        }
        feature_covariance(&SmoothedSpectra::new(n, vec![zero; n * n], q_star).unwrap())
    }

    fn vector(values: Vec<f64>, sample_count: usize) -> CyclicFeatureVector<f64> {
        let n = values.len() / 2;
        let lags = LagSet::new((0..n as i64).collect(), true).unwrap();
        CyclicFeatureVector::from_parts(0.1, values, sample_count, lags).unwrap()
    }

    #[test]
    fn zero_vector_gives_zero_statistic() {
        let cov = identity_cov(1);
        let stat = single_cycle_statistic(&vector(vec![0.0, 0.0], 64), &cov).unwrap();
        assert_eq!(stat.value(), 0.0);
        assert_eq!(stat.p_value(), 1.0);
        assert_eq!(stat.dof(), 2);
    }

    #[test]
    fn identity_covariance_quadratic_form() {
        let cov = identity_cov(1);
        let stat = single_cycle_statistic(&vector(vec![0.3, 0.4], 100), &cov).unwrap();
        assert!((stat.value() - 25.0).abs() < 1e-10);
        assert_eq!(stat.kind(), StatisticKind::SingleCycle);
    }

    #[test]
    fn dimension_mismatch_is_domain_error() {
        let cov = identity_cov(2);
        assert!(single_cycle_statistic(&vector(vec![0.3, 0.4], 100), &cov).is_err());
    }

    #[test]
    fn non_finite_input_is_domain_error() {
        let cov = identity_cov(1);
        assert!(single_cycle_statistic(&vector(vec![f64::NAN, 0.0], 100), &cov).is_err());
    }

    #[test]
    fn singular_covariance_is_regularized_not_fatal() {
        // Q = 0, Q* = 0 gives Σ = 0: solvable only through the ridge.
        let zero = Complex::new(0.0, 0.0);
        let cov = feature_covariance(&SmoothedSpectra::new(1, vec![zero], vec![zero]).unwrap());
        let stat = single_cycle_statistic(&vector(vec![0.3, 0.4], 100), &cov).unwrap();
        assert!(stat.value().is_finite());
        assert!(stat.value() >= 0.0);
    }

    #[test]
    fn multicycle_single_entry_reduces_to_entry() {
        let s = CyclicStatistic::single_cycle(3.7_f64, 4).unwrap();
        let mx = multicycle_max(&[s]).unwrap();
        assert_eq!(mx.value(), 3.7);
        assert!((mx.p_value() - s.p_value()).abs() < 1e-15);
        let sm = multicycle_sum(&[s]).unwrap();
        assert_eq!(sm.value(), 3.7);
        assert_eq!(sm.dof(), 4);
        assert!((sm.p_value() - s.p_value()).abs() < 1e-15);
    }

    #[test]
    fn multicycle_max_takes_maximum() {
        let a = CyclicStatistic::single_cycle(3.1, 4).unwrap();
        let b = CyclicStatistic::single_cycle(7.2, 4).unwrap();
        let mx = multicycle_max(&[a, b]).unwrap();
        assert_eq!(mx.value(), 7.2);
        assert_eq!(mx.num_freqs(), 2);
        assert_eq!(mx.dof(), 4);
    }

    #[test]
    fn multicycle_sum_adds_values_and_dof() {
        let a = CyclicStatistic::single_cycle(3.0, 4).unwrap();
        let b = CyclicStatistic::single_cycle(5.0, 4).unwrap();
        let sm = multicycle_sum(&[a, b]).unwrap();
        assert_eq!(sm.value(), 8.0);
        assert_eq!(sm.dof(), 8);
    }

    #[test]
    fn multicycle_rejects_empty_and_mismatched() {
        assert!(multicycle_max::<f64>(&[]).is_err());
        let a = CyclicStatistic::single_cycle(1.0, 4).unwrap();
        let b = CyclicStatistic::single_cycle(1.0, 2).unwrap();
        assert!(multicycle_max(&[a, b]).is_err());
        let c = multicycle_sum(&[a]).unwrap();
        assert!(multicycle_max(&[a, c]).is_err());
    }

    fn spec(kind: StatisticKind, p: f64) -> DetectorSpec<f64> {
        DetectorSpec::new(
            CyclicFrequencySet::new(vec![0.025, 0.05]).unwrap(),
            LagSet::new(vec![32, -32], true).unwrap(),
            SmootherSpec::rectangular(3).unwrap(),
            p,
            kind,
        )
        .unwrap()
    }

    #[test]
    fn zero_statistic_never_rejects() {
        let stat = CyclicStatistic::single_cycle(0.0, 4).unwrap();
        let sp = spec(StatisticKind::SingleCycle, 0.999);
        assert!(!decide(&stat, &sp).unwrap());
    }

    #[test]
    fn decision_boundary_at_chi_square_quantile() {
        let sp = spec(StatisticKind::SingleCycle, 0.05);
        let above = CyclicStatistic::single_cycle(9.4878, 4).unwrap();
        let below = CyclicStatistic::single_cycle(9.4876, 4).unwrap();
        assert!(decide(&above, &sp).unwrap());
        assert!(!decide(&below, &sp).unwrap());
    }

    #[test]
    fn decide_checks_consistency() {
        let sp = spec(StatisticKind::MultiMax, 0.05);
        let single = CyclicStatistic::single_cycle(1.0, 4).unwrap();
        assert!(decide(&single, &sp).is_err());
        let wrong_freqs = CyclicStatistic::multi_max(1.0, 4, 3).unwrap();
        assert!(decide(&wrong_freqs, &sp).is_err());
        let odd_dof = CyclicStatistic::multi_max(1.0, 6, 2).unwrap();
        assert!(decide(&odd_dof, &sp).is_err());
        let ok = CyclicStatistic::multi_max(1.0, 4, 2).unwrap();
        assert!(decide(&ok, &sp).is_ok());
    }

    #[test]
    fn detector_spec_validates_false_alarm_rate() {
        let freq = CyclicFrequencySet::new(vec![0.025]).unwrap();
        let lags = LagSet::new(vec![32], true).unwrap();
        let sm = SmootherSpec::rectangular(3).unwrap();
        assert!(DetectorSpec::new(
            freq.clone(),
            lags.clone(),
            sm.clone(),
            0.0,
            StatisticKind::SingleCycle
        )
        .is_err());
        assert!(DetectorSpec::new(freq, lags, sm, 1.0, StatisticKind::SingleCycle).is_err());
    }
}
