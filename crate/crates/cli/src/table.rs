//! Result tables: per-detector empirical rates with Wilson confidence
//! intervals, serialized as CSV.

use std::fmt::Write as _;

/// 95% Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    const Z: f64 = 1.959963984540054;
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let half = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 {
        0.0 // exact at p̂ = 0; the formula only leaves rounding dust
    } else {
        ((center - half) / denom).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        ((center + half) / denom).min(1.0)
    };
    (lo, hi)
}

/// One empirical-rate row. The Wilson interval brackets `empirical_pd` when
/// detection trials were run, otherwise `empirical_far`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub detector_kind: String,
    pub num_users: usize,
    pub snr_db: Option<f64>,
    pub far: Option<f64>,
    pub num_trials: usize,
    pub empirical_pd: Option<f64>,
    pub empirical_far: Option<f64>,
    pub wilson_ci_low: f64,
    pub wilson_ci_high: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    rows: Vec<ResultRow>,
}

impl ResultTable {
    pub const HEADER: &'static str = "detector_kind,num_users,snr_db,far,num_trials,empirical_pd,empirical_far,wilson_ci_low,wilson_ci_high";

    pub fn new(rows: Vec<ResultRow>) -> Self {
        Self { rows }
    }

    pub fn rows(&self) -> &[ResultRow] {
        &self.rows
    }

    pub fn push(&mut self, row: ResultRow) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: ResultTable) {
        self.rows.extend(other.rows);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(Self::HEADER);
        out.push('\n');
        for row in &self.rows {
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                row.detector_kind,
                row.num_users,
                opt(row.snr_db),
                opt(row.far),
                row.num_trials,
                opt(row.empirical_pd),
                opt(row.empirical_far),
                row.wilson_ci_low,
                row.wilson_ci_high,
            )
            .expect("writing to string cannot fail");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_interval_brackets_the_estimate() {
        let (lo, hi) = wilson_interval(500, 1000);
        assert!(lo < 0.5 && 0.5 < hi);
        assert!((lo - 0.4690696003681042).abs() < 1e-12);
        assert!((hi - 0.5309303996318958).abs() < 1e-12);
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0);
        let (lo, hi) = wilson_interval(100, 100);
        assert!(lo < 1.0);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn wilson_width_shrinks_like_inverse_sqrt_trials() {
        // Quadrupling the trial count must halve the width, within 20%.
        let width = |n: usize| {
            let (lo, hi) = wilson_interval(n / 2, n);
            hi - lo
        };
        let ratio = width(2500) / width(10_000);
        assert!((ratio - 2.0).abs() < 0.4, "ratio {ratio}");
    }

    #[test]
    fn csv_shape() {
        let table = ResultTable::new(vec![ResultRow {
            detector_kind: "multi_sum".into(),
            num_users: 5,
            snr_db: Some(-7.0),
            far: Some(0.05),
            num_trials: 100,
            empirical_pd: Some(0.61),
            empirical_far: None,
            wilson_ci_low: 0.51,
            wilson_ci_high: 0.7,
        }]);
        let csv = table.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), ResultTable::HEADER);
        assert_eq!(
            lines.next().unwrap(),
            "multi_sum,5,-7,0.05,100,0.61,,0.51,0.7"
        );
        assert!(lines.next().is_none());
    }
}
