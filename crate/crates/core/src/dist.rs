//! Null distributions of the test statistics.
//!
//! The detector statistics are asymptotically chi-square with an even number
//! of degrees of freedom, so the CDF has the closed form
//!
//! ```text
//! F(x, 2N) = 1 - e^{-x/2} Σ_{n=0}^{N-1} (x/2)^n / n!
//! ```
//!
//! and the maximum of `d` independent such variables has CDF `F(x, 2N)^d`.
//! Survival probabilities are computed from the exponential-times-series term
//! directly, never as `1 - F`, so p-values keep full precision for large `x`.

use crate::{Error, Result, Scalar};

fn half_dof(dof: usize) -> Result<usize> {
    if dof == 0 || !dof.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "degrees of freedom must be a positive even integer, got {dof}"
        )));
    }
    Ok(dof / 2)
}

fn check_x<T: Scalar>(x: T) -> Result<()> {
    if x.is_nan() || x < T::zero() {
        return Err(Error::Domain(format!("statistic must be >= 0, got {x}")));
    }
    Ok(())
}

/// Survival function `1 - F(x, dof)` of the chi-square distribution with an
/// even number of degrees of freedom, `e^{-x/2} Σ_{n<dof/2} (x/2)^n / n!`.
pub fn chi2_sf_even<T: Scalar>(x: T, dof: usize) -> Result<T> {
    let n = half_dof(dof)?;
    check_x(x)?;
    if x.is_infinite() {
        return Ok(T::zero());
    }
    let half = x / T::lit(2.0);
    // Term-recursive Poisson weights: t_0 = e^{-x/2}, t_k = t_{k-1}·(x/2)/k.
    let mut term = (-half).exp();
    let mut sum = term;
    for k in 1..n {
        term = term * half / T::from_count(k);
        sum += term;
    }
    Ok(sum.min(T::one()))
}

/// Chi-square CDF for an even number of degrees of freedom.
pub fn chi2_cdf_even<T: Scalar>(x: T, dof: usize) -> Result<T> {
    Ok(T::one() - chi2_sf_even(x, dof)?)
}

/// CDF of the maximum of `d` i.i.d. chi-square variables with even `dof`:
/// `F(x, dof)^d`.
pub fn max_cdf<T: Scalar>(x: T, dof: usize, d: usize) -> Result<T> {
    if d == 0 {
        return Err(Error::Domain("maximum over zero variables".into()));
    }
    let cdf = chi2_cdf_even(x, dof)?;
    Ok(cdf.powi(d as i32))
}

/// Density of the maximum of `d` i.i.d. chi-square variables with even `dof`.
///
/// Differentiating `F^d` gives `d·F(x,2N)^{d-1}` times the chi-square
/// density; the difference of the two series in the derivative collapses to
/// its last term `e^{-x/2}(x/2)^{N-1}/(N-1)!`.
pub fn max_pdf<T: Scalar>(x: T, dof: usize, d: usize) -> Result<T> {
    if d == 0 {
        return Err(Error::Domain("maximum over zero variables".into()));
    }
    let n = half_dof(dof)?;
    check_x(x)?;
    if x.is_infinite() {
        return Ok(T::zero());
    }
    let half = x / T::lit(2.0);
    let mut term = (-half).exp();
    for k in 1..n {
        term = term * half / T::from_count(k);
    }
    let cdf = chi2_cdf_even(x, dof)?;
    let dh = T::from_count(d) / T::lit(2.0);
    Ok(dh * cdf.powi(d as i32 - 1) * term)
}

/// Inverse of [`chi2_cdf_even`]: the `prob` quantile of the chi-square
/// distribution with even `dof`, located by bracketing and bisection.
pub fn chi2_quantile_even<T: Scalar>(prob: T, dof: usize) -> Result<T> {
    half_dof(dof)?;
    if !(prob > T::zero() && prob < T::one()) {
        return Err(Error::Domain(format!(
            "quantile probability must lie in (0, 1), got {prob}"
        )));
    }
    let mut lo = T::zero();
    let mut hi = T::from_count(dof.max(2));
    let mut guard = 0;
    while chi2_cdf_even(hi, dof)? < prob {
        hi *= T::lit(2.0);
        guard += 1;
        if guard > 200 {
            return Err(Error::Numerical("quantile bracket did not close".into()));
        }
    }
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if chi2_cdf_even(mid, dof)? < prob {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::epsilon() * hi.max(T::one()) {
            break;
        }
    }
    Ok((lo + hi) * T::lit(0.5))
}
