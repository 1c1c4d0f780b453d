//! Spectral smoothing windows.

use crate::{Error, Result, Scalar};

/// Zeroth-order modified Bessel function of the first kind, by power series.
fn bessel_i0<T: Scalar>(x: T) -> T {
    let q = (x / T::lit(2.0)).powi(2);
    let mut term = T::one();
    let mut sum = T::one();
    let mut k = 1usize;
    loop {
        let kf = T::from_count(k);
        term = term * q / (kf * kf);
        sum += term;
        if term <= sum * T::epsilon() || k > 1000 {
            return sum;
        }
        k += 1;
    }
}

/// Kaiser window of length `len` with shape parameter `beta`, peak value 1.
pub fn kaiser<T: Scalar>(len: usize, beta: T) -> Result<Vec<T>> {
    if len == 0 {
        return Err(Error::Config("window length must be >= 1".into()));
    }
    if beta < T::zero() || !beta.is_finite() {
        return Err(Error::Config(format!(
            "Kaiser beta must be finite and >= 0, got {beta}"
        )));
    }
    if len == 1 {
        return Ok(vec![T::one()]);
    }
    let denom = bessel_i0(beta);
    let span = T::from_count(len - 1);
    Ok((0..len)
        .map(|i| {
            let r = T::lit(2.0) * T::from_count(i) / span - T::one();
            bessel_i0(beta * (T::one() - r * r).sqrt()) / denom
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_i0_reference_points() {
        // Abramowitz & Stegun 9.8: I0(0)=1, I0(1)=1.2660658, I0(2)=2.2795853.
        assert!((bessel_i0(0.0_f64) - 1.0).abs() < 1e-15);
        assert!((bessel_i0(1.0_f64) - 1.266_065_877_752_008).abs() < 1e-12);
        assert!((bessel_i0(2.0_f64) - 2.279_585_302_336_067).abs() < 1e-12);
    }

    #[test]
    fn kaiser_shape() {
        let w = kaiser(9, 10.0_f64).unwrap();
        assert_eq!(w.len(), 9);
        // Symmetric, peak 1 at the center, endpoints 1/I0(beta).
        for i in 0..9 {
            assert!((w[i] - w[8 - i]).abs() < 1e-14);
            assert!(w[i] > 0.0 && w[i] <= 1.0 + 1e-15);
        }
        assert!((w[4] - 1.0).abs() < 1e-14);
        assert!((w[0] - 1.0 / bessel_i0(10.0)).abs() < 1e-14);
    }

    #[test]
    fn beta_zero_is_rectangular() {
        let w = kaiser(7, 0.0_f64).unwrap();
        for v in w {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(kaiser::<f64>(0, 1.0).is_err());
        assert!(kaiser(5, -1.0_f64).is_err());
        assert!(kaiser(5, f64::NAN).is_err());
    }
}
