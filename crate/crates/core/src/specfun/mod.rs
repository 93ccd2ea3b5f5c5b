//! Special functions and the elementary weights built from them.

mod bessel_j0;
mod bessel_k;
mod conical;
mod grid;

pub use bessel_j0::bessel_j0;
pub use bessel_k::{bessel_k_imag, bessel_k_imag_scaled};
pub use conical::{conical_p, lambda_axis_xbar, lambda_axis_xi, lambda_overlap};
pub use grid::{linspace, LambdaGrid};

use crate::error::{domain, Result};
use std::f64::consts::PI;

/// Gaussian switching function `χ(τ) = (2π)^{-1/4} e^{-τ²/(4T²)}`, so that
/// `∫χ² dτ = T`.
pub fn switching(tau: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(domain(format!(
            "interaction time must be positive, got {t}"
        )));
    }
    Ok((2.0 * PI).powf(-0.25) * (-tau * tau / (4.0 * t * t)).exp())
}

/// Unitary Fourier transform of [`switching`]: `(2/π)^{1/4} T e^{-Ω²T²}`.
pub fn gaussian_ft(omega: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(domain(format!(
            "interaction time must be positive, got {t}"
        )));
    }
    Ok((2.0 / PI).powf(0.25) * t * (-omega * omega * t * t).exp())
}

/// `ω/(e^{2πωz} - 1)`. Callers supply `ω, z > 0`.
pub fn planck_weight(omega: f64, z: f64) -> f64 {
    omega / (2.0 * PI * omega * z).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::GaussKronrod;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn gaussian_transform_values() {
        let t = 3.0;
        let peak = gaussian_ft(0.0, t).unwrap();
        assert_relative_eq!(peak, (2.0 / PI).powf(0.25) * t, max_relative = 1e-15);
        assert_relative_eq!(
            gaussian_ft(1.0 / t, t).unwrap(),
            peak * (-1f64).exp(),
            max_relative = 1e-15
        );
        assert_eq!(gaussian_ft(-0.7, t).unwrap(), gaussian_ft(0.7, t).unwrap());
        assert!(gaussian_ft(1.0, 0.0).is_err());
        assert!(gaussian_ft(1.0, -1.0).is_err());
    }

    #[test]
    fn parseval() {
        let t = 2.5;
        let gk = GaussKronrod::new(1e-14, 1e-12);
        let freq = gk
            .integrate(|w| gaussian_ft(w, t).unwrap().powi(2), -10.0, 10.0, "freq")
            .unwrap()
            .value;
        let time = gk
            .integrate(|s| switching(s, t).unwrap().powi(2), -60.0, 60.0, "time")
            .unwrap()
            .value;
        assert_abs_diff_eq!(freq, time, epsilon = 1e-8);
        assert_abs_diff_eq!(time, t, epsilon = 1e-8);
    }

    #[test]
    fn transform_matches_fourier_integral() {
        // (1/√2π) ∫ χ(τ) cos(Ωτ) dτ, the sine part vanishing by parity.
        let t = 1.3;
        for &w in &[0.0, 0.4, 1.1] {
            let direct = GaussKronrod::new(1e-14, 1e-12)
                .integrate(
                    |s| switching(s, t).unwrap() * (w * s).cos(),
                    -40.0,
                    40.0,
                    "ft",
                )
                .unwrap()
                .value
                / (2.0 * PI).sqrt();
            assert_abs_diff_eq!(direct, gaussian_ft(w, t).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn planck_values() {
        let e2pi = 2.0 * PI;
        let mut exp = 1.0;
        let mut term = 1.0;
        for k in 1..80 {
            term *= e2pi / k as f64;
            exp += term;
        }
        assert_relative_eq!(
            planck_weight(1.0, 1.0),
            1.0 / (exp - 1.0),
            max_relative = 1e-13
        );
        assert_abs_diff_eq!(planck_weight(1.0, 1.0), 1.870_936_6e-3, epsilon = 1e-10);
        assert_abs_diff_eq!(planck_weight(1.0, 0.5), 0.045_165_705_4, epsilon = 1e-10);
        for &q in &[2.0, 3.0, 5.0] {
            let boltzmann = (-2.0 * PI * q).exp();
            assert!((planck_weight(1.0, q) - boltzmann).abs() < 0.01 * boltzmann);
        }
        let mut prev = f64::INFINITY;
        for k in 1..50 {
            let v = planck_weight(1.3, 0.1 * k as f64);
            assert!(v > 0.0 && v < prev);
            prev = v;
        }
    }
}
