//! Macdonald function of imaginary order, `K_{iν}(x) = ∫₀^∞ e^{-x cosh t} cos(νt) dt`.
//!
//! The integrand is entire and decays doubly-exponentially, so the plain
//! trapezoid rule converges geometrically in the step. The factor `e^{-x}`
//! is pulled out and the tail is cut where `x(cosh t - 1)` passes
//! [`TAIL_EXPONENT`]. The initial step resolves the oscillation period, and
//! halving stops once successive levels agree relative to `∫|integrand|`.

use crate::error::{domain, Error, Result};

const TAIL_EXPONENT: f64 = 45.0;
const REL_TOL: f64 = 1e-14;
const MIN_LEVELS: usize = 3;
const MAX_LEVELS: usize = 14;

/// `e^{x} K_{iν}(x)`, which stays representable for large `x`.
pub fn bessel_k_imag_scaled(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("K_iν needs finite x > 0, got {x}")));
    }
    if !nu.is_finite() {
        return Err(domain(format!("K_iν needs finite order, got {nu}")));
    }
    let nu = nu.abs();
    // x · 2 sinh²(t/2) = TAIL_EXPONENT
    let t_max = 2.0 * ((TAIL_EXPONENT / (2.0 * x)).sqrt()).asinh();
    let f = |t: f64| {
        let s = (0.5 * t).sinh();
        (-2.0 * x * s * s).exp() * (nu * t).cos()
    };

    let h0 = (t_max / 8.0).min(0.8 / nu.max(1.0));
    let mut h = h0;
    let n0 = (t_max / h).ceil() as usize;
    let mut sum = 0.5 * f(0.0);
    let mut abs_sum = 0.5;
    for k in 1..=n0 {
        let v = f(k as f64 * h);
        sum += v;
        abs_sum += v.abs();
    }
    let mut estimate = h * sum;
    let mut n = n0;
    let mut evaluations = n0 + 1;
    for level in 1..=MAX_LEVELS {
        // New midpoints at odd multiples of h/2.
        let half = 0.5 * h;
        let mut odd = 0.0;
        let mut odd_abs = 0.0;
        for k in 0..n {
            let v = f((2 * k + 1) as f64 * half);
            odd += v;
            odd_abs += v.abs();
        }
        evaluations += n;
        sum += odd;
        abs_sum += odd_abs;
        h = half;
        n *= 2;
        let next = h * sum;
        let scale = h * abs_sum;
        let diff = (next - estimate).abs();
        estimate = next;
        if level + 1 >= MIN_LEVELS && diff <= REL_TOL * scale {
            return Ok(estimate);
        }
        if level == MAX_LEVELS {
            return Err(Error::Convergence {
                what: "K_iν trapezoid",
                estimate,
                error: diff,
                evaluations,
            });
        }
    }
    unreachable!()
}

pub fn bessel_k_imag(nu: f64, x: f64) -> Result<f64> {
    Ok(bessel_k_imag_scaled(nu, x)? * (-x).exp())
}
