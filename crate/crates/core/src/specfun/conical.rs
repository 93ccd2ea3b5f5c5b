//! Conical function of the first kind and the overlap kernel Λ built from it.

use crate::error::{domain, Result};
use std::f64::consts::PI;

/// Below this hyperbolic angle the ratio `sin(qα)/(q sinh α)` uses its
/// quadratic Taylor polynomial.
const SMALL_ANGLE: f64 = 1e-6;

/// `sin(qα)/q`, continuous at `q = 0`.
fn sin_over_q(q: f64, alpha: f64) -> f64 {
    if q == 0.0 {
        alpha
    } else {
        (q * alpha).sin() / q
    }
}

/// `sin(qα)/(q sinh α)` with the removable singularity at `α = 0` handled.
fn ratio(q: f64, alpha: f64, sinh_alpha: f64) -> f64 {
    if alpha < SMALL_ANGLE {
        1.0 - (q * q + 1.0) * alpha * alpha / 6.0
    } else {
        sin_over_q(q, alpha) / sinh_alpha
    }
}

/// `P_{-1/2+iq}(u) = √(2/(π sinh α)) · sin(qα)/q` with `u = cosh α`.
///
/// This normalisation vanishes at `u = 1`.
pub fn conical_p(q: f64, u: f64) -> Result<f64> {
    if !(u >= 1.0) || !u.is_finite() {
        return Err(domain(format!(
            "conical function needs finite u >= 1, got {u}"
        )));
    }
    if u == 1.0 {
        return Ok(0.0);
    }
    let w = u - 1.0;
    let sinh_alpha = (w * (w + 2.0)).sqrt();
    let alpha = (w + sinh_alpha).ln_1p();
    Ok((2.0 / (PI * sinh_alpha)).sqrt() * sin_over_q(q, alpha))
}

/// The overlap kernel `Λ(q, Δξ, Δx̄) = √(sech Δξ) · sin(qα)/(q sinh α)`, where
/// `cosh α = cosh Δξ + (Δx̄²/2) sech Δξ`.
///
/// Even in `q` and in `Δx̄`, with `Λ(q, 0, 0) = 1`.
pub fn lambda_overlap(q: f64, delta_xi: f64, delta_xbar: f64) -> f64 {
    let cosh_xi = delta_xi.cosh();
    let s = (0.5 * delta_xi).sinh();
    // cosh α - 1, assembled without cancellation.
    let w = 2.0 * s * s + 0.5 * delta_xbar * delta_xbar / cosh_xi;
    if !w.is_finite() {
        return 0.0;
    }
    let sinh_alpha = (w * (w + 2.0)).sqrt();
    let alpha = (w + sinh_alpha).ln_1p();
    ratio(q, alpha, sinh_alpha) / cosh_xi.sqrt()
}

/// Λ restricted to `Δx̄ = 0`: `sin(qΔξ)/q · csch Δξ / √cosh Δξ`.
pub fn lambda_axis_xi(q: f64, delta_xi: f64) -> f64 {
    let a = delta_xi.abs();
    ratio(q, a, a.sinh()) / a.cosh().sqrt()
}

/// Λ restricted to `Δξ = 0`: `sin(qg)/q · csch g` with `g = 2 asinh(Δx̄/2)`.
pub fn lambda_axis_xbar(q: f64, delta_xbar: f64) -> f64 {
    let g = 2.0 * (0.5 * delta_xbar.abs()).asinh();
    ratio(q, g, g.sinh())
}
