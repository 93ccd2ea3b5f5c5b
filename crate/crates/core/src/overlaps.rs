//! Scalar products between the field states a detector excitation leaves
//! behind on two branches: the large-time closed forms, and an independent
//! finite-time quadrature oracle.
//!
//! The oracle starts from the double integral over the Rindler frequency
//! `ω''` and the transverse momentum `k⊥`, after the rapidity integral and
//! the frequency delta have been done analytically.

use std::f64::consts::PI;
use std::fmt::Write;

use crate::error::{domain, Error, Result};
use crate::geometry::{coherence_condition, delta_xbar, delta_xi, Trajectory};
use crate::io::fmt_csv;
use crate::quad::{linspace_breaks, GaussKronrod, QuadResult};
use crate::specfun::{bessel_j0, bessel_k_imag_scaled, lambda_overlap, planck_weight};

/// `⟨ω,z|ω,z⟩ / T = ω/(2π(e^{2πωz} - 1))`.
pub fn diag_overlap_per_t(omega: f64, z: f64) -> f64 {
    planck_weight(omega, z) / (2.0 * PI)
}

pub fn diag_overlap(omega: f64, z: f64, t: f64) -> f64 {
    t * diag_overlap_per_t(omega, z)
}

/// Exponent `C` of the finite-time suppression `e^{-C}` of a coherence,
/// `C = (ω_j z_m - ω_i z_n)² T² / (z_m² + z_n²)`.
pub fn suppression_exponent(omega_i: f64, z_n: f64, omega_j: f64, z_m: f64, t: f64) -> f64 {
    let d = omega_j * z_m - omega_i * z_n;
    d * d * t * t / (z_m * z_m + z_n * z_n)
}

/// Inverse squared relative width `M = (ω_i z_m + ω_j z_n)² T² / (z_m² + z_n²)`
/// of the Gaussian line shape.
pub fn width_parameter(omega_i: f64, z_n: f64, omega_j: f64, z_m: f64, t: f64) -> f64 {
    let s = omega_i * z_m + omega_j * z_n;
    s * s * t * t / (z_m * z_m + z_n * z_n)
}

/// Weight `∫ e^{-C} dq' = √π √(z_n² + z_m²) / T` of the finite-time line
/// shape, integrated over the partner's Rindler frequency `q' = ω' z_m`
/// about exact coincidence.
pub fn line_weight(z_n: f64, z_m: f64, t: f64) -> f64 {
    PI.sqrt() * z_n.hypot(z_m) / t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapResult {
    /// Real for the Gaussian switching used here.
    pub value: f64,
    pub condition_met: bool,
    /// `q_{jm} = ω_j z_m`.
    pub q: f64,
    /// Finite-time exponent `C`, exposed for borderline cases.
    pub suppression: f64,
}

/// Large-time `⟨ω_i,n|ω_j,m⟩`: `√(d_i d_j) Λ(q_{jm}, Δξ, Δx̄)` when
/// `|ω_j z_m - ω_i z_n| ≤ tol`, zero otherwise.
pub fn offdiag_overlap(
    omega_i: f64,
    traj_n: &Trajectory,
    omega_j: f64,
    traj_m: &Trajectory,
    t: f64,
    tol: f64,
) -> OverlapResult {
    let q = omega_j * traj_m.z;
    let suppression = suppression_exponent(omega_i, traj_n.z, omega_j, traj_m.z, t);
    if !coherence_condition(omega_i, traj_n.z, omega_j, traj_m.z, tol) {
        return OverlapResult {
            value: 0.0,
            condition_met: false,
            q,
            suppression,
        };
    }
    let norm = (diag_overlap(omega_i, traj_n.z, t) * diag_overlap(omega_j, traj_m.z, t)).sqrt();
    let lambda = lambda_overlap(q, delta_xi(traj_m, traj_n), delta_xbar(traj_m, traj_n));
    OverlapResult {
        value: norm * lambda,
        condition_met: true,
        q,
        suppression,
    }
}

/// [`offdiag_overlap`] divided by `T`.
pub fn offdiag_overlap_per_t(
    omega_i: f64,
    traj_n: &Trajectory,
    omega_j: f64,
    traj_m: &Trajectory,
    tol: f64,
) -> OverlapResult {
    offdiag_overlap(omega_i, traj_n, omega_j, traj_m, 1.0, tol)
}

/// Exponent where the Bessel tails are cut.
const TAIL: f64 = 80.0;

/// Λ from its momentum-space representation,
/// `(2 sinh(πq)/(πq)) √cosh Δξ ∫ k̄ J₀(k̄Δx̄) K_{iq}(k̄ s₊) K_{iq}(k̄ s₋) dk̄`
/// with `s± = √((e^{±2Δξ} + 1)/2)`, integrated in `log k̄`.
pub fn oracle_lambda_quadrature(q: f64, delta_xi: f64, delta_xbar: f64) -> Result<QuadResult> {
    if !(q >= 0.0) || !(delta_xbar >= 0.0) {
        return Err(domain(format!(
            "needs q >= 0 and delta_xbar >= 0, got {q}, {delta_xbar}"
        )));
    }
    let s_plus = (0.5 * ((2.0 * delta_xi).exp() + 1.0)).sqrt();
    let s_minus = (0.5 * ((-2.0 * delta_xi).exp() + 1.0)).sqrt();
    let prefactor = if q == 0.0 {
        2.0
    } else {
        2.0 * (PI * q).sinh() / (PI * q)
    } * delta_xi.cosh().sqrt();

    let lo = (1e-7f64).ln();
    let hi = ((TAIL + PI * q) / s_plus.min(s_minus)).ln();
    // About three panels per period of the small-k̄ oscillation in log k̄.
    let panels = 32 + (3.0 * q * (hi - lo) / PI).ceil() as usize;
    let mut failure = None;
    let integrand = |s: f64| {
        let k = s.exp();
        let a = bessel_k_imag_scaled(q, k * s_plus);
        let b = bessel_k_imag_scaled(q, k * s_minus);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                k * k * bessel_j0(k * delta_xbar) * a * b * (-k * (s_plus + s_minus)).exp()
            }
            (Err(e), _) | (_, Err(e)) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let gk = GaussKronrod::new(1e-11 / prefactor, 1e-11)
        .relative_to_l1()
        .with_max_panels(20_000);
    let r = gk.integrate_panels(
        integrand,
        &linspace_breaks(lo, hi, panels),
        "lambda k-bar integral",
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let r = r?;
    Ok(QuadResult {
        value: prefactor * r.value,
        error: prefactor * r.error,
        evaluations: r.evaluations,
    })
}

/// Finite-time overlap from the double quadrature, with its pieces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteTimeOverlap {
    /// Full `⟨ω_i,n|ω_j,m⟩` at time `T`.
    pub value: f64,
    /// Contribution of the Gaussian centred at `+ω̄`.
    pub main: f64,
    /// Contribution of the Gaussian centred at `-ω̄`, kept to show that it
    /// is negligible.
    pub mirror: f64,
    pub error: f64,
    pub suppression: f64,
    pub width: f64,
    /// Line centre `ω̄` in units of the auxiliary parameter.
    pub omega_bar: f64,
    pub evaluations: usize,
}

impl FiniteTimeOverlap {
    pub fn per_t(&self, t: f64) -> f64 {
        self.value / t
    }
}

/// `⟨ω_i,n|ω_j,m⟩` at finite interaction time `T`, by quadrature over `k⊥`
/// (in `log k⊥`) of an inner quadrature over `ω''`. The auxiliary Rindler
/// parameter `a` must drop out of the result.
pub fn oracle_overlap_finite_t(
    omega_i: f64,
    traj_n: &Trajectory,
    omega_j: f64,
    traj_m: &Trajectory,
    t: f64,
    a: f64,
) -> Result<FiniteTimeOverlap> {
    for (name, v) in [
        ("omega_i", omega_i),
        ("omega_j", omega_j),
        ("T", t),
        ("a", a),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(domain(format!("{name} must be positive, got {v}")));
        }
    }
    let (zm, zn) = (traj_m.z, traj_n.z);
    let dx = traj_m.x_perp[0] - traj_n.x_perp[0];
    let dy = traj_m.x_perp[1] - traj_n.x_perp[1];
    let sep = dx.hypot(dy);
    let c = suppression_exponent(omega_i, zn, omega_j, zm, t);
    let m = width_parameter(omega_i, zn, omega_j, zm, t);
    let inv2 = 1.0 / (zm * zm) + 1.0 / (zn * zn);
    let omega_bar = a * (omega_j / zm + omega_i / zn) / inv2;
    let width = omega_bar / (2.0 * m).sqrt();
    let mut out = FiniteTimeOverlap {
        value: 0.0,
        main: 0.0,
        mirror: 0.0,
        error: 0.0,
        suppression: c,
        width,
        omega_bar,
        evaluations: 0,
    };
    let prefactor_log = 2.0 * t.ln() - c - 0.5 * (2.0 * PI.powi(5)).ln() - a.ln();
    if prefactor_log < -740.0 {
        return Ok(out);
    }
    let prefactor = prefactor_log.exp();

    let windows = [
        // e^{-πω/a} e^{-M(ω/ω̄ - 1)²}
        (
            (omega_bar - 8.0 * width).max(0.0),
            omega_bar + 8.0 * width,
            -1.0,
        ),
        // e^{+πω/a} e^{-M(ω/ω̄ + 1)²}, relevant only near ω = 0
        (0.0, (8.0 * width - omega_bar).max(0.0), 1.0),
    ];
    let nu_hi = (omega_bar + 8.0 * width) / a;
    let lo = (1e-8 / zm.max(zn)).ln();
    let hi = (2.0 * (TAIL + PI * nu_hi) / (zm + zn)).ln();
    let panels = 32 + (3.0 * nu_hi * (hi - lo) / PI).ceil() as usize;
    let outer_gk = GaussKronrod::new(1e-300, 1e-11)
        .relative_to_l1()
        .with_max_panels(20_000);
    let inner_gk = GaussKronrod::new(1e-300, 1e-13).relative_to_l1();

    let mut parts = [0.0; 2];
    for (slot, &(w_lo, w_hi, sign)) in windows.iter().enumerate() {
        if w_hi <= w_lo {
            continue;
        }
        let mut failure: Option<Error> = None;
        let mut inner_evals = 0usize;
        let outer = |s: f64| {
            if failure.is_some() {
                return 0.0;
            }
            let k = s.exp();
            let j0 = bessel_j0(k * sep);
            let line = |w: f64| {
                let nu = w / a;
                let r = w / omega_bar + sign;
                let exponent = sign * PI * nu - m * r * r - k * (zm + zn);
                if exponent < -740.0 {
                    return Ok(0.0);
                }
                let km = bessel_k_imag_scaled(nu, k * zm)?;
                let kn = bessel_k_imag_scaled(nu, k * zn)?;
                Ok::<f64, Error>(km * kn * exponent.exp())
            };
            let mut inner_failure = None;
            let r = inner_gk.integrate_panels(
                |w| {
                    line(w).unwrap_or_else(|e| {
                        inner_failure.get_or_insert(e);
                        0.0
                    })
                },
                &linspace_breaks(w_lo, w_hi, 4),
                "finite-time frequency integral",
            );
            match (inner_failure, r) {
                (Some(e), _) | (None, Err(e)) => {
                    failure = Some(e);
                    0.0
                }
                (None, Ok(r)) => {
                    inner_evals += r.evaluations;
                    k * k * j0 * r.value
                }
            }
        };
        let r = outer_gk.integrate_panels(
            outer,
            &linspace_breaks(lo, hi, panels),
            "finite-time momentum integral",
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let r = r?;
        parts[slot] = prefactor * r.value;
        out.error += prefactor * r.error;
        out.evaluations += inner_evals;
    }
    out.main = parts[0];
    out.mirror = parts[1];
    out.value = parts[0] + parts[1];
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub t: f64,
    pub m: f64,
    pub oracle: f64,
    pub asymptotic: f64,
    pub rel_error: f64,
    /// `T ≥ 1/ω`; below that, switching transients dominate.
    pub in_regime: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub omega: f64,
    pub z: f64,
    pub a: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceRow {
    pub fn new(omega: f64, z: f64, t: f64, oracle: f64) -> Self {
        let asymptotic = diag_overlap(omega, z, t);
        Self {
            t,
            m: width_parameter(omega, z, omega, z, t),
            oracle,
            asymptotic,
            rel_error: (oracle / asymptotic - 1.0).abs(),
            in_regime: t * omega >= 1.0,
        }
    }
}

impl ConvergenceReport {
    /// Least-squares slope of `log(rel_error)` against `log(M)`.
    pub fn fitted_slope(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|r| r.rel_error > 0.0)
            .map(|r| (r.m.ln(), r.rel_error.ln()))
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        sxy / sxx
    }

    pub fn monotone(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].rel_error < w[0].rel_error)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("T,M,oracle,asymptotic,rel_error\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                fmt_csv(r.t),
                fmt_csv(r.m),
                fmt_csv(r.oracle),
                fmt_csv(r.asymptotic),
                fmt_csv(r.rel_error)
            );
        }
        s
    }
}

/// Relative deviation of the finite-time diagonal overlap from its
/// large-time limit over a sequence of interaction times.
pub fn convergence_report(omega: f64, z: f64, a: f64, t_list: &[f64]) -> Result<ConvergenceReport> {
    if t_list.windows(2).any(|w| w[1] <= w[0]) || t_list.first().is_some_and(|&t| t <= 0.0) {
        return Err(domain("interaction times must be positive and increasing"));
    }
    let traj = Trajectory::on_axis(z, num_complex::Complex64::new(1.0, 0.0))?;
    let mut rows = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let oracle = oracle_overlap_finite_t(omega, &traj, omega, &traj, t, a)?.value;
        rows.push(ConvergenceRow::new(omega, z, t, oracle));
    }
    Ok(ConvergenceReport { omega, z, a, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use num_complex::Complex64 as C64;

    fn on_axis(z: f64) -> Trajectory {
        Trajectory::on_axis(z, C64::new(1.0, 0.0)).unwrap()
    }

    #[test]
    fn diagonal_values() {
        assert_abs_diff_eq!(
            diag_overlap(1.0, 1.0, 2.0 * PI),
            1.870_936_6e-3,
            epsilon = 1e-10
        );
        assert_eq!(
            diag_overlap(1.3, 0.7, 8.0),
            2.0 * diag_overlap(1.3, 0.7, 4.0)
        );
        assert_abs_diff_eq!(diag_overlap(1.0, 0.5, 100.0), 0.718_834_53, epsilon = 1e-8);
    }

    #[test]
    fn offdiagonal_values() {
        let t = 17.0;
        let self_overlap = offdiag_overlap(1.0, &on_axis(1.0), 1.0, &on_axis(1.0), t, 0.01);
        assert!(self_overlap.condition_met);
        assert_eq!(self_overlap.value, diag_overlap(1.0, 1.0, t));

        let r = offdiag_overlap(1.0, &on_axis(1.0), 2.0, &on_axis(0.5), t, 0.01);
        assert!(r.condition_met);
        let ln2 = std::f64::consts::LN_2;
        let lambda = ln2.sin() * (4.0 / 3.0) / 1.25f64.sqrt();
        let expect = t / (2.0 * PI) * 2f64.sqrt() / (2.0 * PI).exp_m1() * lambda;
        assert_relative_eq!(r.value, expect, max_relative = 1e-14);

        let off = offdiag_overlap(1.0, &on_axis(1.0), 2.0, &on_axis(1.0), t, 0.01);
        assert!(!off.condition_met);
        assert_eq!(off.value, 0.0);
        assert_relative_eq!(off.suppression, t * t / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn lambda_oracle_spot_values() {
        let r = oracle_lambda_quadrature(1.0, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-8);
        let r = oracle_lambda_quadrature(1.0, std::f64::consts::LN_2, 0.0).unwrap();
        assert_abs_diff_eq!(r.value, 0.762_005_786_0, epsilon = 1e-8);
        let r = oracle_lambda_quadrature(10.0, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(
            r.value,
            crate::specfun::lambda_axis_xbar(10.0, 1.0),
            epsilon = 1e-8
        );
        let r = oracle_lambda_quadrature(0.0, 0.7, 2.0).unwrap();
        assert_abs_diff_eq!(r.value, lambda_overlap(0.0, 0.7, 2.0), epsilon = 1e-8);
        assert!(oracle_lambda_quadrature(-1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn width_and_suppression_arithmetic() {
        // (1·1 + 1·1)² 50² / 2
        assert_eq!(width_parameter(1.0, 1.0, 1.0, 1.0, 50.0), 5000.0);
        // (1·0.5 + 2·1)² 10² / 1.25
        assert_relative_eq!(
            width_parameter(1.0, 1.0, 2.0, 0.5, 10.0),
            500.0,
            max_relative = 1e-15
        );
        assert_eq!(suppression_exponent(1.0, 1.0, 2.0, 0.5, 10.0), 0.0);
    }

    #[test]
    fn line_weight_matches_gaussian_integral() {
        let (zn, zm, t) = (0.5, 1.2, 7.0);
        let q = 0.8;
        let direct = GaussKronrod::new(1e-14, 1e-12)
            .integrate(
                |qp| (-((qp - q) * (qp - q)) * t * t / (zn * zn + zm * zm)).exp(),
                q - 3.0,
                q + 3.0,
                "line",
            )
            .unwrap()
            .value;
        assert_relative_eq!(direct, line_weight(zn, zm, t), max_relative = 1e-10);
    }

    #[test]
    fn strongly_violated_condition_vanishes() {
        let r = oracle_overlap_finite_t(1.0, &on_axis(1.0), 2.0, &on_axis(1.0), 50.0, 1.0).unwrap();
        assert_eq!(r.suppression, 1250.0);
        assert!(r.value.abs() < (-100f64).exp() * diag_overlap(1.0, 1.0, 50.0));
    }

    #[test]
    fn oracle_close_to_diagonal() {
        let t = 50.0;
        let r = oracle_overlap_finite_t(1.0, &on_axis(1.0), 1.0, &on_axis(1.0), t, 1.0).unwrap();
        let m = width_parameter(1.0, 1.0, 1.0, 1.0, t);
        let delta = r.value / diag_overlap(1.0, 1.0, t) - 1.0;
        assert!(delta.abs() <= 10.0 / m, "delta {delta}, M {m}");
        assert!(r.mirror.abs() < 1e-100);
    }

    #[test]
    fn regime_flag() {
        assert!(!ConvergenceRow::new(1.0, 1.0, 0.5, 1.0).in_regime);
        assert!(ConvergenceRow::new(1.0, 1.0, 2.0, 1.0).in_regime);
        assert!(!ConvergenceRow::new(0.1, 1.0, 5.0, 1.0).in_regime);
        assert!(convergence_report(1.0, 1.0, 1.0, &[2.0, 1.0]).is_err());
    }
}
