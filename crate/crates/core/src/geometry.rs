//! Uniformly accelerated trajectories in the right Rindler wedge.
//!
//! A trajectory is static in Rindler coordinates `(t, x, y, z)`, which map to
//! Minkowski coordinates by `T = z sinh(a t)`, `Z = z cosh(a t)`. Its proper
//! acceleration is `1/z`, so everything downstream is expressed through `z`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::detector::DetectorSpec;
use crate::error::{domain, invalid, Error, Result};

/// Tolerance on `Σ|A_n|² = 1` for a trajectory superposition.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trajectory {
    /// Rindler height; the proper acceleration is `1/z`.
    pub z: f64,
    pub x_perp: [f64; 2],
    pub amplitude: C64,
}

impl Trajectory {
    pub fn new(z: f64, x_perp: [f64; 2], amplitude: C64) -> Result<Self> {
        if !(z > 0.0) || !z.is_finite() {
            return Err(domain(format!(
                "trajectory height must be positive, got z={z}"
            )));
        }
        if !x_perp.iter().all(|c| c.is_finite()) {
            return Err(domain("transverse position must be finite"));
        }
        if !amplitude.re.is_finite() || !amplitude.im.is_finite() {
            return Err(domain("trajectory amplitude must be finite"));
        }
        Ok(Self {
            z,
            x_perp,
            amplitude,
        })
    }

    /// Trajectory on the acceleration axis (`x = y = 0`).
    pub fn on_axis(z: f64, amplitude: C64) -> Result<Self> {
        Self::new(z, [0.0, 0.0], amplitude)
    }

    pub fn acceleration(&self) -> f64 {
        1.0 / self.z
    }
}

/// An ordered superposition of distinguishable trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySet {
    trajectories: Vec<Trajectory>,
}

impl TrajectorySet {
    /// Sorts by nondecreasing `z` and checks distinctness and normalization.
    pub fn new(mut trajectories: Vec<Trajectory>) -> Result<Self> {
        if trajectories.is_empty() {
            return Err(invalid("a trajectory set needs at least one trajectory"));
        }
        trajectories.sort_by(|a, b| a.z.total_cmp(&b.z));
        for (k, a) in trajectories.iter().enumerate() {
            for b in &trajectories[k + 1..] {
                if a.z == b.z && a.x_perp == b.x_perp {
                    return Err(invalid(format!(
                        "trajectories must be pairwise distinct; duplicate at z={} x={:?}",
                        a.z, a.x_perp
                    )));
                }
            }
        }
        let norm: f64 = trajectories.iter().map(|t| t.amplitude.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORMALIZATION_TOL {
            return Err(invalid(format!(
                "trajectory amplitudes must satisfy sum |A|^2 = 1, got {norm}"
            )));
        }
        Ok(Self { trajectories })
    }

    /// Equal-weight superposition on the acceleration axis, `A_n = 1/√N`.
    pub fn uniform_on_axis(heights: &[f64]) -> Result<Self> {
        let amp = C64::new(1.0 / (heights.len() as f64).sqrt(), 0.0);
        let trajectories = heights
            .iter()
            .map(|&z| Trajectory::on_axis(z, amp))
            .collect::<Result<Vec<_>>>()?;
        Self::new(trajectories)
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Trajectory> {
        self.trajectories.iter()
    }

    pub fn get(&self, n: usize) -> Option<&Trajectory> {
        self.trajectories.get(n)
    }

    pub fn as_slice(&self) -> &[Trajectory] {
        &self.trajectories
    }

    pub fn amplitudes(&self) -> Vec<C64> {
        self.trajectories.iter().map(|t| t.amplitude).collect()
    }

    /// Same trajectories with every height divided by `gamma`.
    pub fn rescaled(&self, gamma: f64) -> Result<Self> {
        let trajectories = self
            .trajectories
            .iter()
            .map(|t| Trajectory::new(t.z / gamma, t.x_perp, t.amplitude))
            .collect::<Result<Vec<_>>>()?;
        Self::new(trajectories)
    }
}

impl<'a> IntoIterator for &'a TrajectorySet {
    type Item = &'a Trajectory;
    type IntoIter = std::slice::Iter<'a, Trajectory>;

    fn into_iter(self) -> Self::IntoIter {
        self.trajectories.iter()
    }
}

/// Minkowski event `(T, X, Y, Z)`.
pub type Event = [f64; 4];

pub fn rindler_to_minkowski(t: f64, x: f64, y: f64, z: f64, a: f64) -> Result<Event> {
    if !(z > 0.0) {
        return Err(domain(format!(
            "Rindler height must be positive, got z={z}"
        )));
    }
    if !(a > 0.0) {
        return Err(domain(format!(
            "Rindler parameter must be positive, got a={a}"
        )));
    }
    let (s, c) = ((a * t).sinh(), (a * t).cosh());
    Ok([z * s, x, y, z * c])
}

/// Inverse of [`rindler_to_minkowski`]; returns `(t, x, y, z)`.
pub fn minkowski_to_rindler(
    big_t: f64,
    big_x: f64,
    big_y: f64,
    big_z: f64,
    a: f64,
) -> Result<[f64; 4]> {
    if !(a > 0.0) {
        return Err(domain(format!(
            "Rindler parameter must be positive, got a={a}"
        )));
    }
    if !(big_z > big_t.abs()) {
        return Err(Error::OutsideWedge { t: big_t, z: big_z });
    }
    // (Z - T)(Z + T) avoids cancellation close to the horizon.
    let z = ((big_z - big_t) * (big_z + big_t)).sqrt();
    let t = (big_t / big_z).atanh() / a;
    Ok([t, big_x, big_y, z])
}

/// `Δξ_{mn} = log(z_m / z_n)`, the Lass-coordinate separation.
pub fn delta_xi(m: &Trajectory, n: &Trajectory) -> f64 {
    // Difference of logs keeps the antisymmetry exact.
    m.z.ln() - n.z.ln()
}

/// Transverse separation rescaled by the root-mean-square acceleration.
pub fn delta_xbar(m: &Trajectory, n: &Trajectory) -> f64 {
    let dx = m.x_perp[0] - n.x_perp[0];
    let dy = m.x_perp[1] - n.x_perp[1];
    let sep = dx.hypot(dy);
    sep * (0.5 * (1.0 / (m.z * m.z) + 1.0 / (n.z * n.z))).sqrt()
}

/// `q = ω z`: the level frequency in units of the trajectory's acceleration.
pub fn q_value(omega: f64, z: f64) -> f64 {
    omega * z
}

/// Whether two (level, trajectory) pairs are Rindler-degenerate,
/// `|ω_j z_m − ω_i z_n| ≤ tol`.
pub fn coherence_condition(omega_i: f64, z_n: f64, omega_j: f64, z_m: f64, tol: f64) -> bool {
    (omega_j * z_m - omega_i * z_n).abs() <= tol
}

/// `μ = log(1/(2π) + 1) / (2π)`; first-order consistency needs `ω₁ z₁ ≳ μ`.
pub fn acceleration_bound_mu() -> f64 {
    (1.0 / (2.0 * PI) + 1.0).ln() / (2.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeWarning {
    /// Supplied T is more than a factor 10 below `1/(ε ω₁)`.
    TimeTooShort { t: f64, recommended: f64 },
    /// Supplied T is more than a factor 10 above `1/(ε ω₁)`.
    TimeTooLong { t: f64, recommended: f64 },
    /// `ω₁ z₁ < μ`: the fastest branch is accelerated too hard.
    AccelerationTooHigh { q_min: f64, mu: f64 },
    /// A perturbative entry exceeds ε once multiplied by `ε²T`.
    PerturbativeBound { entry: f64, epsilon: f64 },
}

impl std::fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::TimeTooShort { t, recommended } => write!(
                f,
                "time-too-short: T={t} is more than 10x below the recommended 1/(eps*omega_1)={recommended}"
            ),
            Self::TimeTooLong { t, recommended } => write!(
                f,
                "time-too-long: T={t} is more than 10x above the recommended 1/(eps*omega_1)={recommended}"
            ),
            Self::AccelerationTooHigh { q_min, mu } => write!(
                f,
                "acceleration-too-high: omega_1*z_1={q_min} is below mu={mu}"
            ),
            Self::PerturbativeBound { entry, epsilon } => write!(
                f,
                "perturbative-bound: eps^2*T*entry={entry} exceeds eps={epsilon}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub t_recommended: f64,
    pub violations: Vec<RegimeWarning>,
}

impl RegimeReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the interaction-time and acceleration bounds of first-order
/// perturbation theory. Violations are warnings, since the bounds are only
/// order-of-magnitude statements.
pub fn validate_regime(
    det: &DetectorSpec,
    set: &TrajectorySet,
    epsilon: f64,
    t: Option<f64>,
) -> Result<RegimeReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(domain(format!(
            "coupling must lie in (0, 1), got {epsilon}"
        )));
    }
    let omega_1 = det
        .frequencies()
        .first()
        .copied()
        .ok_or_else(|| domain("detector spectrum is empty"))?;
    let t_recommended = 1.0 / (epsilon * omega_1);
    let mut violations = Vec::new();
    if let Some(t) = t {
        if t < t_recommended / 10.0 {
            violations.push(RegimeWarning::TimeTooShort {
                t,
                recommended: t_recommended,
            });
        } else if t > t_recommended * 10.0 {
            violations.push(RegimeWarning::TimeTooLong {
                t,
                recommended: t_recommended,
            });
        }
    }
    let mu = acceleration_bound_mu();
    let z_1 = set.as_slice()[0].z;
    let q_min = omega_1 * z_1;
    if q_min < mu {
        violations.push(RegimeWarning::AccelerationTooHigh { q_min, mu });
    }
    Ok(RegimeReport {
        t_recommended,
        violations,
    })
}
