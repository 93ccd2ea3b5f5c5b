//! Kernels of the joint state for a detector with a continuous spectrum
//! carried by a smeared superposition of trajectories.
//!
//! In the strict large-time limit the off-diagonal field overlaps become
//! Dirac deltas in the partner frequency. Deltas stay symbolic as
//! `(weight, location)` pairs and the state is only ever evaluated pointwise
//! or summed over grid cells.

use std::f64::consts::PI;
use std::fmt::Write;

use num_complex::Complex64 as C64;

use crate::error::{domain, invalid, Result};
use crate::io::fmt_csv;
use crate::specfun::lambda_overlap;

/// Uniform rectangular grid of nodes, every node at `z > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectGrid {
    pub origin: [f64; 3],
    pub spacing: [f64; 3],
    pub shape: [usize; 3],
}

pub type NodeIndex = [usize; 3];

impl RectGrid {
    pub fn new(origin: [f64; 3], spacing: [f64; 3], shape: [usize; 3]) -> Result<Self> {
        if shape.contains(&0) {
            return Err(invalid("grid needs at least one node per axis"));
        }
        if spacing.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(invalid(format!(
                "grid spacing must be positive, got {spacing:?}"
            )));
        }
        if !(origin[2] > 0.0) {
            return Err(invalid(format!(
                "grid must lie at z > 0, starts at z = {}",
                origin[2]
            )));
        }
        Ok(Self {
            origin,
            spacing,
            shape,
        })
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn position(&self, idx: NodeIndex) -> [f64; 3] {
        std::array::from_fn(|d| self.origin[d] + idx[d] as f64 * self.spacing[d])
    }

    fn flat(&self, idx: NodeIndex) -> Option<usize> {
        (0..3)
            .all(|d| idx[d] < self.shape[d])
            .then(|| (idx[0] * self.shape[1] + idx[1]) * self.shape[2] + idx[2])
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeIndex> + '_ {
        let [nx, ny, nz] = self.shape;
        (0..nx).flat_map(move |i| (0..ny).flat_map(move |j| (0..nz).map(move |k| [i, j, k])))
    }

    /// Node at `pos`, which must coincide with a grid point to within a
    /// millionth of the spacing.
    pub fn locate(&self, pos: [f64; 3]) -> Result<NodeIndex> {
        let mut idx = [0; 3];
        for d in 0..3 {
            let s = (pos[d] - self.origin[d]) / self.spacing[d];
            let r = s.round();
            if (s - r).abs() > 1e-6 || r < 0.0 || r as usize >= self.shape[d] {
                return Err(domain(format!("position {pos:?} is not a grid node")));
            }
            idx[d] = r as usize;
        }
        Ok(idx)
    }
}

/// Trajectory amplitude `A(x⃗)` sampled on a grid, normalized so that
/// `Σ|A|² ΔV = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmearedAmplitude {
    grid: RectGrid,
    values: Vec<C64>,
}

pub const SMEARED_NORMALIZATION_TOL: f64 = 1e-6;

impl SmearedAmplitude {
    pub fn new(grid: RectGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!(
                "{} samples for {} grid nodes",
                values.len(),
                grid.len()
            )));
        }
        let norm: f64 = values.iter().map(|a| a.norm_sqr()).sum::<f64>() * grid.cell_volume();
        if !((norm - 1.0).abs() <= SMEARED_NORMALIZATION_TOL) {
            return Err(invalid(format!(
                "smeared amplitude has norm {norm}, expected 1"
            )));
        }
        Ok(Self { grid, values })
    }

    /// Amplitude constant on each of a set of boxes: nodes within
    /// `half_width` (per axis) of `center` share `weight / √(nodes · ΔV)`.
    /// The weights must be normalized.
    pub fn from_cells(grid: RectGrid, cells: &[([f64; 3], f64, C64)]) -> Result<Self> {
        let mut values = vec![C64::new(0.0, 0.0); grid.len()];
        for &(center, half_width, weight) in cells {
            let members: Vec<usize> = grid
                .nodes()
                .filter(|&n| {
                    let p = grid.position(n);
                    (0..3).all(|d| (p[d] - center[d]).abs() <= half_width + 1e-9 * grid.spacing[d])
                })
                .filter_map(|n| grid.flat(n))
                .collect();
            if members.is_empty() {
                return Err(invalid(format!("cell at {center:?} contains no grid node")));
            }
            let v = weight / (members.len() as f64 * grid.cell_volume()).sqrt();
            for f in members {
                if values[f] != C64::new(0.0, 0.0) {
                    return Err(invalid("cells overlap"));
                }
                values[f] = v;
            }
        }
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &RectGrid {
        &self.grid
    }

    pub fn at(&self, idx: NodeIndex) -> Result<C64> {
        self.grid
            .flat(idx)
            .map(|f| self.values[f])
            .ok_or_else(|| domain(format!("node {idx:?} outside the grid")))
    }

    /// Nodes carrying a nonzero amplitude.
    pub fn support(&self) -> Vec<NodeIndex> {
        self.grid
            .nodes()
            .filter(|&n| self.at(n).is_ok_and(|a| a != C64::new(0.0, 0.0)))
            .collect()
    }
}

/// Tabulated coupling `ζ(ω)`, linearly interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingFunction {
    omegas: Vec<f64>,
    values: Vec<C64>,
}

impl CouplingFunction {
    pub fn new(omegas: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        if omegas.len() < 2 || omegas.len() != values.len() {
            return Err(invalid(
                "coupling table needs at least two matching samples",
            ));
        }
        if omegas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("coupling frequencies must be strictly increasing"));
        }
        if let Some(z) = values.iter().find(|z| !(z.norm() <= 1.0)) {
            return Err(invalid(format!("coupling needs |zeta| <= 1, got {z}")));
        }
        Ok(Self { omegas, values })
    }

    pub fn constant(value: C64, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo, hi], vec![value, value])
    }

    pub fn eval(&self, omega: f64) -> Result<C64> {
        let (lo, hi) = (self.omegas[0], *self.omegas.last().expect("nonempty"));
        if !(omega >= lo && omega <= hi) {
            return Err(domain(format!(
                "coupling tabulated on [{lo}, {hi}], asked at {omega}"
            )));
        }
        let k = self
            .omegas
            .partition_point(|&w| w <= omega)
            .clamp(1, self.omegas.len() - 1);
        let (w0, w1) = (self.omegas[k - 1], self.omegas[k]);
        let s = (omega - w0) / (w1 - w0);
        Ok(self.values[k - 1] * (1.0 - s) + self.values[k] * s)
    }
}

/// `weight · δ(ω' - location)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracDelta {
    pub weight: f64,
    pub location: f64,
}

impl DiracDelta {
    pub fn integrate_against<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.weight * f(self.location)
    }

    /// Gaussian nascent delta of width `sigma`, for weak-limit checks.
    pub fn nascent(&self, sigma: f64) -> impl Fn(f64) -> f64 + '_ {
        let norm = self.weight / (sigma * (2.0 * PI).sqrt());
        move |w| {
            let u = (w - self.location) / sigma;
            norm * (-0.5 * u * u).exp()
        }
    }
}

fn separations(x: [f64; 3], xp: [f64; 3]) -> (f64, f64) {
    let (z, zp) = (x[2], xp[2]);
    let sep = (x[0] - xp[0]).hypot(x[1] - xp[1]);
    (
        z.ln() - zp.ln(),
        sep * (0.5 * (1.0 / (z * z) + 1.0 / (zp * zp))).sqrt(),
    )
}

/// Large-time overlap `⟨ω',x⃗'|ω,x⃗⟩` per unit `T`: a delta at the partner
/// frequency `ω' = ωz/z'` with weight
/// `√cosh Δξ / (z'√(2π)) · Λ(q, Δξ, Δx̄) · q/(e^{2πq} - 1)`, `q = ωz`.
pub fn continuum_offdiag_coefficient(omega: f64, x: [f64; 3], xp: [f64; 3]) -> Result<DiracDelta> {
    if !(omega > 0.0) || !(x[2] > 0.0) || !(xp[2] > 0.0) {
        return Err(domain("needs omega > 0 and both heights positive"));
    }
    let q = omega * x[2];
    let (dxi, dxbar) = separations(x, xp);
    let weight =
        dxi.cosh().sqrt() / (xp[2] * (2.0 * PI).sqrt()) * lambda_overlap(q, dxi, dxbar) * q
            / (2.0 * PI * q).exp_m1();
    Ok(DiracDelta {
        weight,
        location: omega * x[2] / xp[2],
    })
}

/// Integrand of the joint state per unit `ε²` at Rindler frequency `q`
/// between ket position `x⃗` and bra position `x⃗'`.
pub fn continuum_joint_kernel(
    q: f64,
    x: NodeIndex,
    xp: NodeIndex,
    amp: &SmearedAmplitude,
    zeta: &CouplingFunction,
) -> Result<C64> {
    if !(q > 0.0) {
        return Err(domain(format!("q must be positive, got {q}")));
    }
    let (px, ppx) = (amp.grid.position(x), amp.grid.position(xp));
    let (z, zp) = (px[2], ppx[2]);
    let (dxi, dxbar) = separations(px, ppx);
    let a = amp.at(xp)?.conj() * amp.at(x)?;
    let couplings = zeta.eval(q / zp)?.conj() * zeta.eval(q / z)?;
    let geometric = (0.5 * (1.0 / (z * z) + 1.0 / (zp * zp))).sqrt() * q / (z * zp).sqrt();
    let thermal = lambda_overlap(q, dxi, dxbar) / (2.0 * PI * q).exp_m1();
    Ok(a * couplings * (geometric * thermal / (2.0 * PI).sqrt()))
}

/// Diagonal `x⃗ = x⃗'` kernel at a fixed node over a list of frequencies,
/// `q = ω z`.
pub fn continuum_spectrum_slice(
    amp: &SmearedAmplitude,
    zeta: &CouplingFunction,
    node: NodeIndex,
    omegas: &[f64],
) -> Result<Vec<f64>> {
    let z = amp.grid.position(node)[2];
    omegas
        .iter()
        .map(|&w| continuum_joint_kernel(w * z, node, node, amp, zeta).map(|k| k.re))
        .collect()
}

/// Kernel summed over two sets of nodes, `Σ_{x⃗∈a} Σ_{x⃗'∈b} K ΔV²`.
pub fn cell_coherence(
    q: f64,
    amp: &SmearedAmplitude,
    zeta: &CouplingFunction,
    a: &[NodeIndex],
    b: &[NodeIndex],
) -> Result<C64> {
    let dv = amp.grid.cell_volume();
    let mut acc = C64::new(0.0, 0.0);
    for &x in a {
        for &xp in b {
            acc += continuum_joint_kernel(q, x, xp, amp, zeta)?;
        }
    }
    Ok(acc * dv * dv)
}

/// `|K_ab| / √(K_aa K_bb)` for cell-summed kernels.
pub fn cell_coherence_ratio(
    q: f64,
    amp: &SmearedAmplitude,
    zeta: &CouplingFunction,
    a: &[NodeIndex],
    b: &[NodeIndex],
) -> Result<f64> {
    let ab = cell_coherence(q, amp, zeta, a, b)?;
    let aa = cell_coherence(q, amp, zeta, a, a)?;
    let bb = cell_coherence(q, amp, zeta, b, b)?;
    Ok(ab.norm() / (aa.re * bb.re).sqrt())
}

/// Kernel slice as CSV rows `q,x,y,z,xp,yp,zp,re,im`.
pub fn kernel_csv(
    qs: &[f64],
    pairs: &[(NodeIndex, NodeIndex)],
    amp: &SmearedAmplitude,
    zeta: &CouplingFunction,
) -> Result<String> {
    let mut s = String::from("q,x,y,z,xp,yp,zp,re,im\n");
    for &q in qs {
        for &(x, xp) in pairs {
            let k = continuum_joint_kernel(q, x, xp, amp, zeta)?;
            let (p, pp) = (amp.grid.position(x), amp.grid.position(xp));
            let cells = [q, p[0], p[1], p[2], pp[0], pp[1], pp[2], k.re, k.im].map(fmt_csv);
            let _ = writeln!(s, "{}", cells.join(","));
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn line_grid() -> RectGrid {
        RectGrid::new([0.0, 0.0, 0.25], [1.0, 1.0, 0.25], [1, 1, 8]).unwrap()
    }

    fn uniform_line() -> SmearedAmplitude {
        let g = line_grid();
        let v = C64::new((1.0 / (g.len() as f64 * g.cell_volume())).sqrt(), 0.0);
        SmearedAmplitude::new(g, vec![v; g.len()]).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(RectGrid::new([0.0, 0.0, 0.0], [1.0; 3], [1, 1, 2]).is_err());
        assert!(RectGrid::new([0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [1, 1, 2]).is_err());
        let g = line_grid();
        assert_eq!(g.locate([0.0, 0.0, 1.0]).unwrap(), [0, 0, 3]);
        assert!(g.locate([0.0, 0.0, 1.1]).is_err());
        assert!(SmearedAmplitude::new(g, vec![C64::new(1.0, 0.0); g.len()]).is_err());
    }

    #[test]
    fn coupling_interpolation() {
        let z = CouplingFunction::new(
            vec![0.0, 1.0, 3.0],
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0)],
        )
        .unwrap();
        assert_eq!(z.eval(0.5).unwrap(), C64::new(0.5, 0.0));
        assert_eq!(z.eval(3.0).unwrap(), C64::new(0.0, 1.0));
        assert_eq!(z.eval(2.0).unwrap(), C64::new(0.5, 0.5));
        assert!(z.eval(3.5).is_err());
        assert!(CouplingFunction::constant(C64::new(2.0, 0.0), 0.0, 1.0).is_err());
    }

    #[test]
    fn coefficient_examples() {
        let x = [0.3, -0.2, 1.0];
        let d = continuum_offdiag_coefficient(1.0, x, x).unwrap();
        assert_eq!(d.location, 1.0);
        assert_relative_eq!(
            d.weight,
            1.0 / (2.0 * PI).sqrt() / (2.0 * PI).exp_m1(),
            max_relative = 1e-14
        );

        let d = continuum_offdiag_coefficient(1.0, [0.0, 0.0, 1.0], [0.0, 0.0, 0.5]).unwrap();
        assert_eq!(d.location, 2.0);
        let ln2 = std::f64::consts::LN_2;
        let lambda = ln2.sin() * (4.0 / 3.0) / 1.25f64.sqrt();
        let expect = 1.25f64.sqrt() / (0.5 * (2.0 * PI).sqrt()) * lambda / (2.0 * PI).exp_m1();
        assert_relative_eq!(d.weight, expect, max_relative = 1e-14);

        let far = continuum_offdiag_coefficient(1.0, [0.0, 0.0, 1.0], [1e6, 0.0, 1.0]).unwrap();
        assert!(far.weight.abs() < 1e-10 * d.weight);
    }

    #[test]
    fn weak_limit_of_delta() {
        let d = continuum_offdiag_coefficient(0.8, [0.0, 0.0, 1.0], [0.2, 0.0, 0.7]).unwrap();
        let test = |w: f64| (-(w - 1.0) * (w - 1.0) / 0.02).exp();
        let exact = d.integrate_against(test);
        let gk = crate::quad::GaussKronrod::new(1e-16, 1e-12);
        let mut prev = f64::INFINITY;
        for &sigma in &[1e-2, 1e-3, 1e-4] {
            let nascent = d.nascent(sigma);
            let lo = d.location - 12.0 * sigma;
            let hi = d.location + 12.0 * sigma;
            let v = gk
                .integrate(|w| nascent(w) * test(w), lo, hi, "weak")
                .unwrap()
                .value;
            let err = (v - exact).abs() / exact.abs();
            assert!(err < prev);
            prev = err;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn kernel_hermitian_and_positive_diagonal() {
        let amp = uniform_line();
        let zeta = CouplingFunction::new(
            vec![0.01, 10.0],
            vec![C64::new(0.3, 0.4), C64::new(-0.8, 0.1)],
        )
        .unwrap();
        for x in amp.grid().nodes() {
            for xp in amp.grid().nodes() {
                let a = continuum_joint_kernel(0.7, x, xp, &amp, &zeta).unwrap();
                let b = continuum_joint_kernel(0.7, xp, x, &amp, &zeta).unwrap();
                assert!((a - b.conj()).norm() <= 1e-15 * a.norm().max(1e-300));
            }
            let d = continuum_joint_kernel(0.7, x, x, &amp, &zeta).unwrap();
            assert!(d.re > 0.0 && d.im == 0.0);
        }
        let narrow = CouplingFunction::constant(C64::new(1.0, 0.0), 0.5, 1.0).unwrap();
        assert!(continuum_joint_kernel(0.7, [0, 0, 0], [0, 0, 7], &amp, &narrow).is_err());
    }

    #[test]
    fn slice_follows_planck_ratio() {
        let amp = uniform_line();
        let zeta = CouplingFunction::constant(C64::new(1.0, 0.0), 0.01, 10.0).unwrap();
        let node = [0, 0, 3];
        let z = 1.0;
        let s = continuum_spectrum_slice(&amp, &zeta, node, &[0.7, 1.4]).unwrap();
        let planck = |q: f64| q / (2.0 * PI * q).exp_m1();
        assert_relative_eq!(
            s[0] / s[1],
            planck(0.7 * z) / planck(1.4 * z),
            max_relative = 1e-13
        );
    }
}
