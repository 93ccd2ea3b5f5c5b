//! First-order joint state of detector and trajectories, its partial trace,
//! and the internal state conditioned on a trajectory measurement.
//!
//! Excited-block composite index is `level * N + trajectory` for `N`
//! trajectories. Entry `[(j,m),(i,n)]` multiplies `|ω_j⟩⟨ω_i| ⊗ |m⟩⟨n|`.

use std::f64::consts::PI;
use std::fmt::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{
    coherence_condition, delta_xbar, delta_xi, validate_regime, RegimeWarning, Trajectory,
    TrajectorySet, NORMALIZATION_TOL,
};
use crate::io::{fmt_csv, from_json, to_json};
use crate::specfun::lambda_overlap;

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorSpec {
    frequencies: Vec<f64>,
    couplings: Vec<C64>,
}

impl DetectorSpec {
    pub fn new(frequencies: Vec<f64>, couplings: Vec<C64>) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(invalid("detector needs at least one excited level"));
        }
        if frequencies.len() != couplings.len() {
            return Err(invalid(format!(
                "{} frequencies but {} couplings",
                frequencies.len(),
                couplings.len()
            )));
        }
        if let Some(w) = frequencies.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(invalid(format!(
                "frequencies must be finite and positive, got {w}"
            )));
        }
        if frequencies.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("frequencies must be strictly increasing"));
        }
        if let Some(z) = couplings.iter().find(|z| !(z.norm() <= 1.0)) {
            return Err(invalid(format!(
                "coupling amplitudes need |zeta| <= 1, got {z}"
            )));
        }
        Ok(Self {
            frequencies,
            couplings,
        })
    }

    /// All couplings equal to one.
    pub fn uniform(frequencies: &[f64]) -> Result<Self> {
        Self::new(
            frequencies.to_vec(),
            vec![C64::new(1.0, 0.0); frequencies.len()],
        )
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn couplings(&self) -> &[C64] {
        &self.couplings
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// Frequencies multiplied by `gamma`.
    pub fn rescaled(&self, gamma: f64) -> Result<Self> {
        Self::new(
            self.frequencies.iter().map(|w| w * gamma).collect(),
            self.couplings.clone(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionConfig {
    pub epsilon: f64,
    /// Defaults to `1/(ε ω₁)`.
    pub t: Option<f64>,
    /// Defaults to `ε`.
    pub q_tolerance: Option<f64>,
    /// Only the finite-time oracle uses this.
    pub rindler_a: f64,
}

impl InteractionConfig {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            t: None,
            q_tolerance: None,
            rindler_a: 1.0,
        }
    }

    pub fn tolerance(&self) -> f64 {
        self.q_tolerance.unwrap_or(self.epsilon)
    }

    pub fn time(&self, det: &DetectorSpec) -> f64 {
        self.t
            .unwrap_or_else(|| 1.0 / (self.epsilon * det.frequencies()[0]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Scale {
    /// Excited entries divided by `ε²T`.
    #[serde(rename = "per_eps2T")]
    PerEps2T,
    #[serde(rename = "absolute")]
    Absolute { epsilon: f64, t: f64 },
}

impl Scale {
    fn factor(self) -> f64 {
        match self {
            Scale::PerEps2T => 1.0,
            Scale::Absolute { epsilon, t } => epsilon * epsilon * t,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockDensity {
    pub scale: Scale,
    pub detector: DetectorSpec,
    pub trajectories: TrajectorySet,
    /// Coefficient of `|0⟩⟨0|` over trajectory pairs.
    pub ground: DMatrix<C64>,
    pub excited: DMatrix<C64>,
    pub warnings: Vec<RegimeWarning>,
}

/// Per-`ε²T` excited entry for ket `(j, m)` and bra `(i, n)`, or `None` when
/// the field states are orthogonal.
fn excited_entry(
    det: &DetectorSpec,
    (j, tm): (usize, &Trajectory),
    (i, tn): (usize, &Trajectory),
    same: bool,
    tol: f64,
) -> Option<C64> {
    let wj = det.frequencies[j];
    let wi = det.frequencies[i];
    let amp = tm.amplitude * tn.amplitude.conj() * det.couplings[j] * det.couplings[i].conj();
    let q = wj * tm.z;
    let planck = 1.0 / (2.0 * PI * (2.0 * PI * q).exp_m1());
    if same {
        return Some(amp * wj * planck);
    }
    if !coherence_condition(wi, tn.z, wj, tm.z, tol) {
        return None;
    }
    let lambda = lambda_overlap(q, delta_xi(tm, tn), delta_xbar(tm, tn));
    Some(amp * lambda * (wi * wj).sqrt() * planck)
}

/// Joint state per unit `ε²T`, with every pair whose Rindler frequencies
/// `ω z` agree within `tol` carrying a coherence.
pub fn joint_state(det: &DetectorSpec, set: &TrajectorySet, tol: f64) -> Result<BlockDensity> {
    if !(tol > 0.0) {
        return Err(invalid(format!(
            "condition tolerance must be positive, got {tol}"
        )));
    }
    let n = set.len();
    let amps = set.amplitudes();
    let ground = DMatrix::from_fn(n, n, |r, c| amps[r] * amps[c].conj());
    let dim = det.len() * n;
    let traj = set.as_slice();
    let mut excited = DMatrix::<C64>::zeros(dim, dim);
    for r in 0..dim {
        let (j, m) = (r / n, r % n);
        for c in r..dim {
            let (i, k) = (c / n, c % n);
            if let Some(v) = excited_entry(det, (j, &traj[m]), (i, &traj[k]), r == c, tol) {
                excited[(r, c)] = v;
                excited[(c, r)] = v.conj();
            }
        }
        // Real by construction, but keep it exact.
        excited[(r, r)].im = 0.0;
    }
    Ok(BlockDensity {
        scale: Scale::PerEps2T,
        detector: det.clone(),
        trajectories: set.clone(),
        ground,
        excited,
        warnings: Vec::new(),
    })
}

/// [`joint_state`] with the tolerance taken from `cfg` and regime warnings
/// attached.
pub fn joint_state_checked(
    det: &DetectorSpec,
    set: &TrajectorySet,
    cfg: &InteractionConfig,
) -> Result<BlockDensity> {
    let report = validate_regime(det, set, cfg.epsilon, cfg.t)?;
    let mut rho = joint_state(det, set, cfg.tolerance())?;
    rho.warnings = report.violations;
    Ok(rho)
}

impl BlockDensity {
    pub fn levels(&self) -> usize {
        self.detector.len()
    }

    /// Multiplies the excited block by `ε²T` and flags entries beyond the
    /// first-order bound `ε²T·entry ≤ ε`.
    pub fn to_absolute(&self, epsilon: f64, t: f64) -> Result<BlockDensity> {
        if self.scale != Scale::PerEps2T {
            return Err(invalid("density is already in absolute scale"));
        }
        let scale = Scale::Absolute { epsilon, t };
        let excited = self.excited.map(|v| v * scale.factor());
        let mut warnings = self.warnings.clone();
        let largest = excited.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        if largest > epsilon {
            warnings.push(RegimeWarning::PerturbativeBound {
                entry: largest,
                epsilon,
            });
        }
        Ok(BlockDensity {
            scale,
            excited,
            warnings,
            ..self.clone()
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasisVector(Vec<C64>);

impl MeasurementBasisVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|b| b.norm_sqr()).sum();
        if !((norm - 1.0).abs() <= NORMALIZATION_TOL) {
            return Err(invalid(format!(
                "measurement vector has squared norm {norm}, expected 1"
            )));
        }
        Ok(Self(amplitudes))
    }

    /// The initial trajectory amplitudes.
    pub fn initial(set: &TrajectorySet) -> Self {
        Self(set.amplitudes())
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }
}

/// Internal spectrum after tracing out the trajectories. Off-diagonal terms
/// vanish identically.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSpectrum {
    pub scale: Scale,
    pub levels: Vec<f64>,
    pub ground: f64,
    pub weights: Vec<f64>,
}

pub fn reduced_internal(rho: &BlockDensity) -> ReducedSpectrum {
    let n = rho.trajectories.len();
    let weights = (0..rho.levels())
        .map(|i| (0..n).map(|k| rho.excited[(i * n + k, i * n + k)].re).sum())
        .collect();
    ReducedSpectrum {
        scale: rho.scale,
        levels: rho.detector.frequencies().to_vec(),
        ground: rho.ground.diagonal().iter().map(|v| v.re).sum(),
        weights,
    }
}

/// Internal density over `{0} ∪ levels`, index 0 being the ground state.
#[derive(Debug, Clone, PartialEq)]
pub struct InternalDensity {
    pub scale: Scale,
    pub levels: Vec<f64>,
    pub matrix: DMatrix<C64>,
}

impl InternalDensity {
    /// Excited sub-block over levels only.
    pub fn excited(&self) -> DMatrix<C64> {
        let l = self.levels.len();
        self.matrix.view((1, 1), (l, l)).into_owned()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|v| v.re).sum()
    }

    /// Trace-normalized copy together with the trace that was divided out.
    /// Normalization mixes the `O(1)` ground term with per-`ε²T` entries, so
    /// it is only meaningful in absolute scale.
    pub fn normalized(&self) -> Result<(InternalDensity, f64)> {
        let tr = self.trace();
        if !(tr > 0.0) {
            return Err(invalid(format!("cannot normalize a state with trace {tr}")));
        }
        Ok((
            InternalDensity {
                matrix: self.matrix.map(|v| v / tr),
                ..self.clone()
            },
            tr,
        ))
    }
}

/// Internal state, unnormalized, after finding the trajectories in state `B`.
pub fn measured_internal(
    rho: &BlockDensity,
    b: &MeasurementBasisVector,
) -> Result<InternalDensity> {
    let n = rho.trajectories.len();
    let b = b.as_slice();
    if b.len() != n {
        return Err(invalid(format!(
            "measurement vector has {} entries for {n} trajectories",
            b.len()
        )));
    }
    let l = rho.levels();
    let mut matrix = DMatrix::<C64>::zeros(l + 1, l + 1);
    // ⟨B|m⟩⟨n|B⟩ = B_m* B_n
    let weight = |m: usize, k: usize| b[m].conj() * b[k];
    let mut ground = C64::new(0.0, 0.0);
    for m in 0..n {
        for k in 0..n {
            ground += weight(m, k) * rho.ground[(m, k)];
        }
    }
    matrix[(0, 0)] = C64::new(ground.re, 0.0);
    for j in 0..l {
        for i in j..l {
            let mut acc = C64::new(0.0, 0.0);
            for m in 0..n {
                for k in 0..n {
                    acc += weight(m, k) * rho.excited[(j * n + m, i * n + k)];
                }
            }
            if i == j {
                acc.im = 0.0;
            }
            matrix[(j + 1, i + 1)] = acc;
            matrix[(i + 1, j + 1)] = acc.conj();
        }
    }
    Ok(InternalDensity {
        scale: rho.scale,
        levels: rho.detector.frequencies().to_vec(),
        matrix,
    })
}

/// `-log₁₀|ρ_{ji}|` over the excited levels; identically vanishing entries
/// are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeglogMatrix {
    pub size: usize,
    pub entries: Vec<Option<f64>>,
}

impl NeglogMatrix {
    /// 0-based row `j` and column `i`.
    pub fn get(&self, j: usize, i: usize) -> Option<f64> {
        self.entries[j * self.size + i]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level");
        for i in 1..=self.size {
            let _ = write!(out, ",{i}");
        }
        out.push('\n');
        for j in 0..self.size {
            let _ = write!(out, "{}", j + 1);
            for i in 0..self.size {
                out.push(',');
                if let Some(v) = self.get(j, i) {
                    out.push_str(&fmt_csv(v));
                }
            }
            out.push('\n');
        }
        out
    }
}

pub fn neglog_matrix(rho: &InternalDensity, level_count: usize) -> Result<NeglogMatrix> {
    if rho.scale != Scale::PerEps2T {
        return Err(invalid("the -log10 table is defined per unit eps^2 T"));
    }
    if level_count > rho.levels.len() {
        return Err(invalid(format!(
            "requested {level_count} levels of {}",
            rho.levels.len()
        )));
    }
    let mut entries = Vec::with_capacity(level_count * level_count);
    for j in 0..level_count {
        for i in 0..level_count {
            let v = rho.matrix[(j + 1, i + 1)].norm();
            entries.push((v != 0.0).then(|| -v.log10()));
        }
    }
    Ok(NeglogMatrix {
        size: level_count,
        entries,
    })
}

/// Largest `|M - M†|` entry.
pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(h).eigenvalues.min()
}

/// Three trajectories at `z = 0.5, 1, 1.5` on a common axis with equal
/// amplitudes, twelve levels `ω_i = i` with unit couplings, and the
/// trajectories measured back in their initial superposition.
#[derive(Debug, Clone)]
pub struct PaperExample {
    pub joint: BlockDensity,
    pub measured: InternalDensity,
    pub neglog: NeglogMatrix,
}

/// Ratios `ω_j z_m / (ω_i z_n)` here are exact rationals, so a tight
/// tolerance separates equal and unequal pairs unambiguously.
pub const EXAMPLE_Q_TOLERANCE: f64 = 1e-9;

pub fn example_setup() -> (DetectorSpec, TrajectorySet) {
    let freqs: Vec<f64> = (1..=12).map(f64::from).collect();
    let det = DetectorSpec::uniform(&freqs).expect("valid spectrum");
    let set = TrajectorySet::uniform_on_axis(&[0.5, 1.0, 1.5]).expect("valid trajectories");
    (det, set)
}

pub fn paper_example() -> Result<PaperExample> {
    let (det, set) = example_setup();
    let joint = joint_state(&det, &set, EXAMPLE_Q_TOLERANCE)?;
    let measured = measured_internal(&joint, &MeasurementBasisVector::initial(&set))?;
    let neglog = neglog_matrix(&measured, det.len())?;
    Ok(PaperExample {
        joint,
        measured,
        neglog,
    })
}

/// The bundled two-significant-figure reference table for the example,
/// parsed from its CSV form.
pub fn reference_neglog() -> NeglogMatrix {
    parse_reference(include_str!("../data/reference_neglog.csv")).expect("bundled table parses")
}

fn parse_reference(text: &str) -> Result<NeglogMatrix> {
    let rows: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let size = rows.len();
    let mut entries = Vec::with_capacity(size * size);
    for row in rows {
        let cells: Vec<&str> = row.split(',').collect();
        if cells.len() != size {
            return Err(invalid(format!(
                "reference row has {} cells, expected {size}",
                cells.len()
            )));
        }
        for cell in cells {
            let cell = cell.trim();
            entries.push(if cell.is_empty() {
                None
            } else {
                Some(
                    cell.parse::<f64>()
                        .map_err(|e| invalid(format!("bad cell {cell:?}: {e}")))?,
                )
            });
        }
    }
    Ok(NeglogMatrix { size, entries })
}

/// Comparison of a computed table against the reference.
#[derive(Debug, Clone, PartialEq)]
pub struct TableComparison {
    /// Cells present in one table but not the other, 0-based.
    pub structure_mismatches: Vec<(usize, usize)>,
    /// `(row, col, computed, reference)` with `|computed - reference| > tol`.
    pub value_mismatches: Vec<(usize, usize, f64, f64)>,
    /// Cells whose computed value, rounded to two significant figures,
    /// differs from the reference.
    pub rounding_mismatches: Vec<(usize, usize, f64, f64)>,
    pub max_abs_diff: f64,
}

impl TableComparison {
    pub fn within_tolerance(&self) -> bool {
        self.structure_mismatches.is_empty() && self.value_mismatches.is_empty()
    }

    pub fn matches_rounded(&self) -> bool {
        self.structure_mismatches.is_empty() && self.rounding_mismatches.is_empty()
    }
}

/// Round half away from zero to `digits` significant figures.
pub fn round_significant(v: f64, digits: i32) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let p = digits - 1 - v.abs().log10().floor() as i32;
    let s = 10f64.powi(p.abs());
    if p >= 0 {
        (v * s).round() / s
    } else {
        (v / s).round() * s
    }
}

pub fn compare_tables(
    computed: &NeglogMatrix,
    reference: &NeglogMatrix,
    tol: f64,
) -> Result<TableComparison> {
    if computed.size < reference.size {
        return Err(invalid("computed table is smaller than the reference"));
    }
    let mut out = TableComparison {
        structure_mismatches: Vec::new(),
        value_mismatches: Vec::new(),
        rounding_mismatches: Vec::new(),
        max_abs_diff: 0.0,
    };
    for j in 0..reference.size {
        for i in 0..reference.size {
            match (computed.get(j, i), reference.get(j, i)) {
                (Some(c), Some(r)) => {
                    let d = (c - r).abs();
                    out.max_abs_diff = out.max_abs_diff.max(d);
                    if d > tol {
                        out.value_mismatches.push((j, i, c, r));
                    }
                    if (round_significant(c, 2) - r).abs() > 1e-9 {
                        out.rounding_mismatches.push((j, i, c, r));
                    }
                }
                (None, None) => {}
                _ => out.structure_mismatches.push((j, i)),
            }
        }
    }
    Ok(out)
}

pub fn write_comparison(cmp: &TableComparison, tol: f64) -> String {
    let mut s = String::new();
    let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
    let _ = writeln!(
        s,
        "structure: {} ({} mismatched cells)",
        verdict(cmp.structure_mismatches.is_empty()),
        cmp.structure_mismatches.len()
    );
    let _ = writeln!(
        s,
        "values within +-{tol}: {} ({} cells outside, max |diff| {:.3})",
        verdict(cmp.within_tolerance()),
        cmp.value_mismatches.len(),
        cmp.max_abs_diff
    );
    for (j, i, c, r) in &cmp.value_mismatches {
        let _ = writeln!(s, "  ({},{}) computed {c:.3} reference {r}", j + 1, i + 1);
    }
    let _ = writeln!(
        s,
        "values after rounding to 2 significant figures: {} ({} cells differ)",
        verdict(cmp.matches_rounded()),
        cmp.rounding_mismatches.len()
    );
    for (j, i, c, r) in &cmp.rounding_mismatches {
        let _ = writeln!(s, "  ({},{}) computed {c:.3} reference {r}", j + 1, i + 1);
    }
    s
}

type Pair = [f64; 2];

fn pair(c: C64) -> Pair {
    [c.re, c.im]
}

fn rows(m: &DMatrix<C64>) -> Vec<Vec<Pair>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| pair(m[(r, c)])).collect())
        .collect()
}

fn matrix(rows: &[Vec<Pair>], what: &str) -> Result<DMatrix<C64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(invalid(format!("{what} must be square")));
    }
    Ok(DMatrix::from_fn(n, n, |r, c| {
        C64::new(rows[r][c][0], rows[r][c][1])
    }))
}

#[derive(Serialize, Deserialize)]
struct TrajectoryDoc {
    z: f64,
    x: f64,
    y: f64,
    #[serde(rename = "A")]
    amplitude: Pair,
}

#[derive(Serialize, Deserialize)]
struct BlockDensityDoc {
    scale: Scale,
    levels: Vec<f64>,
    couplings: Vec<Pair>,
    trajectories: Vec<TrajectoryDoc>,
    ground_block: Vec<Vec<Pair>>,
    excited_block: Vec<Vec<Pair>>,
}

#[derive(Serialize, Deserialize)]
struct ReducedDoc {
    scale: Scale,
    levels: Vec<f64>,
    ground: f64,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct InternalDoc {
    scale: Scale,
    levels: Vec<f64>,
    /// Index 0 is the ground state.
    matrix: Vec<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trace: Option<f64>,
}

impl BlockDensity {
    /// Warnings are not part of the document.
    pub fn to_json(&self) -> Result<String> {
        to_json(&BlockDensityDoc {
            scale: self.scale,
            levels: self.detector.frequencies().to_vec(),
            couplings: self
                .detector
                .couplings()
                .iter()
                .copied()
                .map(pair)
                .collect(),
            trajectories: self
                .trajectories
                .iter()
                .map(|t| TrajectoryDoc {
                    z: t.z,
                    x: t.x_perp[0],
                    y: t.x_perp[1],
                    amplitude: pair(t.amplitude),
                })
                .collect(),
            ground_block: rows(&self.ground),
            excited_block: rows(&self.excited),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: BlockDensityDoc = from_json(text)?;
        let detector = DetectorSpec::new(
            doc.levels,
            doc.couplings.iter().map(|c| C64::new(c[0], c[1])).collect(),
        )?;
        let trajectories = TrajectorySet::new(
            doc.trajectories
                .iter()
                .map(|t| Trajectory::new(t.z, [t.x, t.y], C64::new(t.amplitude[0], t.amplitude[1])))
                .collect::<Result<_>>()?,
        )?;
        let ground = matrix(&doc.ground_block, "ground_block")?;
        let excited = matrix(&doc.excited_block, "excited_block")?;
        if ground.nrows() != trajectories.len()
            || excited.nrows() != trajectories.len() * detector.len()
        {
            return Err(invalid("block sizes do not match levels and trajectories"));
        }
        Ok(Self {
            scale: doc.scale,
            detector,
            trajectories,
            ground,
            excited,
            warnings: Vec::new(),
        })
    }
}

impl ReducedSpectrum {
    pub fn to_json(&self) -> Result<String> {
        to_json(&ReducedDoc {
            scale: self.scale,
            levels: self.levels.clone(),
            ground: self.ground,
            weights: self.weights.clone(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ReducedDoc = from_json(text)?;
        if doc.levels.len() != doc.weights.len() {
            return Err(invalid("one weight per level expected"));
        }
        Ok(Self {
            scale: doc.scale,
            levels: doc.levels,
            ground: doc.ground,
            weights: doc.weights,
        })
    }
}

impl InternalDensity {
    /// `trace` records the normalization constant of a normalized state.
    pub fn to_json(&self, trace: Option<f64>) -> Result<String> {
        to_json(&InternalDoc {
            scale: self.scale,
            levels: self.levels.clone(),
            matrix: rows(&self.matrix),
            trace,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InternalDoc = from_json(text)?;
        let matrix = matrix(&doc.matrix, "matrix")?;
        if matrix.nrows() != doc.levels.len() + 1 {
            return Err(invalid(
                "matrix must cover the ground state and every level",
            ));
        }
        Ok(Self {
            scale: doc.scale,
            levels: doc.levels,
            matrix,
        })
    }
}
