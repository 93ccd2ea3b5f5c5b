//! TOML run configuration. Complex numbers are `[re, im]` pairs.

use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::Deserialize;
use unruh_core::continuum::{CouplingFunction, RectGrid, SmearedAmplitude};
use unruh_core::{
    DetectorSpec, InteractionConfig, MeasurementBasisVector, Trajectory, TrajectorySet,
};

use crate::CliError;

pub type Pair = [f64; 2];

fn c(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub detector: Option<DetectorSection>,
    pub trajectories: Option<Vec<TrajectorySection>>,
    pub interaction: Option<InteractionSection>,
    pub measurement: Option<MeasurementSection>,
    #[serde(default)]
    pub output: OutputSection,
    pub oracle: Option<OracleSection>,
    pub lambda_grid: Option<LambdaGridSection>,
    pub continuum: Option<ContinuumSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    pub frequencies: Vec<f64>,
    /// Defaults to one for every level.
    pub couplings: Option<Vec<Pair>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySection {
    pub z: f64,
    #[serde(default)]
    pub x: f64,
    #[serde(default)]
    pub y: f64,
    pub amplitude: Pair,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionSection {
    pub epsilon: f64,
    #[serde(rename = "T")]
    pub t: Option<f64>,
    pub q_tolerance: Option<f64>,
    pub rindler_a: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementSection {
    pub amplitudes: Vec<Pair>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub directory: Option<PathBuf>,
    /// Also write the state multiplied by `ε²T`.
    #[serde(default)]
    pub absolute: bool,
    /// Also write the trace-normalized measured state (absolute scale).
    #[serde(default)]
    pub normalize: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub omega: Option<f64>,
    pub z: Option<f64>,
    pub t_list: Option<Vec<f64>>,
    pub a_values: Option<Vec<f64>>,
    pub q: Option<Vec<f64>>,
    pub grid: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaGridSection {
    pub q: Option<Vec<f64>>,
    pub xi_range: Option<[f64; 2]>,
    pub xbar_range: Option<[f64; 2]>,
    pub steps: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSection {
    pub center: [f64; 3],
    pub half_width: f64,
    pub weight: Pair,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSection {
    pub omegas: Vec<f64>,
    pub values: Vec<Pair>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuumSection {
    pub origin: [f64; 3],
    pub spacing: [f64; 3],
    pub shape: [usize; 3],
    pub cells: Vec<CellSection>,
    /// Defaults to `ζ ≡ 1` on a wide band.
    pub coupling: Option<CouplingSection>,
    pub q: Option<Vec<f64>>,
    pub slice_omegas: Option<Vec<f64>>,
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

fn bad(field: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {e}"))
}

impl RunConfig {
    pub fn detector(&self) -> Result<DetectorSpec, CliError> {
        let d = self
            .detector
            .as_ref()
            .ok_or_else(|| CliError::Config("missing section `detector`".into()))?;
        let couplings = match &d.couplings {
            Some(cs) => cs.iter().copied().map(c).collect(),
            None => vec![C64::new(1.0, 0.0); d.frequencies.len()],
        };
        DetectorSpec::new(d.frequencies.clone(), couplings).map_err(|e| bad("detector", e))
    }

    pub fn trajectories(&self) -> Result<TrajectorySet, CliError> {
        let ts = self
            .trajectories
            .as_ref()
            .ok_or_else(|| CliError::Config("missing section `trajectories`".into()))?;
        let list = ts
            .iter()
            .enumerate()
            .map(|(k, t)| {
                Trajectory::new(t.z, [t.x, t.y], c(t.amplitude))
                    .map_err(|e| bad(&format!("trajectories[{k}]"), e))
            })
            .collect::<Result<Vec<_>, _>>()?;
        TrajectorySet::new(list).map_err(|e| bad("trajectories", e))
    }

    /// Interaction settings with command-line overrides applied.
    pub fn interaction(&self, ov: &Overrides) -> Result<InteractionConfig, CliError> {
        let sec = self.interaction.as_ref();
        let epsilon = ov
            .epsilon
            .or(sec.map(|s| s.epsilon))
            .ok_or_else(|| CliError::Config("missing field `interaction.epsilon`".into()))?;
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(bad(
                "interaction.epsilon",
                format!("must lie in (0, 1), got {epsilon}"),
            ));
        }
        let t = ov.t.or(sec.and_then(|s| s.t));
        if let Some(t) = t {
            if !(t > 0.0) {
                return Err(bad("interaction.T", format!("must be positive, got {t}")));
            }
        }
        let q_tolerance = ov.tol.or(sec.and_then(|s| s.q_tolerance));
        if let Some(tol) = q_tolerance {
            if !(tol > 0.0) {
                return Err(bad(
                    "interaction.q_tolerance",
                    format!("must be positive, got {tol}"),
                ));
            }
        }
        let rindler_a = sec.and_then(|s| s.rindler_a).unwrap_or(1.0);
        if !(rindler_a > 0.0) {
            return Err(bad(
                "interaction.rindler_a",
                format!("must be positive, got {rindler_a}"),
            ));
        }
        Ok(InteractionConfig {
            epsilon,
            t,
            q_tolerance,
            rindler_a,
        })
    }

    /// Measurement vector, defaulting to the initial amplitudes.
    pub fn measurement(&self, set: &TrajectorySet) -> Result<MeasurementBasisVector, CliError> {
        match &self.measurement {
            None => Ok(MeasurementBasisVector::initial(set)),
            Some(m) => {
                if m.amplitudes.len() != set.len() {
                    return Err(bad(
                        "measurement.amplitudes",
                        format!(
                            "{} entries for {} trajectories",
                            m.amplitudes.len(),
                            set.len()
                        ),
                    ));
                }
                // Trajectories are reordered by height on construction;
                // the measurement amplitudes follow the same permutation.
                let order = height_order(self.trajectories.as_deref().unwrap_or_default());
                let b = order.iter().map(|&k| c(m.amplitudes[k])).collect();
                MeasurementBasisVector::new(b).map_err(|e| bad("measurement.amplitudes", e))
            }
        }
    }

    pub fn out_dir(&self, ov: &Overrides) -> PathBuf {
        ov.out
            .clone()
            .or_else(|| self.output.directory.clone())
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

/// Indices of the configured trajectories in nondecreasing `z`, the order a
/// `TrajectorySet` stores them in (stable for ties).
fn height_order(ts: &[TrajectorySection]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..ts.len()).collect();
    idx.sort_by(|&a, &b| ts[a].z.total_cmp(&ts[b].z));
    idx
}

impl ContinuumSection {
    pub fn build(&self) -> Result<(SmearedAmplitude, CouplingFunction), CliError> {
        let grid = RectGrid::new(self.origin, self.spacing, self.shape)
            .map_err(|e| bad("continuum", e))?;
        let cells: Vec<_> = self
            .cells
            .iter()
            .map(|s| (s.center, s.half_width, c(s.weight)))
            .collect();
        let amp =
            SmearedAmplitude::from_cells(grid, &cells).map_err(|e| bad("continuum.cells", e))?;
        let zeta = match &self.coupling {
            Some(cs) => CouplingFunction::new(
                cs.omegas.clone(),
                cs.values.iter().copied().map(c).collect(),
            ),
            None => CouplingFunction::constant(C64::new(1.0, 0.0), 1e-6, 1e6),
        }
        .map_err(|e| bad("continuum.coupling", e))?;
        Ok((amp, zeta))
    }
}

/// Values given on the command line take precedence over the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub epsilon: Option<f64>,
    pub t: Option<f64>,
    pub q: Option<Vec<f64>>,
    pub grid: Option<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
[detector]
frequencies = [1.0, 2.0]

[[trajectories]]
z = 1.0
amplitude = [0.6, 0.0]

[[trajectories]]
z = 0.5
amplitude = [0.0, 0.8]

[interaction]
epsilon = 0.01

[measurement]
amplitudes = [[1.0, 0.0], [0.0, 0.0]]
"#;

    #[test]
    fn parses_and_reorders_measurement() {
        let cfg = parse(EXAMPLE).unwrap();
        let set = cfg.trajectories().unwrap();
        assert_eq!(set.get(0).unwrap().z, 0.5);
        let b = cfg.measurement(&set).unwrap();
        // Vector given for (z=1, z=0.5) maps onto sorted order (z=0.5, z=1).
        assert_eq!(b.as_slice()[1], C64::new(1.0, 0.0));
        let i = cfg.interaction(&Overrides::default()).unwrap();
        assert_eq!(i.tolerance(), 0.01);
        assert_eq!(cfg.detector().unwrap().couplings()[1], C64::new(1.0, 0.0));
    }

    #[test]
    fn reports_fields() {
        let cfg = parse("[interaction]\nepsilon = 0.0\n").unwrap();
        let err = cfg.detector().unwrap_err().to_string();
        assert!(err.contains("detector"), "{err}");
        let err = cfg
            .interaction(&Overrides::default())
            .unwrap_err()
            .to_string();
        assert!(err.contains("interaction.epsilon"), "{err}");
        let err = parse("[detector]\nfrequences = [1.0]\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("frequences"), "{err}");
        let ov = Overrides {
            epsilon: Some(0.5),
            ..Default::default()
        };
        assert_eq!(cfg.interaction(&ov).unwrap().epsilon, 0.5);
    }
}
