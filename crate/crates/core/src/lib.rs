//! Excitation of a multilevel Unruh–DeWitt detector carried along a quantum
//! superposition of uniformly accelerated trajectories.
//!
//! Natural units throughout. A trajectory is labelled by its Rindler height
//! `z = 1/a`; field-state overlaps between branches depend only on the
//! dimensionless Rindler frequency `q = ωz` and the relative position.

pub mod continuum;
pub mod detector;
pub mod error;
pub mod geometry;
pub mod io;
pub mod overlaps;
pub mod quad;
pub mod specfun;

pub use detector::{
    joint_state, measured_internal, neglog_matrix, paper_example, reduced_internal, BlockDensity,
    DetectorSpec, InteractionConfig, InternalDensity, MeasurementBasisVector, NeglogMatrix,
    ReducedSpectrum, Scale,
};
pub use error::{Error, Result};
pub use geometry::{Trajectory, TrajectorySet};
pub use num_complex::Complex64 as C64;
