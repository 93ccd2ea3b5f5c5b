//! Seeded generators of admissible detector configurations.
//!
//! Heights and frequencies are drawn as small rational multiples of a random
//! base, so that many pairs satisfy `ω_j z_m = ω_i z_n` exactly and the
//! coherence blocks are well populated.

use num_complex::Complex64 as C64;
use rand::seq::index::sample;
use rand::Rng;
use unruh_core::{DetectorSpec, Trajectory, TrajectorySet};

pub use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

const HEIGHT_RATIOS: [f64; 6] = [0.5, 1.0, 1.5, 2.0, 3.0, 4.0];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform random complex vector of unit norm.
pub fn unit_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Random unit vector orthogonal to the unit vector `a`; `a.len() >= 2`.
pub fn orthogonal_unit_vector<R: Rng>(rng: &mut R, a: &[C64]) -> Vec<C64> {
    loop {
        let v = unit_vector(rng, a.len());
        let overlap: C64 = a.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
        let w: Vec<C64> = v.iter().zip(a).map(|(y, x)| y - overlap * x).collect();
        let norm = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return w.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// A detector with up to `max_levels` integer-multiple levels and a set of
/// up to `max_trajectories` trajectories at rational-multiple heights.
pub fn configuration<R: Rng>(
    rng: &mut R,
    max_levels: usize,
    max_trajectories: usize,
) -> (DetectorSpec, TrajectorySet) {
    let levels = rng.random_range(1..=max_levels);
    let omega0 = rng.random_range(0.3..2.0);
    let mut multiples: Vec<usize> = sample(rng, 12, levels).into_iter().map(|k| k + 1).collect();
    multiples.sort_unstable();
    let freqs: Vec<f64> = multiples.iter().map(|&k| omega0 * k as f64).collect();
    let couplings: Vec<C64> = (0..levels)
        .map(|_| {
            C64::from_polar(
                rng.random_range(0.2..1.0),
                rng.random_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let det = DetectorSpec::new(freqs, couplings).expect("admissible detector");

    let n = rng.random_range(1..=max_trajectories);
    let z0 = rng.random_range(0.3..1.5);
    let amps = unit_vector(rng, n);
    let mut trajectories = Vec::with_capacity(n);
    let mut used = Vec::new();
    for amp in amps {
        loop {
            let z = z0 * HEIGHT_RATIOS[rng.random_range(0..HEIGHT_RATIOS.len())];
            // Half of the branches sit on the common axis.
            let x: [f64; 2] = if rng.random_bool(0.5) {
                [0.0, 0.0]
            } else {
                [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]
            };
            if !used.contains(&(z.to_bits(), x[0].to_bits(), x[1].to_bits())) {
                used.push((z.to_bits(), x[0].to_bits(), x[1].to_bits()));
                trajectories.push(Trajectory::new(z, x, amp).expect("valid trajectory"));
                break;
            }
        }
    }
    (
        det,
        TrajectorySet::new(trajectories).expect("normalized set"),
    )
}
