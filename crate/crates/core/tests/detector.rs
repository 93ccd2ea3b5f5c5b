use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;
use unruh_core::detector::{
    example_setup, hermiticity_defect, min_eigenvalue, EXAMPLE_Q_TOLERANCE,
};
use unruh_core::{
    joint_state, measured_internal, neglog_matrix, paper_example, reduced_internal, BlockDensity,
    DetectorSpec, InternalDensity, MeasurementBasisVector, NeglogMatrix, ReducedSpectrum,
    Trajectory, TrajectorySet, C64,
};

/// 1-based level lookup.
fn level(n: &NeglogMatrix, j: usize, i: usize) -> Option<f64> {
    n.get(j - 1, i - 1)
}

fn planck_per_t(omega: f64, z: f64) -> f64 {
    omega / (2.0 * PI * (2.0 * PI * omega * z).exp_m1())
}

#[test]
fn single_level_single_trajectory() {
    let det = DetectorSpec::uniform(&[1.0]).unwrap();
    let set = TrajectorySet::uniform_on_axis(&[1.0]).unwrap();
    let rho = joint_state(&det, &set, 1e-9).unwrap();
    assert_eq!(rho.excited.shape(), (1, 1));
    assert_relative_eq!(rho.excited[(0, 0)].re, 2.9778e-4, max_relative = 1e-4);
    assert_relative_eq!(
        rho.excited[(0, 0)].re,
        planck_per_t(1.0, 1.0),
        max_relative = 1e-14
    );
    assert_eq!(rho.ground[(0, 0)], C64::new(1.0, 0.0));
}

#[test]
fn example_diagonal_entry() {
    let (det, set) = example_setup();
    let rho = joint_state(&det, &set, EXAMPLE_Q_TOLERANCE).unwrap();
    // Level 1 on the z = 1 branch: composite index level * N + trajectory.
    let k = 1;
    assert_relative_eq!(rho.excited[(k, k)].re, 9.926e-5, max_relative = 1e-3);
    assert_relative_eq!(
        rho.excited[(k, k)].re,
        planck_per_t(1.0, 1.0) / 3.0,
        max_relative = 1e-13
    );
}

#[test]
fn zero_coupling_gives_zero_block() {
    let det = DetectorSpec::new(vec![1.0, 2.0, 3.0], vec![C64::new(0.0, 0.0); 3]).unwrap();
    let set = TrajectorySet::uniform_on_axis(&[0.5, 1.0, 1.5]).unwrap();
    let rho = joint_state(&det, &set, 1e-9).unwrap();
    assert!(rho.excited.iter().all(|c| c.norm() == 0.0));
}

#[test]
fn reduced_spectrum_of_example() {
    let (det, set) = example_setup();
    let red = reduced_internal(&joint_state(&det, &set, EXAMPLE_Q_TOLERANCE).unwrap());
    assert_relative_eq!(red.weights[0], 2.4996e-3, max_relative = 1e-4);
    for (i, &w) in red.weights.iter().enumerate() {
        let omega = (i + 1) as f64;
        let expect: f64 = [0.5, 1.0, 1.5]
            .iter()
            .map(|&z| planck_per_t(omega, z))
            .sum::<f64>()
            / 3.0;
        assert_relative_eq!(w, expect, max_relative = 1e-13);
    }
    assert_relative_eq!(red.ground, 1.0, max_relative = 1e-14);
}

#[test]
fn measured_example_entries() {
    let ex = paper_example().unwrap();
    let m = &ex.measured.matrix;
    assert_relative_eq!(m[(1, 1)].re, 8.333e-4, max_relative = 1e-3);
    assert_relative_eq!(m[(1, 2)].re, 3.566e-5, max_relative = 1e-3);
    assert_relative_eq!(m[(0, 0)].re, 1.0, max_relative = 1e-14);
    assert_eq!(
        level(&ex.neglog, 1, 1).map(|v| (v * 10.0).round() / 10.0),
        Some(3.1)
    );
    assert_eq!(
        level(&ex.neglog, 1, 2).map(|v| (v * 10.0).round() / 10.0),
        Some(4.4)
    );
}

#[test]
fn neglog_spot_values() {
    let ex = paper_example().unwrap();
    let rounded = |j, i| level(&ex.neglog, j, i).map(|v| (v * 10.0).round() / 10.0);
    for (j, v) in [(2, 4.2), (3, 5.4), (4, 6.6), (5, 7.9), (6, 9.2)] {
        assert_eq!(rounded(j, j), Some(v), "({j},{j})");
    }
    for (j, i, v) in [(2, 4, 7.0), (3, 6, 9.8), (1, 3, 6.0)] {
        assert_eq!(rounded(j, i), Some(v), "({j},{i})");
    }
    assert_eq!(level(&ex.neglog, 8, 12).map(f64::round), Some(34.0));
    assert_eq!(level(&ex.neglog, 4, 5), None);
}

#[test]
fn seven_alignments() {
    let ex = paper_example().unwrap();
    let allowed = [3.0, 2.0, 1.5, 1.0, 2.0 / 3.0, 0.5, 1.0 / 3.0];
    let mut ratios: Vec<f64> = Vec::new();
    for j in 1..=12 {
        for i in 1..=12 {
            let r = j as f64 / i as f64;
            let present = level(&ex.neglog, j, i).is_some();
            let realizable = allowed.iter().any(|&a| (a - r).abs() < 1e-12);
            assert_eq!(present, realizable, "({j},{i})");
            if present && !ratios.iter().any(|&x| (x - r).abs() < 1e-12) {
                ratios.push(r);
            }
        }
    }
    assert_eq!(ratios.len(), 7);
}

#[test]
fn diagonal_dominates_rows_and_columns() {
    let ex = paper_example().unwrap();
    let m = ex.measured.excited();
    for j in 0..12 {
        for i in 0..12 {
            if i != j {
                assert!(m[(j, j)].norm() > m[(j, i)].norm(), "row {j} col {i}");
                assert!(m[(i, i)].norm() > m[(j, i)].norm(), "col {i} row {j}");
            }
        }
    }
}

#[test]
fn example_is_symmetric() {
    let ex = paper_example().unwrap();
    let m = &ex.measured.matrix;
    assert!(hermiticity_defect(m) < 1e-15);
    assert!(m.iter().all(|c| c.im.abs() < 1e-18));
    for j in 1..=12 {
        for i in 1..=12 {
            assert_eq!(level(&ex.neglog, j, i), level(&ex.neglog, i, j));
        }
    }
}

#[test]
fn partial_trace_over_complete_basis() {
    let (det, set) = example_setup();
    let rho = joint_state(&det, &set, EXAMPLE_Q_TOLERANCE).unwrap();
    let red = reduced_internal(&rho);
    let n = set.len();
    let mut sum = nalgebra::DMatrix::<C64>::zeros(det.len() + 1, det.len() + 1);
    for k in 0..n {
        let b: Vec<C64> = (0..n)
            .map(|m| {
                C64::from_polar(
                    1.0 / (n as f64).sqrt(),
                    2.0 * PI * (k * m) as f64 / n as f64,
                )
            })
            .collect();
        sum += &measured_internal(&rho, &MeasurementBasisVector::new(b).unwrap())
            .unwrap()
            .matrix;
    }
    assert!((sum[(0, 0)].re - red.ground).abs() < 1e-12);
    for j in 0..det.len() {
        for i in 0..det.len() {
            let expect = if i == j { red.weights[i] } else { 0.0 };
            assert!((sum[(j + 1, i + 1)] - expect).norm() < 1e-12, "({j},{i})");
        }
    }
}

#[test]
fn single_trajectory_has_no_offdiagonals() {
    let det = DetectorSpec::uniform(&[1.0, 2.0, 3.0, 4.5]).unwrap();
    let set = TrajectorySet::new(vec![
        Trajectory::new(0.8, [0.1, 0.0], C64::new(0.0, 1.0)).unwrap()
    ])
    .unwrap();
    let rho = joint_state(&det, &set, 1e-9).unwrap();
    let b = MeasurementBasisVector::new(vec![C64::new(1.0, 0.0)]).unwrap();
    let m = measured_internal(&rho, &b).unwrap().excited();
    for j in 0..4 {
        for i in 0..4 {
            if i != j {
                assert_eq!(m[(j, i)].norm(), 0.0);
            }
        }
    }
    let neg = neglog_matrix(&measured_internal(&rho, &b).unwrap(), 4).unwrap();
    assert_eq!(level(&neg, 1, 2), None);
}

#[test]
fn json_round_trips() {
    let ex = paper_example().unwrap();
    let back = BlockDensity::from_json(&ex.joint.to_json().unwrap()).unwrap();
    assert_eq!(back.excited, ex.joint.excited);
    assert_eq!(back.ground, ex.joint.ground);
    let red = reduced_internal(&ex.joint);
    assert_eq!(
        ReducedSpectrum::from_json(&red.to_json().unwrap()).unwrap(),
        red
    );
    let m = InternalDensity::from_json(&ex.measured.to_json(None).unwrap()).unwrap();
    assert_eq!(m, ex.measured);
}

#[test]
fn rescaling_multiplies_per_eps2t_blocks() {
    let (det, set) = example_setup();
    let gamma = 3.7;
    let a = joint_state(&det, &set, EXAMPLE_Q_TOLERANCE).unwrap();
    let b = joint_state(
        &det.rescaled(gamma).unwrap(),
        &set.rescaled(gamma).unwrap(),
        EXAMPLE_Q_TOLERANCE,
    )
    .unwrap();
    assert_eq!(a.excited.shape(), b.excited.shape());
    for (x, y) in a.excited.iter().zip(b.excited.iter()) {
        assert!(
            (y - x * gamma).norm() <= 1e-12 * (x * gamma).norm() + 1e-300,
            "{x} {y}"
        );
    }
}

fn random_state() -> impl Strategy<Value = (DetectorSpec, TrajectorySet)> {
    let levels = prop::collection::btree_set(1u32..10, 1..5);
    let branches = prop::collection::btree_set(1u32..8, 1..4);
    (
        levels,
        branches,
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8),
        prop::collection::vec(0.0f64..0.6, 8),
    )
        .prop_map(|(levels, branches, phases, offsets)| {
            let freqs: Vec<f64> = levels.iter().map(|&k| 0.7 * k as f64).collect();
            let couplings = (0..freqs.len())
                .map(|k| C64::from_polar(1.0, 3.0 * phases[k].0))
                .collect();
            let det = DetectorSpec::new(freqs, couplings).unwrap();
            let n = branches.len();
            let raw: Vec<C64> = (0..n)
                .map(|k| C64::new(1.0 + phases[k].1, phases[k].0))
                .collect();
            let norm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let trajs = branches
                .iter()
                .enumerate()
                .map(|(k, &h)| {
                    let x = if k % 2 == 0 { 0.0 } else { offsets[k] };
                    Trajectory::new(0.25 * h as f64, [x, 0.0], raw[k] / norm).unwrap()
                })
                .collect();
            (det, TrajectorySet::new(trajs).unwrap())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn joint_state_is_hermitian_and_psd((det, set) in random_state()) {
        let rho = joint_state(&det, &set, 1e-9).unwrap();
        prop_assert!(hermiticity_defect(&rho.excited) < 1e-12);
        let tr: f64 = (0..rho.excited.nrows()).map(|k| rho.excited[(k, k)].re).sum();
        prop_assert!(min_eigenvalue(&rho.excited) >= -1e-10 * tr);
        let b = MeasurementBasisVector::initial(&set);
        let m = measured_internal(&rho, &b).unwrap();
        prop_assert!(hermiticity_defect(&m.matrix) < 1e-12);
        prop_assert!(min_eigenvalue(&m.excited()) >= -1e-10 * m.trace());
    }
}
