use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use unruh_core::continuum::{
    cell_coherence_ratio, continuum_spectrum_slice, kernel_csv, NodeIndex,
};
use unruh_core::detector::{
    compare_tables, joint_state_checked, measured_internal, neglog_matrix, reduced_internal,
    reference_neglog, write_comparison,
};
use unruh_core::io::fmt_csv;
use unruh_core::overlaps::{convergence_report, oracle_lambda_quadrature, oracle_overlap_finite_t};
use unruh_core::specfun::{lambda_axis_xbar, lambda_axis_xi, lambda_overlap, linspace, LambdaGrid};
use unruh_core::{Trajectory, C64};

use crate::config::{Overrides, RunConfig};
use crate::CliError;

/// Table tolerance for the example comparison.
const EXAMPLE_TOLERANCE: f64 = 0.15;

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}

fn warn_all(warnings: &[unruh_core::geometry::RegimeWarning]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

pub fn state(cfg: &RunConfig, ov: &Overrides) -> Result<(), CliError> {
    let det = cfg.detector()?;
    let set = cfg.trajectories()?;
    let inter = cfg.interaction(ov)?;
    let rho = joint_state_checked(&det, &set, &inter)?;
    let dir = cfg.out_dir(ov);
    let rho = if cfg.output.absolute {
        rho.to_absolute(inter.epsilon, inter.time(&det))?
    } else {
        rho
    };
    warn_all(&rho.warnings);
    write(&dir, "joint_state.json", &rho.to_json()?)?;
    write(
        &dir,
        "reduced_internal.json",
        &reduced_internal(&rho).to_json()?,
    )?;
    Ok(())
}

pub fn measure(cfg: &RunConfig, ov: &Overrides) -> Result<(), CliError> {
    let det = cfg.detector()?;
    let set = cfg.trajectories()?;
    let inter = cfg.interaction(ov)?;
    let b = cfg.measurement(&set)?;
    let rho = joint_state_checked(&det, &set, &inter)?;
    warn_all(&rho.warnings);
    let dir = cfg.out_dir(ov);
    let meas = measured_internal(&rho, &b)?;
    write(
        &dir,
        "neglog_matrix.csv",
        &neglog_matrix(&meas, det.len())?.to_csv(),
    )?;
    if cfg.output.absolute || cfg.output.normalize {
        let abs = rho.to_absolute(inter.epsilon, inter.time(&det))?;
        let abs_meas = measured_internal(&abs, &b)?;
        if cfg.output.normalize {
            let (normalized, trace) = abs_meas.normalized()?;
            write(
                &dir,
                "measured_internal_normalized.json",
                &normalized.to_json(Some(trace))?,
            )?;
        }
        if cfg.output.absolute {
            write(&dir, "measured_internal.json", &abs_meas.to_json(None)?)?;
            return Ok(());
        }
    }
    write(&dir, "measured_internal.json", &meas.to_json(None)?)?;
    Ok(())
}

fn q_tag(q: f64) -> String {
    let s = format!("{q}");
    s.replace('.', "p").replace('-', "m")
}

pub fn lambda_grid(cfg: &RunConfig, ov: &Overrides) -> Result<(), CliError> {
    let sec = cfg.lambda_grid.as_ref();
    let qs =
        ov.q.clone()
            .or_else(|| sec.and_then(|s| s.q.clone()))
            .unwrap_or_else(|| vec![0.0, 1.0, 2.0, 10.0]);
    let xi = sec.and_then(|s| s.xi_range).unwrap_or([-3.0, 3.0]);
    let xbar = sec.and_then(|s| s.xbar_range).unwrap_or([0.0, 5.0]);
    let steps = ov.grid.or(sec.and_then(|s| s.steps)).unwrap_or(101);
    if steps < 2 {
        return Err(CliError::Config("grid needs at least 2 steps".into()));
    }
    let dir = cfg.out_dir(ov);
    let mut axis_xi = String::from("q,delta_xi,lambda\n");
    let mut axis_xbar = String::from("q,delta_xbar,lambda\n");
    for &q in &qs {
        let g = LambdaGrid::uniform(q, (xi[0], xi[1]), (xbar[0], xbar[1]), steps)?;
        write(&dir, &format!("lambda_grid_q{}.csv", q_tag(q)), &g.to_csv())?;
        for &x in &g.xi_samples {
            let _ = writeln!(
                axis_xi,
                "{},{},{}",
                fmt_csv(q),
                fmt_csv(x),
                fmt_csv(lambda_axis_xi(q, x))
            );
        }
        for &x in &g.xbar_samples {
            let _ = writeln!(
                axis_xbar,
                "{},{},{}",
                fmt_csv(q),
                fmt_csv(x),
                fmt_csv(lambda_axis_xbar(q, x))
            );
        }
    }
    write(&dir, "lambda_axis_xi.csv", &axis_xi)?;
    write(&dir, "lambda_axis_xbar.csv", &axis_xbar)?;
    Ok(())
}

pub fn oracle_validate(cfg: &RunConfig, ov: &Overrides) -> Result<(), CliError> {
    let sec = cfg.oracle.as_ref();
    let omega = sec.and_then(|s| s.omega).unwrap_or(1.0);
    let z = sec.and_then(|s| s.z).unwrap_or(1.0);
    let a = cfg
        .interaction
        .as_ref()
        .and_then(|s| s.rindler_a)
        .unwrap_or(1.0);
    let t_list = sec
        .and_then(|s| s.t_list.clone())
        .or_else(|| ov.t.map(|t| vec![t]))
        .unwrap_or_else(|| vec![10.0, 20.0, 40.0, 80.0]);
    let dir = cfg.out_dir(ov);

    let report = convergence_report(omega, z, a, &t_list)?;
    for r in report.rows.iter().filter(|r| !r.in_regime) {
        eprintln!(
            "warning: T={} is below 1/omega; switching transients dominate",
            r.t
        );
    }
    write(&dir, "convergence.csv", &report.to_csv())?;
    eprintln!("convergence slope {:.4}", report.fitted_slope());

    let qs =
        ov.q.clone()
            .or_else(|| sec.and_then(|s| s.q.clone()))
            .unwrap_or_else(|| vec![0.0, 1.0, 2.0, 10.0]);
    let n = ov.grid.or(sec.and_then(|s| s.grid)).unwrap_or(25);
    let mut diff = String::from("q,delta_xi,delta_xbar,closed_form,quadrature,diff\n");
    let mut worst = 0.0f64;
    for &q in &qs {
        for &xi in &linspace(-3.0, 3.0, n) {
            for &xb in &linspace(0.0, 5.0, n) {
                let closed = lambda_overlap(q, xi, xb);
                let quad = oracle_lambda_quadrature(q, xi, xb)?.value;
                worst = worst.max((closed - quad).abs());
                let cells = [q, xi, xb, closed, quad, closed - quad].map(fmt_csv);
                let _ = writeln!(diff, "{}", cells.join(","));
            }
        }
    }
    write(&dir, "lambda_oracle_diff.csv", &diff)?;
    eprintln!("max |lambda closed form - quadrature| {worst:.3e}");

    let traj = Trajectory::on_axis(z, C64::new(1.0, 0.0))?;
    let t_sweep = *t_list.last().expect("nonempty T list");
    let a_values = sec
        .and_then(|s| s.a_values.clone())
        .unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    let values = a_values
        .iter()
        .map(|&av| {
            oracle_overlap_finite_t(omega, &traj, omega, &traj, t_sweep, av).map(|r| r.value)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut sweep = String::from("a,T,oracle,rel_to_first\n");
    for (&av, &v) in a_values.iter().zip(&values) {
        let cells = [av, t_sweep, v, v / values[0] - 1.0].map(fmt_csv);
        let _ = writeln!(sweep, "{}", cells.join(","));
    }
    write(&dir, "a_sweep.csv", &sweep)?;
    Ok(())
}

pub fn paper_example(cfg: &RunConfig, ov: &Overrides) -> Result<(), CliError> {
    let ex = unruh_core::paper_example()?;
    let dir = cfg.out_dir(ov);
    write(&dir, "example_neglog.csv", &ex.neglog.to_csv())?;
    let cmp = compare_tables(&ex.neglog, &reference_neglog(), EXAMPLE_TOLERANCE)?;
    let report = write_comparison(&cmp, EXAMPLE_TOLERANCE);
    write(&dir, "example_comparison.txt", &report)?;
    print!("{report}");
    Ok(())
}

pub fn continuum(cfg: &RunConfig, ov: &Overrides) -> Result<(), CliError> {
    let sec = cfg
        .continuum
        .as_ref()
        .ok_or_else(|| CliError::Config("missing section `continuum`".into()))?;
    let (amp, zeta) = sec.build()?;
    let grid = *amp.grid();
    let qs =
        ov.q.clone()
            .or_else(|| sec.q.clone())
            .unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    let centers: Vec<NodeIndex> = sec
        .cells
        .iter()
        .map(|c| grid.locate(c.center))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Config(format!("continuum.cells: {e}")))?;
    let dir = cfg.out_dir(ov);

    let pairs: Vec<(NodeIndex, NodeIndex)> = centers
        .iter()
        .flat_map(|&a| centers.iter().map(move |&b| (a, b)))
        .collect();
    write(
        &dir,
        "continuum_kernel.csv",
        &kernel_csv(&qs, &pairs, &amp, &zeta)?,
    )?;

    let omegas = sec
        .slice_omegas
        .clone()
        .unwrap_or_else(|| linspace(0.05, 5.0, ov.grid.unwrap_or(100)));
    for (k, &node) in centers.iter().enumerate() {
        let slice = continuum_spectrum_slice(&amp, &zeta, node, &omegas)?;
        let p = grid.position(node);
        let mut s = String::from("omega,x,y,z,value\n");
        for (&w, &v) in omegas.iter().zip(&slice) {
            let _ = writeln!(s, "{}", [w, p[0], p[1], p[2], v].map(fmt_csv).join(","));
        }
        write(&dir, &format!("spectrum_slice_{k}.csv"), &s)?;
    }

    // Cell-summed coherence ratios between every pair of cells.
    let members: Vec<Vec<NodeIndex>> = sec
        .cells
        .iter()
        .map(|c| {
            amp.support()
                .into_iter()
                .filter(|&n| {
                    let p = grid.position(n);
                    (0..3).all(|d| {
                        (p[d] - c.center[d]).abs() <= c.half_width + 1e-9 * grid.spacing[d]
                    })
                })
                .collect()
        })
        .collect();
    let mut ratios = String::from("q,cell_a,cell_b,ratio\n");
    for &q in &qs {
        for a in 0..members.len() {
            for b in a + 1..members.len() {
                let r = cell_coherence_ratio(q, &amp, &zeta, &members[a], &members[b])?;
                let _ = writeln!(ratios, "{},{a},{b},{}", fmt_csv(q), fmt_csv(r));
            }
        }
    }
    write(&dir, "cell_coherence.csv", &ratios)?;
    Ok(())
}
