use rayon::prelude::*;

use apcl::ap::{CubeQuadrature, TorusField};
use apcl::flux::{lift_flux, nondegeneracy_scan, LiftedFlux, ScanConfig, ScanReport};
use apcl::longtime::{decay_experiment, krylov_bogoliubov, split_window_w1, wasserstein1, Observable};
use apcl::noise::BrownianPath;
use apcl::solver::{CoupledRun, Solver, SolverConfig, Trajectory, ENTROPY_TOLERANCE};

use crate::config::{Column, ConvergenceMode, RunConfig};
use crate::manifest::TaskStatus;
use crate::output::{num, observable_stream, opt_num, snapshot, table};
use crate::{CliError, Command};

/// Per-step increase allowed on the coupled L¹ distance.
const CONTRACTION_SLACK: f64 = 1e-12;
const MASS_TOLERANCE: f64 = 1e-12;

/// Files and audit results of one subcommand.
#[derive(Debug, Default)]
pub struct Report {
    pub tasks: Vec<TaskStatus>,
    pub files: Vec<(String, Vec<u8>)>,
    pub seeds: Vec<u64>,
}

impl Report {
    fn task(&mut self, name: &str, pass: bool, detail: String) {
        self.tasks.push(TaskStatus {
            name: name.into(),
            pass,
            detail,
        });
    }

    fn file(&mut self, name: impl Into<String>, body: impl Into<Vec<u8>>) {
        self.files.push((name.into(), body.into()));
    }
}

pub fn execute(cmd: Command, cfg: &RunConfig) -> Result<Report, CliError> {
    let lf = lift_flux(&cfg.flux, &cfg.gens)?;
    match cmd {
        Command::Simulate => simulate(cfg, lf),
        Command::Contract => contract(cfg, lf),
        Command::Decay => decay(cfg, lf),
        Command::Invariant => invariant(cfg, lf),
        Command::Ndscan => ndscan(cfg),
        Command::Isometry => isometry(cfg),
        Command::Energy => energy(cfg, lf),
        Command::Convergence => convergence(cfg, lf),
    }
}

fn initial(cfg: &RunConfig) -> Result<TorusField, CliError> {
    Ok(cfg.initial.lift_to_torus(&cfg.solver.shape)?)
}

fn initial_b(cfg: &RunConfig, cmd: &str) -> Result<TorusField, CliError> {
    let p = cfg.initial_b.as_ref().ok_or_else(|| CliError::ConfigParse {
        line: 0,
        message: format!("{cmd} needs an [initial_b] section"),
    })?;
    Ok(p.lift_to_torus(&cfg.solver.shape)?)
}

fn mass_task(report: &mut Report, label: &str, traj: &Trajectory) {
    let scale = 1.0 + traj.max_abs;
    let rel = traj.max_mass_drift / scale;
    report.task(
        &format!("mass{label}"),
        rel <= MASS_TOLERANCE,
        format!("drift/(1+sup|v|)={rel:.3e}"),
    );
}

fn entropy_task(report: &mut Report, cfg: &SolverConfig, label: &str, traj: &Trajectory) {
    if cfg.entropy_alphas.is_empty() {
        return;
    }
    // the strictest per-α threshold, since only the overall minimum is kept inline
    let smallest = cfg.entropy_alphas.iter().map(|a| a.abs()).fold(f64::INFINITY, f64::min);
    let limit = -ENTROPY_TOLERANCE * (1.0 + smallest);
    report.task(
        &format!("entropy{label}"),
        traj.entropy_min >= limit,
        format!("min_residual={:.3e} limit={limit:.1e}", traj.entropy_min),
    );
}

fn snapshots(report: &mut Report, prefix: &str, traj: &Trajectory) {
    for ((field, &step), &t) in traj.snapshots.iter().zip(&traj.snapshot_steps).zip(&traj.times) {
        report.file(format!("snapshots/{prefix}step_{step:08}.bin"), snapshot(field, step, t));
    }
}

fn simulate(cfg: &RunConfig, lf: LiftedFlux) -> Result<Report, CliError> {
    let solver = Solver::new(cfg.solver.clone(), lf)?;
    let traj = solver.solve_seeded(&initial(cfg)?)?;
    let mut report = Report {
        seeds: vec![cfg.solver.seed],
        ..Report::default()
    };
    report.file("observables.txt", observable_stream("simulate", &cfg.columns, &traj.records));
    snapshots(&mut report, "", &traj);
    mass_task(&mut report, "", &traj);
    entropy_task(&mut report, &cfg.solver, "", &traj);
    Ok(report)
}

fn distance_table(cmd: &str, run: &CoupledRun) -> String {
    let rows: Vec<Vec<String>> = run.distance.iter().map(|(t, d)| vec![num(*t), num(*d)]).collect();
    table(cmd, &[("t", "time"), ("distance", "L1")], &rows)
}

fn contract(cfg: &RunConfig, lf: LiftedFlux) -> Result<Report, CliError> {
    let solver = Solver::new(cfg.solver.clone(), lf)?;
    let (a, b) = (initial(cfg)?, initial_b(cfg, "contract")?);
    let grid = solver.coupled_grid(&a, &b)?;
    let path = solver.brownian(&grid, cfg.solver.seed)?;
    let run = solver.coupled_solve_on(&a, &b, &path, grid)?;
    let mut report = Report {
        seeds: vec![cfg.solver.seed],
        ..Report::default()
    };
    report.file("distance.csv", distance_table("contract", &run));
    report.file("observables_a.txt", observable_stream("contract", &cfg.columns, &run.a.records));
    report.file("observables_b.txt", observable_stream("contract", &cfg.columns, &run.b.records));
    report.task(
        "contraction",
        run.max_increase <= CONTRACTION_SLACK,
        format!("max_step_increase={:.3e}", run.max_increase),
    );
    mass_task(&mut report, "_a", &run.a);
    mass_task(&mut report, "_b", &run.b);
    entropy_task(&mut report, &cfg.solver, "_a", &run.a);
    entropy_task(&mut report, &cfg.solver, "_b", &run.b);
    Ok(report)
}

fn scan(cfg: &RunConfig) -> Result<ScanReport, CliError> {
    let e = &cfg.experiment;
    let mut sc = ScanConfig::new(e.deltas.clone(), e.shells.clone(), e.scan_window);
    sc.xi_points = e.xi_points;
    Ok(nondegeneracy_scan(&cfg.flux, &cfg.gens, &sc)?)
}

fn scan_table(report: &ScanReport) -> String {
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                num(r.delta),
                r.shell.to_string(),
                num(r.iota),
                num(r.theta_hat),
                (r.degenerate as u8).to_string(),
            ]
        })
        .collect();
    table(
        "ndscan",
        &[
            ("delta", "resonance"),
            ("J", "shell"),
            ("iota", "measure"),
            ("theta_hat", "exponent"),
            ("degenerate_flag", "bool"),
        ],
        &rows,
    )
}

fn decay(cfg: &RunConfig, lf: LiftedFlux) -> Result<Report, CliError> {
    let solver = Solver::new(cfg.solver.clone(), lf)?;
    let (a, b) = (initial(cfg)?, initial_b(cfg, "decay")?);
    let scan = scan(cfg)?;
    let seeds = cfg.experiment.seeds.clone();
    let mut report = Report {
        seeds: seeds.clone(),
        ..Report::default()
    };
    report.file("ndscan.csv", scan_table(&scan));
    let exp = match decay_experiment(&solver, &scan, &a, &b, &seeds) {
        Err(apcl::Error::DegenerateFluxRefused { theta }) => {
            report.task("nondegenerate", false, format!("refused: theta_hat={theta:.3e}"));
            return Ok(report);
        }
        other => other?,
    };
    let rows: Vec<Vec<String>> = exp
        .reports
        .iter()
        .map(|r| vec![r.seed.to_string(), opt_num(r.t50), opt_num(r.t20), opt_num(r.t10)])
        .collect();
    report.file(
        "decay.csv",
        table("decay", &[("seed", "id"), ("t50", "time"), ("t20", "time"), ("t10", "time")], &rows),
    );
    let worst = exp.reports.iter().map(|r| r.max_increase).fold(f64::NEG_INFINITY, f64::max);
    report.task(
        "monotone",
        worst <= CONTRACTION_SLACK,
        format!("max_step_increase={worst:.3e}"),
    );
    report.task(
        "t20_attained",
        exp.succeeded(),
        format!(
            "median_t20={} attained_fraction={:.2}",
            opt_num(exp.median_t20),
            exp.attained_fraction
        ),
    );
    Ok(report)
}

fn invariant(cfg: &RunConfig, lf: LiftedFlux) -> Result<Report, CliError> {
    let solver = Solver::new(cfg.solver.clone(), lf)?;
    let seeds = vec![cfg.solver.seed, cfg.solver.seed.wrapping_add(1)];
    let data = [initial(cfg)?, initial_b(cfg, "invariant")?];
    let trajs: Vec<Trajectory> = data
        .par_iter()
        .zip(seeds.par_iter())
        .map(|(v0, &seed)| {
            let grid = solver.time_grid(v0.max_abs())?;
            let path = solver.brownian(&grid, seed)?;
            solver.solve_on(v0, &path, grid)
        })
        .collect::<Result<_, _>>()?;
    let t_end = cfg.solver.t_end;
    let t_burn = cfg.experiment.t_burn.unwrap_or(0.5 * t_end);
    let mut report = Report {
        seeds,
        ..Report::default()
    };
    let mut rows = Vec::new();
    let observables: Vec<Observable> = cfg
        .columns
        .iter()
        .filter_map(|c| match c {
            Column::Observable(o) => Some(*o),
            Column::EntropyMin => None,
        })
        .collect();
    for &obs in &observables {
        let mu_a = krylov_bogoliubov(&trajs[0], obs, t_burn)?;
        let mu_b = krylov_bogoliubov(&trajs[1], obs, t_burn)?;
        let w1 = wasserstein1(&mu_a, &mu_b)?;
        let std = mu_a.pooled(&mu_b)?.std();
        rows.push(vec![obs.name().to_string(), num(w1), num(std), num(w1 / std)]);
        if obs == Observable::L1 {
            report.task(
                "agreement_l1",
                w1 <= 0.1 * std,
                format!("w1={w1:.3e} pooled_std={std:.3e}"),
            );
        }
    }
    report.file(
        "agreement.csv",
        table(
            "invariant",
            &[("observable", "name"), ("w1", "value"), ("pooled_std", "value"), ("ratio", "1")],
            &rows,
        ),
    );
    // split-window W1 of the first run's L¹ over a doubling schedule of horizons
    let full = krylov_bogoliubov(&trajs[0], Observable::L1, 0.0)?;
    let mut split = Vec::new();
    for frac in [0.25, 0.5, 1.0] {
        let horizon = frac * t_end;
        split.push((horizon, split_window_w1(&full.window(0.0, horizon * (1.0 + 1e-12))?)?));
    }
    let rows: Vec<Vec<String>> = split.iter().map(|(t, w)| vec![num(*t), num(*w)]).collect();
    report.file("w1.csv", table("invariant", &[("T", "time"), ("W1", "L1")], &rows));
    let decreasing = split.windows(2).all(|w| w[1].1 < w[0].1);
    report.task(
        "split_window_decreasing",
        decreasing,
        split.iter().map(|(t, w)| format!("T={t}:{w:.3e}")).collect::<Vec<_>>().join(" "),
    );
    Ok(report)
}

fn ndscan(cfg: &RunConfig) -> Result<Report, CliError> {
    let scan = scan(cfg)?;
    let mut report = Report::default();
    report.file("ndscan.csv", scan_table(&scan));
    let thetas: Vec<String> = scan.theta.iter().map(|(j, t)| format!("J={j}:{t:.4}")).collect();
    report.task(
        "scan",
        true,
        format!("theta_hat {} degenerate={}", thetas.join(" "), scan.degenerate),
    );
    Ok(report)
}

fn isometry(cfg: &RunConfig) -> Result<Report, CliError> {
    let e = &cfg.experiment;
    let p = &cfg.initial;
    let offset = if e.offset.is_empty() {
        vec![0.0; cfg.gens.rank()]
    } else {
        e.offset.clone()
    };
    let quad = CubeQuadrature {
        points_per_unit: e.points_per_unit,
        ..CubeQuadrature::default()
    };
    let torus = p.lift_to_torus(&cfg.solver.shape)?.l1();
    let cube = p.cube_average_norm1(&offset, &e.radii, &quad)?;
    let rel = |v: f64| (v - torus).abs() / torus;
    let rows: Vec<Vec<String>> = e
        .radii
        .iter()
        .zip(&cube)
        .map(|(r, v)| vec![num(*r), num(*v), num(torus), num(rel(*v))])
        .collect();
    let mut report = Report::default();
    report.file(
        "isometry.csv",
        table(
            "isometry",
            &[("R", "length"), ("cube_average", "L1"), ("torus_l1", "L1"), ("rel_err", "1")],
            &rows,
        ),
    );
    let last = rel(*cube.last().unwrap());
    report.task("isometry", last <= 0.05, format!("rel_err={last:.3e} at R={}", e.radii.last().unwrap()));
    Ok(report)
}

fn energy(cfg: &RunConfig, lf: LiftedFlux) -> Result<Report, CliError> {
    let noise = cfg.solver.noise.as_ref().ok_or_else(|| CliError::ConfigParse {
        line: 0,
        message: "energy needs a [noise] section".into(),
    })?;
    let d0 = noise.d0();
    let solver = Solver::new(cfg.solver.clone(), lf)?;
    let v0 = initial(cfg)?;
    let e0 = v0.l2().powi(2);
    let grid = solver.time_grid(v0.max_abs())?;
    let seeds: Vec<u64> = (0..cfg.experiment.paths as u64).map(|i| cfg.solver.seed.wrapping_add(i)).collect();
    let series: Vec<Vec<(f64, f64)>> = seeds
        .par_iter()
        .map(|&seed| {
            let path = solver.brownian(&grid, seed)?;
            let traj = solver.solve_on(&v0, &path, grid)?;
            Ok(traj.records.iter().map(|r| (r.t, r.l2 * r.l2)).collect())
        })
        .collect::<Result<_, apcl::Error>>()?;
    let n = series.len() as f64;
    let mut rows = Vec::new();
    let mut ok = true;
    let mut margin = f64::INFINITY;
    for i in 0..series[0].len() {
        let t = series[0][i].0;
        let mean = series.iter().map(|s| s[i].1).sum::<f64>() / n;
        let var = series.iter().map(|s| (s[i].1 - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        let se = (var / n).sqrt();
        let bound = e0 + d0 * t + 4.0 * se;
        ok &= mean <= bound;
        margin = margin.min(bound - mean);
        rows.push(vec![num(t), num(mean), num(se), num(bound)]);
    }
    let mut report = Report {
        seeds,
        ..Report::default()
    };
    report.file(
        "energy.csv",
        table(
            "energy",
            &[("t", "time"), ("mean_energy", "L2^2"), ("standard_error", "L2^2"), ("bound", "L2^2")],
            &rows,
        ),
    );
    report.task("energy_bound", ok, format!("paths={} min_margin={margin:.3e}", series.len()));
    Ok(report)
}

/// Cell averages of `f` on the coarser grid `shape` (each axis must divide).
fn restrict(f: &TorusField, shape: &[usize]) -> Result<TorusField, CliError> {
    let fine = f.shape();
    let ratios: Vec<usize> = fine.iter().zip(shape).map(|(a, b)| a / b).collect();
    if fine.iter().zip(shape).any(|(a, b)| a % b != 0) || fine.len() != shape.len() {
        return Err(CliError::ConfigParse {
            line: 0,
            message: format!("resolution {shape:?} does not divide {fine:?}"),
        });
    }
    let mut out = vec![0.0; shape.iter().product()];
    let block: usize = ratios.iter().product();
    let fine_strides = f.strides();
    let coarse = TorusField::zeros(shape)?;
    let coarse_strides = coarse.strides();
    for (idx, v) in f.values().iter().enumerate() {
        let mut c = 0;
        for axis in 0..fine.len() {
            let i = (idx / fine_strides[axis]) % fine[axis];
            c += (i / ratios[axis]) * coarse_strides[axis];
        }
        out[c] += v / block as f64;
    }
    Ok(TorusField::new(shape.to_vec(), out)?)
}

fn convergence(cfg: &RunConfig, lf: LiftedFlux) -> Result<Report, CliError> {
    let mut report = Report {
        seeds: vec![cfg.solver.seed],
        ..Report::default()
    };
    match cfg.experiment.mode {
        ConvergenceMode::Resolution => resolution_sweep(cfg, lf, &mut report)?,
        ConvergenceMode::Viscosity => viscosity_sweep(cfg, lf, &mut report)?,
    }
    Ok(report)
}

fn rank_shape(rank: usize, m: usize) -> Vec<usize> {
    vec![m; rank]
}

fn resolution_sweep(cfg: &RunConfig, lf: LiftedFlux, report: &mut Report) -> Result<(), CliError> {
    let mut ms = cfg.experiment.resolutions.clone();
    ms.sort_unstable();
    ms.dedup();
    if ms.len() < 2 {
        return Err(CliError::ConfigParse {
            line: 0,
            message: "resolution sweep needs at least two resolutions".into(),
        });
    }
    let rank = cfg.gens.rank();
    // one time grid (the finest) and one path for every resolution
    let finest = *ms.last().unwrap();
    let mut base = cfg.solver.clone();
    base.shape = rank_shape(rank, finest);
    let probe = Solver::new(base.clone(), lf.clone())?;
    let v_fine = cfg.initial.lift_to_torus(&base.shape)?;
    let grid = probe.time_grid(v_fine.max_abs())?;
    let path: BrownianPath = probe.brownian(&grid, cfg.solver.seed)?;
    let finals: Vec<TorusField> = ms
        .par_iter()
        .map(|&m| {
            let mut c = base.clone();
            c.shape = rank_shape(rank, m);
            let solver = Solver::new(c, lf.clone())?;
            let v0 = cfg.initial.lift_to_torus(&rank_shape(rank, m))?;
            Ok(solver.solve_on(&v0, &path, grid)?.final_state().clone())
        })
        .collect::<Result<_, apcl::Error>>()?;
    let mut dists = Vec::new();
    for i in 0..ms.len() - 1 {
        let coarse = &finals[i];
        let d = restrict(&finals[i + 1], coarse.shape())?.l1_distance(coarse);
        dists.push(d);
    }
    let mut rows = Vec::new();
    let mut orders = Vec::new();
    for i in 0..dists.len() {
        let order = if i + 1 < dists.len() {
            let r = ms[i + 1] as f64 / ms[i] as f64;
            let o = (dists[i] / dists[i + 1]).ln() / r.ln();
            orders.push(o);
            num(o)
        } else {
            "nan".into()
        };
        rows.push(vec![ms[i].to_string(), ms[i + 1].to_string(), num(dists[i]), order]);
    }
    report.file(
        "convergence.csv",
        table(
            "convergence",
            &[("M", "cells"), ("M_next", "cells"), ("l1_to_next", "L1"), ("order", "1")],
            &rows,
        ),
    );
    let decreasing = dists.windows(2).all(|w| w[1] < w[0]);
    let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    report.task(
        "self_convergence",
        decreasing && (orders.is_empty() || min_order >= 0.4),
        format!("min_order={min_order:.3}"),
    );
    Ok(())
}

fn viscosity_sweep(cfg: &RunConfig, lf: LiftedFlux, report: &mut Report) -> Result<(), CliError> {
    let mut eps = cfg.experiment.epsilons.clone();
    eps.sort_by(|a, b| b.total_cmp(a));
    let v0 = initial(cfg)?;
    // the stiffest viscosity fixes one time grid and one path for the sweep
    let mut stiff = cfg.solver.clone();
    stiff.epsilon = eps.first().copied().unwrap_or(0.0);
    let probe = Solver::new(stiff, lf.clone())?;
    let grid = probe.time_grid(v0.max_abs())?;
    let path = probe.brownian(&grid, cfg.solver.seed)?;
    let run = |e: f64| -> Result<TorusField, apcl::Error> {
        let mut c = cfg.solver.clone();
        c.epsilon = e;
        let solver = Solver::new(c, lf.clone())?;
        Ok(solver.solve_on(&v0, &path, grid)?.final_state().clone())
    };
    let reference = run(0.0)?;
    let dists: Vec<f64> = eps
        .par_iter()
        .map(|&e| Ok(run(e)?.l1_distance(&reference)))
        .collect::<Result<_, apcl::Error>>()?;
    let rows: Vec<Vec<String>> = eps.iter().zip(&dists).map(|(e, d)| vec![num(*e), num(*d)]).collect();
    report.file(
        "convergence.csv",
        table("convergence", &[("epsilon", "viscosity"), ("l1_to_inviscid", "L1")], &rows),
    );
    let monotone = dists.windows(2).all(|w| w[1] < w[0]);
    report.task(
        "vanishing_viscosity",
        monotone,
        eps.iter()
            .zip(&dists)
            .map(|(e, d)| format!("eps={e}:{d:.3e}"))
            .collect::<Vec<_>>()
            .join(" "),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restriction_averages_blocks() {
        let f = TorusField::new(vec![4], vec![1.0, 3.0, 5.0, 7.0]).unwrap();
        let r = restrict(&f, &[2]).unwrap();
        assert_eq!(r.values(), &[2.0, 6.0]);
        let g = TorusField::from_fn(&[8, 8], |y| y[0] + y[1]).unwrap();
        assert!((restrict(&g, &[4, 4]).unwrap().mean() - g.mean()).abs() < 1e-15);
    }
}
