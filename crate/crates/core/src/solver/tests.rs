use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::ap::{FreqIndex, GeneratorSet, TorusField, TrigPolynomial};
use crate::error::Error;
use crate::flux::{lift_flux, FluxModel, LiftedFlux};
use crate::noise::{BrownianPath, NoiseModel};

fn gens1() -> Arc<GeneratorSet> {
    Arc::new(GeneratorSet::canonical(1))
}

fn burgers1() -> LiftedFlux {
    lift_flux(&FluxModel::directional_burgers(vec![1.0]).unwrap(), &gens1()).unwrap()
}

fn linear1(c: f64) -> LiftedFlux {
    lift_flux(&FluxModel::linear(vec![c]).unwrap(), &gens1()).unwrap()
}

fn cos_noise(amp: f64) -> NoiseModel {
    let g = TrigPolynomial::cosine(gens1(), FreqIndex(vec![1]), amp).unwrap();
    NoiseModel::build(vec![g]).unwrap()
}

fn sine_field(m: usize, amp: f64) -> TorusField {
    TorusField::from_fn(&[m], |y| amp * (2.0 * PI * y[0]).sin()).unwrap()
}

fn eo() -> StepParams {
    StepParams {
        scheme: Scheme::EngquistOsher,
        epsilon: 0.0,
    }
}

#[test]
fn constant_state_is_fixed() {
    let v = TorusField::constant(&[32], 0.7).unwrap();
    for scheme in [Scheme::EngquistOsher, Scheme::Rusanov, Scheme::GodunovBurgers] {
        let p = StepParams { scheme, epsilon: 0.01 };
        let out = step(&v, &burgers1(), None, 1e-3, &p).unwrap();
        for x in out.values() {
            assert!((x - 0.7).abs() < 1e-15);
        }
    }
}

#[test]
fn step_conserves_grid_sum() {
    let v = sine_field(64, 1.0);
    let dj = cos_noise(0.3).lift(&[64]).unwrap().fields()[0].scaled(0.1);
    let out = step(&v, &burgers1(), Some(&dj), 0.005, &eo()).unwrap();
    let before: f64 = v.values().iter().sum();
    let after: f64 = out.values().iter().sum();
    assert!((before - after).abs() < 1e-12);
}

#[test]
fn linear_flux_is_upwind() {
    let v = sine_field(16, 1.0);
    let c = 0.8;
    let dt = 0.02;
    let out = step(&v, &linear1(c), None, dt, &eo()).unwrap();
    let nu = c * dt * 16.0;
    let x = v.values();
    for i in 0..16 {
        let expect = x[i] - nu * (x[i] - x[(i + 15) % 16]);
        assert!((out.values()[i] - expect).abs() < 1e-14);
    }
    // negative speed: upwind from the right
    let out = step(&v, &linear1(-c), None, dt, &eo()).unwrap();
    for i in 0..16 {
        let expect = x[i] + nu * (x[(i + 1) % 16] - x[i]);
        assert!((out.values()[i] - expect).abs() < 1e-14);
    }
}

#[test]
fn step_rejects_large_courant() {
    let v = sine_field(16, 1.0);
    let err = step(&v, &burgers1(), None, 0.1, &eo()).unwrap_err();
    assert!(matches!(err, Error::CflViolation { .. }));
}

#[test]
fn godunov_needs_quadratic_flux() {
    let fm = FluxModel::polynomial(vec![vec![0.0], vec![0.0], vec![0.0], vec![1.0]]).unwrap();
    let lf = lift_flux(&fm, &gens1()).unwrap();
    let mut cfg = SolverConfig::new(vec![16], 0.1);
    cfg.scheme = Scheme::GodunovBurgers;
    assert!(matches!(Solver::new(cfg, lf).unwrap_err(), Error::UnsupportedScheme { .. }));
}

#[test]
fn zero_data_zero_noise_stays_zero() {
    let cfg = SolverConfig::new(vec![64], 0.5);
    let solver = Solver::new(cfg, burgers1()).unwrap();
    let traj = solver.solve_seeded(&TorusField::zeros(&[64]).unwrap()).unwrap();
    assert!(traj.final_state().values().iter().all(|&x| x == 0.0));
    assert!(traj.records.iter().all(|r| r.l1 == 0.0 && r.hs == 0.0));
}

#[test]
fn time_grid_lands_on_t_end() {
    let cfg = SolverConfig::new(vec![128], 0.77).with_noise(cos_noise(0.5));
    let solver = Solver::new(cfg, burgers1()).unwrap();
    let g = solver.time_grid(1.0).unwrap();
    assert!((g.dt * g.n_steps as f64 - 0.77).abs() < 1e-12);
    // cfl 0.4 on window L
    let bound = 0.4 / 128.0 / g.window;
    assert!(g.dt <= bound * (1.0 + 1e-12));
}

#[test]
fn noisy_run_conserves_mass_and_is_reproducible() {
    let mut cfg = SolverConfig::new(vec![128], 1.0).with_noise(cos_noise(0.5));
    cfg.seed = 11;
    let solver = Solver::new(cfg, burgers1()).unwrap();
    let v0 = sine_field(128, 0.5);
    let a = solver.solve_seeded(&v0).unwrap();
    let b = solver.solve_seeded(&v0).unwrap();
    assert_eq!(a.final_state(), b.final_state());
    assert!(a.max_mass_drift <= 1e-12);
    assert!(a.final_state().l1() > 0.0);
    assert_eq!(a.times.len(), a.snapshots.len());
    assert!(a.times.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn contraction_under_shared_noise() {
    let cfg = SolverConfig::new(vec![128], 1.0).with_noise(cos_noise(0.5));
    let solver = Solver::new(cfg, burgers1()).unwrap();
    let a = sine_field(128, 1.0);
    let b = TorusField::from_fn(&[128], |y| 0.5 * (4.0 * PI * y[0]).cos()).unwrap();
    let grid = solver.coupled_grid(&a, &b).unwrap();
    let path = solver.brownian(&grid, 3).unwrap();
    let run = solver.coupled_solve_on(&a, &b, &path, grid).unwrap();
    assert!(run.max_increase <= 1e-12, "{}", run.max_increase);
    assert!(run.distance.last().unwrap().1 < run.d0);

    let same = solver.coupled_solve_on(&a, &a, &path, grid).unwrap();
    assert!(same.distance.iter().all(|d| d.1 == 0.0));
    assert_eq!(same.first_below, [Some(0.0); 3]);
}

#[test]
fn entropy_audit_on_shock() {
    let mut cfg = SolverConfig::new(vec![128], 0.4);
    cfg.window = Some(1.0);
    let alphas = [-1.0, -0.5, 0.0, 0.5, 1.0];
    cfg.entropy_alphas = alphas.to_vec();
    let solver = Solver::new(cfg, burgers1()).unwrap();
    let traj = solver.solve_seeded(&sine_field(128, 1.0)).unwrap();
    let path = BrownianPath::zero(0, traj.grid.n_steps, traj.grid.dt);
    let audit = entropy_residual(&solver, &traj, &path, &alphas).unwrap();
    assert!(audit.passes(), "{:?}", audit.min_per_alpha());
    assert!(audit.replay_error == 0.0);
    assert!((audit.min() - traj.entropy_min).abs() < 1e-14);
}

#[test]
fn entropy_audit_alpha_outside_range() {
    let cfg = SolverConfig::new(vec![64], 0.2);
    let solver = Solver::new(cfg, burgers1()).unwrap();
    let traj = solver.solve_seeded(&sine_field(64, 0.5)).unwrap();
    let path = BrownianPath::zero(0, traj.grid.n_steps, traj.grid.dt);
    let audit = entropy_residual(&solver, &traj, &path, &[3.0, -3.0]).unwrap();
    for r in audit.min_per_alpha() {
        assert!(r.abs() <= 1e-12, "{r}");
    }
}

#[test]
fn downwind_fails_entropy_audit() {
    let mut cfg = SolverConfig::new(vec![128], 0.05);
    cfg.window = Some(1.0);
    cfg.scheme = Scheme::Downwind;
    cfg.entropy_alphas = vec![0.0, 0.5];
    let solver = Solver::new(cfg, burgers1()).unwrap();
    let traj = solver.solve_seeded(&sine_field(128, 1.0)).unwrap();
    assert!(traj.entropy_min < -1e-3, "{}", traj.entropy_min);
}

#[test]
fn audit_needs_dense_snapshots() {
    let mut cfg = SolverConfig::new(vec![32], 0.1);
    cfg.snapshot_stride = 0;
    let solver = Solver::new(cfg, burgers1()).unwrap();
    let traj = solver.solve_seeded(&sine_field(32, 0.5)).unwrap();
    let path = BrownianPath::zero(0, traj.grid.n_steps, traj.grid.dt);
    assert!(matches!(
        entropy_residual(&solver, &traj, &path, &[0.0]),
        Err(Error::StrideTooCoarse(_))
    ));
    assert_eq!(traj.snapshots.len(), 2);
}

#[test]
fn viscosity_smooths() {
    let mut cfg = SolverConfig::new(vec![64], 0.2);
    cfg.epsilon = 0.02;
    let solver = Solver::new(cfg, burgers1()).unwrap();
    let traj = solver.solve_seeded(&sine_field(64, 1.0)).unwrap();
    let l2: Vec<f64> = traj.records.iter().map(|r| r.l2).collect();
    assert!(l2.windows(2).all(|w| w[1] <= w[0] + 1e-14));
}

#[test]
fn two_dimensional_rotation() {
    let gens = Arc::new(GeneratorSet::new(vec![vec![1.0], vec![2f64.sqrt()]]).unwrap());
    let fm = FluxModel::directional_burgers(vec![1.0]).unwrap();
    let lf = lift_flux(&fm, &gens).unwrap();
    let g = TrigPolynomial::cosine(gens.clone(), FreqIndex(vec![1, 1]), 0.2).unwrap();
    let noise = NoiseModel::build(vec![g]).unwrap();
    let cfg = SolverConfig::new(vec![32, 32], 0.2).with_noise(noise);
    let solver = Solver::new(cfg, lf).unwrap();
    let v0 = TrigPolynomial::sine(gens, FreqIndex(vec![1, 0]), 0.5)
        .unwrap()
        .lift_to_torus(&[32, 32])
        .unwrap();
    let traj = solver.solve_seeded(&v0).unwrap();
    assert!(traj.max_mass_drift <= 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn monotone_schemes_contract(
        a in prop::collection::vec(-1.0f64..1.0, 24),
        b in prop::collection::vec(-1.0f64..1.0, 24),
        scheme in prop::sample::select(vec![Scheme::EngquistOsher, Scheme::Rusanov, Scheme::GodunovBurgers]),
    ) {
        let va = TorusField::new(vec![24], a).unwrap();
        let vb = TorusField::new(vec![24], b).unwrap();
        let lf = burgers1();
        let dt = 0.4 / 24.0 / 2.0;
        let p = StepParams { scheme, epsilon: 0.0 };
        let na = step(&va, &lf, None, dt, &p).unwrap();
        let nb = step(&vb, &lf, None, dt, &p).unwrap();
        prop_assert!(na.l1_distance(&nb) <= va.l1_distance(&vb) + 1e-14);
        let sa: f64 = va.values().iter().sum();
        let sna: f64 = na.values().iter().sum();
        prop_assert!((sa - sna).abs() < 1e-12);
    }
}
