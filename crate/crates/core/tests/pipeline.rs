//! End-to-end paths through the public API.

use std::sync::Arc;

use apcl::ap::{read_polynomial, write_polynomial, FreqIndex, GeneratorSet, TrigPolynomial};
use apcl::flux::{lift_flux, nondegeneracy_scan, FluxModel, ScanConfig};
use apcl::longtime::{krylov_bogoliubov, wasserstein1, Observable};
use apcl::noise::NoiseModel;
use apcl::solver::{Scheme, Solver, SolverConfig};

fn golden() -> Arc<GeneratorSet> {
    Arc::new(GeneratorSet::new(vec![vec![1.0], vec![2f64.sqrt()]]).unwrap())
}

#[test]
fn quasi_periodic_burgers_keeps_mass_and_range() {
    let gens = golden();
    let v0 = TrigPolynomial::cosine(gens.clone(), FreqIndex(vec![1, 0]), 0.5)
        .unwrap()
        .add(&TrigPolynomial::sine(gens.clone(), FreqIndex(vec![0, 1]), 0.25).unwrap())
        .unwrap();
    let flux = FluxModel::directional_burgers(vec![1.0]).unwrap();
    let lf = lift_flux(&flux, &gens).unwrap();
    let mut cfg = SolverConfig::new(vec![64, 64], 0.5);
    cfg.snapshot_stride = 0;
    let solver = Solver::new(cfg, lf).unwrap();
    let field = v0.lift_to_torus(&[64, 64]).unwrap();
    let traj = solver.solve_seeded(&field).unwrap();
    let (lo, hi) = field.range();
    let (a, b) = traj.final_state().range();
    // a monotone scheme without noise obeys the maximum principle
    assert!(a >= lo - 1e-12 && b <= hi + 1e-12);
    assert!(traj.final_state().mean().abs() < 1e-13);
    assert!(traj.final_state().l1() <= field.l1() + 1e-12);
}

#[test]
fn polynomial_text_round_trip_preserves_evaluation() {
    let gens = golden();
    let p = TrigPolynomial::cosine(gens.clone(), FreqIndex(vec![2, -1]), 0.3).unwrap();
    let q = read_polynomial(&write_polynomial(&p)).unwrap();
    for x in [0.0, 0.37, 12.5, -401.25] {
        let (u, v) = (p.evaluate_ap(&[0.0, 0.0], &[x]).unwrap(), q.evaluate_ap(&[0.0, 0.0], &[x]).unwrap());
        assert_eq!(u, v);
    }
}

#[test]
fn scan_separates_burgers_from_transport() {
    let gens = golden();
    let sc = ScanConfig::new(vec![0.1, 0.05, 0.025], vec![1, 2], 2.0);
    let burgers = nondegeneracy_scan(&FluxModel::directional_burgers(vec![1.0]).unwrap(), &gens, &sc).unwrap();
    let linear = nondegeneracy_scan(&FluxModel::linear(vec![1.0]).unwrap(), &gens, &sc).unwrap();
    assert!(!burgers.degenerate);
    assert!(linear.degenerate);
}

#[test]
fn same_seed_gives_same_occupation_measure() {
    let gens = Arc::new(GeneratorSet::canonical(1));
    let g = TrigPolynomial::cosine(gens.clone(), FreqIndex(vec![1]), 0.5).unwrap();
    let noise = NoiseModel::build(vec![g]).unwrap();
    let lf = lift_flux(&FluxModel::directional_burgers(vec![1.0]).unwrap(), &gens).unwrap();
    let mut cfg = SolverConfig::new(vec![64], 2.0).with_noise(noise);
    cfg.scheme = Scheme::Rusanov;
    cfg.snapshot_stride = 0;
    cfg.seed = 5;
    let solver = Solver::new(cfg, lf).unwrap();
    let v0 = TrigPolynomial::sine(gens, FreqIndex(vec![1]), 0.5).unwrap().lift_to_torus(&[64]).unwrap();
    let a = solver.solve_seeded(&v0).unwrap();
    let b = solver.solve_seeded(&v0).unwrap();
    let (ma, mb) = (
        krylov_bogoliubov(&a, Observable::L2, 1.0).unwrap(),
        krylov_bogoliubov(&b, Observable::L2, 1.0).unwrap(),
    );
    assert_eq!(wasserstein1(&ma, &mb).unwrap(), 0.0);
}
