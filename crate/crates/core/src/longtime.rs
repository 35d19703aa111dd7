//! Long-time statistics of trajectories: Krylov–Bogoliubov time averages,
//! 1-Wasserstein comparison of scalar empirical measures, decay of solution
//! differences under shared noise and growth of time-integrated Sobolev norms.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::ap::TorusField;
use crate::error::{Error, Result};
use crate::flux::scan::{slope, ScanReport};
use crate::solver::{CoupledRun, ObservationRecord, Solver, Trajectory, DECAY_FRACTIONS};
use crate::spectral;

/// Scalar observables φ evaluated along a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Observable {
    L1,
    L2,
    Mean,
    /// |v̂| at the first unit frequency.
    Fourier1,
    /// |v̂| at twice the first unit frequency.
    Fourier2,
    Hs,
}

impl Observable {
    pub const ALL: [Observable; 6] = [
        Observable::L1,
        Observable::L2,
        Observable::Mean,
        Observable::Fourier1,
        Observable::Fourier2,
        Observable::Hs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::L1 => "l1",
            Observable::L2 => "l2",
            Observable::Mean => "mean",
            Observable::Fourier1 => "fourier1",
            Observable::Fourier2 => "fourier2",
            Observable::Hs => "hs",
        }
    }

    pub fn of(self, r: &ObservationRecord) -> f64 {
        match self {
            Observable::L1 => r.l1,
            Observable::L2 => r.l2,
            Observable::Mean => r.mean,
            Observable::Fourier1 => r.fourier1,
            Observable::Fourier2 => r.fourier2,
            Observable::Hs => r.hs,
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Observable::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown observable {s:?}")))
    }
}

/// Uniformly weighted samples `(t, φ(v(t)))` of one observable.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalMeasure {
    observable: Observable,
    samples: Vec<(f64, f64)>,
}

impl EmpiricalMeasure {
    pub fn new(observable: Observable, samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyWindow {
                t_burn: f64::NAN,
                t_end: f64::NAN,
            });
        }
        if samples.iter().any(|s| !s.1.is_finite()) {
            return Err(Error::InvalidInput("non-finite sample".into()));
        }
        Ok(EmpiricalMeasure { observable, samples })
    }

    pub fn observable(&self) -> Observable {
        self.observable
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.1).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().map(|s| s.1).sum::<f64>() / self.len() as f64
    }

    /// Sample standard deviation (0 for a single sample).
    pub fn std(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        let ss: f64 = self.samples.iter().map(|s| (s.1 - m).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    }

    /// Naive standard error `std/√n` (ignores autocorrelation).
    pub fn standard_error(&self) -> f64 {
        self.std() / (self.len() as f64).sqrt()
    }

    /// Samples with `t0 < t ≤ t1`.
    pub fn window(&self, t0: f64, t1: f64) -> Result<Self> {
        let samples: Vec<_> = self.samples.iter().copied().filter(|s| s.0 > t0 && s.0 <= t1).collect();
        if samples.is_empty() {
            return Err(Error::EmptyWindow { t_burn: t0, t_end: t1 });
        }
        Ok(EmpiricalMeasure {
            observable: self.observable,
            samples,
        })
    }

    /// Merge of two measures of the same observable.
    pub fn pooled(&self, other: &Self) -> Result<Self> {
        check_same(self, other)?;
        let mut samples = self.samples.clone();
        samples.extend_from_slice(&other.samples);
        Ok(EmpiricalMeasure {
            observable: self.observable,
            samples,
        })
    }
}

fn check_same(a: &EmpiricalMeasure, b: &EmpiricalMeasure) -> Result<()> {
    if a.observable != b.observable {
        return Err(Error::ObservableMismatch(a.observable.name().into(), b.observable.name().into()));
    }
    Ok(())
}

/// Per-record values of `obs` over `(t_burn, t_end]`; their mean is the
/// running time average `(1/(T − t_burn)) ∫ φ(v(t)) dt` on the record grid.
pub fn krylov_bogoliubov(traj: &Trajectory, obs: Observable, t_burn: f64) -> Result<EmpiricalMeasure> {
    krylov_bogoliubov_records(&traj.records, obs, t_burn)
}

pub fn krylov_bogoliubov_records(
    records: &[ObservationRecord],
    obs: Observable,
    t_burn: f64,
) -> Result<EmpiricalMeasure> {
    let t_end = records.last().map(|r| r.t).unwrap_or(0.0);
    let samples: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.t > t_burn)
        .map(|r| (r.t, obs.of(r)))
        .collect();
    if !(t_burn < t_end) || samples.is_empty() {
        return Err(Error::EmptyWindow { t_burn, t_end });
    }
    EmpiricalMeasure::new(obs, samples)
}

/// 1-Wasserstein distance between two scalar empirical distributions:
/// `∫₀¹ |Q_a(u) − Q_b(u)| du` over the merged quantile grid.
pub fn wasserstein1(a: &EmpiricalMeasure, b: &EmpiricalMeasure) -> Result<f64> {
    check_same(a, b)?;
    let mut xa = a.values();
    let mut xb = b.values();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len(), xb.len());
    // walk the merged breakpoints i/na and j/nb with exact integer comparisons
    let (mut i, mut j) = (0usize, 0usize);
    let mut u_prev = 0.0;
    let mut total = 0.0;
    while i < na && j < nb {
        let next_a = (i + 1) * nb;
        let next_b = (j + 1) * na;
        let u = next_a.min(next_b) as f64 / (na * nb) as f64;
        total += (u - u_prev) * (xa[i] - xb[j]).abs();
        u_prev = u;
        if next_a <= next_b {
            i += 1;
        }
        if next_b <= next_a {
            j += 1;
        }
    }
    Ok(total)
}

/// Summary of one coupled run.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport {
    pub seed: u64,
    pub distance: Vec<(f64, f64)>,
    pub d0: f64,
    pub max_increase: f64,
    pub t50: Option<f64>,
    pub t20: Option<f64>,
    pub t10: Option<f64>,
}

impl DecayReport {
    pub fn from_run(seed: u64, run: &CoupledRun) -> Self {
        debug_assert_eq!(DECAY_FRACTIONS, [0.5, 0.2, 0.1]);
        let [t50, t20, t10] = run.first_below;
        DecayReport {
            seed,
            distance: run.distance.clone(),
            d0: run.d0,
            max_increase: run.max_increase,
            t50,
            t20,
            t10,
        }
    }

    /// Nonincreasing distance series up to `slack` per step.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.max_increase <= slack
    }
}

#[derive(Clone, Debug)]
pub struct DecayExperiment {
    /// Reports in seed order.
    pub reports: Vec<DecayReport>,
    /// Median t₂₀ with unattained runs counted as +∞; `None` when it is infinite.
    pub median_t20: Option<f64>,
    pub attained_fraction: f64,
}

impl DecayExperiment {
    /// False when t₂₀ is unattained for more than half of the seeds.
    pub fn succeeded(&self) -> bool {
        self.median_t20.is_some()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("seed,t50,t20,t10\n");
        let fmt = |t: Option<f64>| t.map(|x| format!("{x:.16e}")).unwrap_or_else(|| "inf".into());
        for r in &self.reports {
            s.push_str(&format!("{},{},{},{}\n", r.seed, fmt(r.t50), fmt(r.t20), fmt(r.t10)));
        }
        s
    }
}

/// Median of values with `None` as +∞.
pub fn median_time(times: &[Option<f64>]) -> Option<f64> {
    if times.is_empty() {
        return None;
    }
    let mut v: Vec<f64> = times.iter().map(|t| t.unwrap_or(f64::INFINITY)).collect();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let m = if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    };
    m.is_finite().then_some(m)
}

const MEAN_TOLERANCE: f64 = 1e-12;

/// Coupled runs for every seed (in parallel, reported in seed order).
///
/// Refused with [`Error::DegenerateFluxRefused`] when `scan` flagged the flux.
pub fn decay_experiment(
    solver: &Solver,
    scan: &ScanReport,
    v0_a: &TorusField,
    v0_b: &TorusField,
    seeds: &[u64],
) -> Result<DecayExperiment> {
    if scan.degenerate {
        return Err(Error::DegenerateFluxRefused { theta: scan.min_theta() });
    }
    for v in [v0_a, v0_b] {
        if v.mean().abs() > MEAN_TOLERANCE * (1.0 + v.max_abs()) {
            return Err(Error::InvalidInput(format!("initial datum has mean {}", v.mean())));
        }
    }
    if solver.n_modes() == 0 {
        return Err(Error::InvalidInput("decay experiment needs a nontrivial noise".into()));
    }
    let grid = solver.coupled_grid(v0_a, v0_b)?;
    let reports = seeds
        .par_iter()
        .map(|&seed| {
            let path = solver.brownian(&grid, seed)?;
            let run = solver.coupled_solve_on(v0_a, v0_b, &path, grid)?;
            Ok(DecayReport::from_run(seed, &run))
        })
        .collect::<Result<Vec<_>>>()?;
    let t20: Vec<Option<f64>> = reports.iter().map(|r| r.t20).collect();
    let attained = t20.iter().filter(|t| t.is_some()).count();
    Ok(DecayExperiment {
        median_t20: median_time(&t20),
        attained_fraction: attained as f64 / reports.len().max(1) as f64,
        reports,
    })
}

/// Cumulative `∫₀ᵗ ‖v‖_{Hˢ} dt` with a late-window slope.
#[derive(Clone, Debug, PartialEq)]
pub struct SobolevGrowth {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub cumulative: Vec<f64>,
    /// Least-squares slope of the cumulative integral over `[T/2, T]`.
    pub slope: f64,
    /// Same over the window shifted back by `T/4`.
    pub shifted_slope: f64,
}

impl SobolevGrowth {
    pub fn from_series(times: Vec<f64>, norms: Vec<f64>) -> Result<Self> {
        if times.len() != norms.len() || times.len() < 5 {
            return Err(Error::StrideTooCoarse(format!(
                "{} samples are too few for the time integral",
                times.len()
            )));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("times must increase".into()));
        }
        let mut cumulative = Vec::with_capacity(times.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for i in 1..times.len() {
            acc += 0.5 * (times[i] - times[i - 1]) * (norms[i] + norms[i - 1]);
            cumulative.push(acc);
        }
        let t0 = times[0];
        let t_end = *times.last().unwrap();
        let span = t_end - t0;
        let slope = window_slope(&times, &cumulative, t0 + 0.5 * span, t_end)?;
        let shifted_slope = window_slope(&times, &cumulative, t0 + 0.25 * span, t0 + 0.75 * span)?;
        Ok(SobolevGrowth {
            times,
            norms,
            cumulative,
            slope,
            shifted_slope,
        })
    }

    /// `|shifted/slope − 1|`.
    pub fn slope_shift(&self) -> f64 {
        (self.shifted_slope / self.slope - 1.0).abs()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,cumHs\n");
        for (t, c) in self.times.iter().zip(&self.cumulative) {
            s.push_str(&format!("{t:.16e},{c:.16e}\n"));
        }
        s
    }
}

fn window_slope(t: &[f64], y: &[f64], lo: f64, hi: f64) -> Result<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = t
        .iter()
        .zip(y)
        .filter(|(t, _)| **t >= lo - 1e-12 && **t <= hi + 1e-12)
        .map(|(a, b)| (*a, *b))
        .unzip();
    if xs.len() < 2 {
        return Err(Error::StrideTooCoarse(format!("window [{lo}, {hi}] holds {} samples", xs.len())));
    }
    Ok(slope(&xs, &ys))
}

/// Hˢ growth computed from the stored snapshots with index `s`.
pub fn sobolev_growth(traj: &Trajectory, s: f64) -> Result<SobolevGrowth> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidInput(format!("s = {s} not in (0, 1)")));
    }
    let norms = traj.snapshots.iter().map(|v| spectral::sobolev_norm(v, s)).collect();
    SobolevGrowth::from_series(traj.times.clone(), norms)
}

/// Hˢ growth from the recorded observable stream (index fixed by the solver config).
pub fn sobolev_growth_from_records(records: &[ObservationRecord]) -> Result<SobolevGrowth> {
    SobolevGrowth::from_series(
        records.iter().map(|r| r.t).collect(),
        records.iter().map(|r| r.hs).collect(),
    )
}

/// Pointwise ensemble mean of growth curves sampled at the same times.
pub fn ensemble_growth(curves: &[SobolevGrowth]) -> Result<SobolevGrowth> {
    let first = curves.first().ok_or_else(|| Error::InvalidInput("no curves".into()))?;
    if curves.iter().any(|c| c.times != first.times) {
        return Err(Error::InvalidInput("curves sampled at different times".into()));
    }
    let n = curves.len() as f64;
    let norms = (0..first.times.len())
        .map(|i| curves.iter().map(|c| c.norms[i]).sum::<f64>() / n)
        .collect();
    SobolevGrowth::from_series(first.times.clone(), norms)
}

/// W₁ between `(T/2, 3T/4]` and `(3T/4, T]` of one measure.
pub fn split_window_w1(mu: &EmpiricalMeasure) -> Result<f64> {
    let t_end = mu.samples().last().map(|s| s.0).unwrap_or(0.0);
    let a = mu.window(0.5 * t_end, 0.75 * t_end)?;
    let b = mu.window(0.75 * t_end, t_end)?;
    wasserstein1(&a, &b)
}
