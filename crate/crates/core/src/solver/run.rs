use super::config::{Scheme, SolverConfig, StepParams};
use super::kernel::{self, Grid, Scratch};
use crate::ap::{FreqIndex, TorusField};
use crate::error::{Error, Result};
use crate::flux::{LiftedFlux, ScalarFlux};
use crate::noise::{BrownianPath, LiftedNoise};
use crate::spectral;

/// Monotonicity limit for the Courant sum and the diffusion number.
const MONOTONE_LIMIT: f64 = 1.0;
const SPEED_FLOOR: f64 = 1e-12;

/// One explicit step: conservative flux update, explicit viscosity, then the
/// additive increment `dJ`.
///
/// Fails with [`Error::CflViolation`] unless the Courant sum over the state's
/// value range is at most 1 (and likewise the diffusion number).
pub fn step(
    state: &TorusField,
    lf: &LiftedFlux,
    dj: Option<&TorusField>,
    dt: f64,
    params: &StepParams,
) -> Result<TorusField> {
    if lf.rank() != state.rank() {
        return Err(Error::InvalidInput("flux rank differs from grid rank".into()));
    }
    check_scheme(lf, params.scheme)?;
    let (lo, hi) = state.range();
    let c = kernel::courant(lf, state.shape(), dt, lo, hi);
    if c > MONOTONE_LIMIT {
        return Err(Error::CflViolation {
            courant: c,
            limit: MONOTONE_LIMIT,
        });
    }
    let d = kernel::diffusion_number(state.shape(), dt, params.epsilon);
    if d > MONOTONE_LIMIT {
        return Err(Error::CflViolation {
            courant: d,
            limit: MONOTONE_LIMIT,
        });
    }
    let grid = Grid::new(state.shape());
    let speeds = rusanov_speeds(lf, lo, hi);
    let mut out = vec![0.0; grid.len];
    let mut scratch = Scratch::default();
    kernel::flux_update(&grid, lf, params.scheme, &speeds, dt, state.values(), &mut out, &mut scratch);
    if params.epsilon > 0.0 {
        let tmp = out.clone();
        kernel::viscous_update(&grid, params.epsilon, dt, &tmp, &mut out);
    }
    let mut next = TorusField::from_raw(state.shape().to_vec(), out);
    if let Some(dj) = dj {
        next.axpy(1.0, dj);
    }
    if !next.is_finite() {
        return Err(Error::NonFiniteState(0));
    }
    Ok(next)
}

fn check_scheme(lf: &LiftedFlux, scheme: Scheme) -> Result<()> {
    if scheme == Scheme::GodunovBurgers
        && lf
            .directions()
            .iter()
            .any(|d| matches!(d, ScalarFlux::Polynomial { .. }))
    {
        return Err(Error::UnsupportedScheme {
            scheme: scheme.name().into(),
            flux: lf.family().into(),
        });
    }
    Ok(())
}

fn rusanov_speeds(lf: &LiftedFlux, lo: f64, hi: f64) -> Vec<f64> {
    lf.directions().iter().map(|f| f.max_speed(lo, hi)).collect()
}

/// Uniform time grid of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    pub n_steps: usize,
    /// Half-width L of the ξ-window the time step was sized for.
    pub window: f64,
}

/// Per-record observables. `entropy_min` is the smallest cell-entropy
/// residual since the previous record (NaN when the audit is off).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservationRecord {
    pub t: f64,
    pub l1: f64,
    pub l2: f64,
    pub mean: f64,
    pub hs: f64,
    pub fourier1: f64,
    pub fourier2: f64,
    pub entropy_min: f64,
}

impl ObservationRecord {
    pub const HEADER: &'static str =
        "t[time] l1[field] l2[field] mean[field] hs[field] fourier1[field] fourier2[field] entropy_min[field]";

    fn measure(t: f64, v: &TorusField, s: f64, entropy_min: f64) -> Self {
        let coeffs = spectral::dft(v);
        let rank = v.rank();
        let mut n1 = FreqIndex::zero(rank);
        n1.0[0] = 1;
        let mut n2 = FreqIndex::zero(rank);
        n2.0[0] = 2;
        ObservationRecord {
            t,
            l1: v.l1(),
            l2: v.l2(),
            mean: v.mean(),
            hs: spectral::sobolev_norm_of(v.shape(), &coeffs, s),
            fourier1: spectral::mode_modulus_of(v, &coeffs, &n1),
            fourier2: spectral::mode_modulus_of(v, &coeffs, &n2),
            entropy_min,
        }
    }

    pub fn to_line(&self) -> String {
        format!(
            "{:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
            self.t, self.l1, self.l2, self.mean, self.hs, self.fourier1, self.fourier2, self.entropy_min
        )
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub grid: TimeGrid,
    /// Times of the stored snapshots.
    pub times: Vec<f64>,
    pub snapshots: Vec<TorusField>,
    pub snapshot_steps: Vec<usize>,
    pub records: Vec<ObservationRecord>,
    pub initial_mean: f64,
    /// `max_t |mean(v(t)) − mean(v₀)|`, checked after every step.
    pub max_mass_drift: f64,
    pub max_abs: f64,
    /// Total deterministic sub-steps (equals `n_steps` unless CFL forced subcycling).
    pub substeps: usize,
    /// Smallest inline entropy residual over the run (NaN when the audit is off).
    pub entropy_min: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &TorusField {
        self.snapshots.last().expect("trajectory keeps its final state")
    }

    pub fn t_end(&self) -> f64 {
        self.grid.dt * self.grid.n_steps as f64
    }
}

/// Paired run under one noise path.
#[derive(Clone, Debug)]
pub struct CoupledRun {
    pub a: Trajectory,
    pub b: Trajectory,
    /// `(t, ‖v_a − v_b‖_{L¹})` at every observation step.
    pub distance: Vec<(f64, f64)>,
    /// `max_m d(t_{m+1}) − d(t_m)`, over every step.
    pub max_increase: f64,
    pub d0: f64,
    /// First times with `d ≤ frac · d0` for [`DECAY_FRACTIONS`].
    pub first_below: [Option<f64>; 3],
}

/// Fractions tracked by [`CoupledRun::first_below`].
pub const DECAY_FRACTIONS: [f64; 3] = [0.5, 0.2, 0.1];

struct RunState {
    v: TorusField,
    tmp: Vec<f64>,
    snapshots: Vec<TorusField>,
    times: Vec<f64>,
    snapshot_steps: Vec<usize>,
    records: Vec<ObservationRecord>,
    initial_mean: f64,
    max_drift: f64,
    max_abs: f64,
    pending_entropy: f64,
    entropy_min: f64,
}

impl RunState {
    fn new(v0: TorusField, s: f64, audit: bool) -> Self {
        let pending = if audit { f64::INFINITY } else { f64::NAN };
        let rec = ObservationRecord::measure(0.0, &v0, s, f64::NAN);
        RunState {
            initial_mean: v0.mean(),
            max_abs: v0.max_abs(),
            tmp: vec![0.0; v0.len()],
            snapshots: vec![v0.clone()],
            times: vec![0.0],
            snapshot_steps: vec![0],
            records: vec![rec],
            v: v0,
            max_drift: 0.0,
            pending_entropy: pending,
            entropy_min: pending,
        }
    }

    fn into_trajectory(self, grid: TimeGrid, substeps: usize) -> Trajectory {
        Trajectory {
            grid,
            times: self.times,
            snapshots: self.snapshots,
            snapshot_steps: self.snapshot_steps,
            records: self.records,
            initial_mean: self.initial_mean,
            max_mass_drift: self.max_drift,
            max_abs: self.max_abs,
            substeps,
            entropy_min: self.entropy_min,
        }
    }
}

/// Time integrator for the lifted problem `v_t + div_y f̃(v) = Σ h_k dβ_k`.
#[derive(Clone, Debug)]
pub struct Solver {
    cfg: SolverConfig,
    lf: LiftedFlux,
    grid: Grid,
    noise: Option<LiftedNoise>,
    variance_rate: f64,
}

impl Solver {
    pub fn new(cfg: SolverConfig, lf: LiftedFlux) -> Result<Self> {
        cfg.validate()?;
        if lf.rank() != cfg.shape.len() {
            return Err(Error::InvalidInput(format!(
                "flux has {} directions, grid has rank {}",
                lf.rank(),
                cfg.shape.len()
            )));
        }
        check_scheme(&lf, cfg.scheme)?;
        let noise = match &cfg.noise {
            Some(n) => Some(n.lift(&cfg.shape)?),
            None => None,
        };
        let variance_rate = noise.as_ref().map(|n| n.variance_rate_sup()).unwrap_or(0.0);
        Ok(Solver {
            grid: Grid::new(&cfg.shape),
            cfg,
            lf,
            noise,
            variance_rate,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn flux(&self) -> &LiftedFlux {
        &self.lf
    }

    pub fn noise(&self) -> Option<&LiftedNoise> {
        self.noise.as_ref()
    }

    pub fn n_modes(&self) -> usize {
        self.noise.as_ref().map(|n| n.fields().len()).unwrap_or(0)
    }

    /// `Δt = cfl · min Δy / max(maxⱼ sup_{|ξ|≤L} |ãⱼ|, tiny)`, further limited by
    /// `cfl · min Δy² / (2Pε)`, then shrunk so that `t_end` is a whole number
    /// of steps. The window is `L = ‖v₀‖∞ + 3 √(sup G² · t_end)`.
    pub fn time_grid(&self, v0_sup: f64) -> Result<TimeGrid> {
        let cfg = &self.cfg;
        let window = cfg
            .window
            .unwrap_or(v0_sup + 3.0 * (self.variance_rate * cfg.t_end).sqrt());
        let min_dy = cfg.shape.iter().map(|&m| 1.0 / m as f64).fold(f64::INFINITY, f64::min);
        let speed = self
            .lf
            .directions()
            .iter()
            .map(|f| f.max_speed(-window, window))
            .fold(0.0, f64::max)
            .max(SPEED_FLOOR);
        let mut dt_max = cfg.cfl * min_dy / speed;
        if cfg.epsilon > 0.0 {
            let p = cfg.shape.len() as f64;
            dt_max = dt_max.min(cfg.cfl * min_dy * min_dy / (2.0 * p * cfg.epsilon));
        }
        let dt_target = match cfg.dt {
            Some(dt) if dt > dt_max * (1.0 + 1e-12) => {
                return Err(Error::CflViolation {
                    courant: dt / dt_max * cfg.cfl,
                    limit: cfg.cfl,
                })
            }
            Some(dt) if dt > 0.0 => dt,
            Some(dt) => return Err(Error::InvalidInput(format!("dt {dt}"))),
            None => dt_max,
        };
        let n_steps = ((cfg.t_end / dt_target) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        Ok(TimeGrid {
            dt: cfg.t_end / n_steps as f64,
            n_steps,
            window,
        })
    }

    /// The Brownian path matching `grid`, keyed by `seed`.
    pub fn brownian(&self, grid: &TimeGrid, seed: u64) -> Result<BrownianPath> {
        if self.n_modes() == 0 {
            return Ok(BrownianPath::zero(0, grid.n_steps, grid.dt));
        }
        BrownianPath::sample(self.n_modes(), grid.n_steps, grid.dt, seed)
    }

    fn check_path(&self, grid: &TimeGrid, path: &BrownianPath) -> Result<()> {
        if path.n_modes() != self.n_modes() {
            return Err(Error::InvalidInput(format!(
                "path has {} modes, noise has {}",
                path.n_modes(),
                self.n_modes()
            )));
        }
        if self.n_modes() > 0 {
            if path.n_steps() < grid.n_steps {
                return Err(Error::InvalidInput(format!(
                    "path has {} steps, run needs {}",
                    path.n_steps(),
                    grid.n_steps
                )));
            }
            if ((path.dt() - grid.dt) / grid.dt).abs() > 1e-10 {
                return Err(Error::InvalidInput(format!(
                    "path dt {} differs from run dt {}",
                    path.dt(),
                    grid.dt
                )));
            }
        }
        Ok(())
    }

    fn check_initial(&self, v0: &TorusField) -> Result<()> {
        if v0.shape() != self.cfg.shape.as_slice() {
            return Err(Error::InvalidInput(format!(
                "initial datum shape {:?} differs from grid {:?}",
                v0.shape(),
                self.cfg.shape
            )));
        }
        if !v0.is_finite() {
            return Err(Error::NonFiniteState(0));
        }
        Ok(())
    }

    /// Solve with the path generated from the configured seed.
    pub fn solve_seeded(&self, v0: &TorusField) -> Result<Trajectory> {
        let grid = self.time_grid(v0.max_abs())?;
        let path = self.brownian(&grid, self.cfg.seed)?;
        self.solve_on(v0, &path, grid)
    }

    pub fn solve(&self, v0: &TorusField, path: &BrownianPath) -> Result<Trajectory> {
        let grid = self.time_grid(v0.max_abs())?;
        self.solve_on(v0, path, grid)
    }

    pub fn solve_on(&self, v0: &TorusField, path: &BrownianPath, grid: TimeGrid) -> Result<Trajectory> {
        self.check_initial(v0)?;
        self.check_path(&grid, path)?;
        let audit = !self.cfg.entropy_alphas.is_empty();
        let mut states = [RunState::new(v0.clone(), self.cfg.sobolev_s, audit)];
        let mut scratch = Scratch::default();
        let mut substeps = 0;
        for m in 0..grid.n_steps {
            substeps += self.advance(&mut states, grid.dt, m, path, &mut scratch)?;
            self.record(&mut states[0], m + 1, &grid);
        }
        let [s] = states;
        Ok(s.into_trajectory(grid, substeps))
    }

    /// Solves from two initial data with the same noise path and records
    /// `d(t) = ‖v_a(t) − v_b(t)‖_{L¹}` after every step.
    pub fn coupled_solve(
        &self,
        v0_a: &TorusField,
        v0_b: &TorusField,
        path: &BrownianPath,
    ) -> Result<CoupledRun> {
        let grid = self.time_grid(v0_a.max_abs().max(v0_b.max_abs()))?;
        self.coupled_solve_on(v0_a, v0_b, path, grid)
    }

    pub fn coupled_grid(&self, v0_a: &TorusField, v0_b: &TorusField) -> Result<TimeGrid> {
        self.time_grid(v0_a.max_abs().max(v0_b.max_abs()))
    }

    pub fn coupled_solve_on(
        &self,
        v0_a: &TorusField,
        v0_b: &TorusField,
        path: &BrownianPath,
        grid: TimeGrid,
    ) -> Result<CoupledRun> {
        self.check_initial(v0_a)?;
        self.check_initial(v0_b)?;
        self.check_path(&grid, path)?;
        let audit = !self.cfg.entropy_alphas.is_empty();
        let s = self.cfg.sobolev_s;
        let mut states = [
            RunState::new(v0_a.clone(), s, audit),
            RunState::new(v0_b.clone(), s, audit),
        ];
        let d0 = v0_a.l1_distance(v0_b);
        let mut distance = vec![(0.0, d0)];
        let mut first_below: [Option<f64>; 3] = [None; 3];
        for (slot, frac) in first_below.iter_mut().zip(DECAY_FRACTIONS) {
            if d0 <= frac * d0 {
                *slot = Some(0.0);
            }
        }
        let mut prev = d0;
        let mut max_increase = f64::NEG_INFINITY;
        let mut scratch = Scratch::default();
        let mut substeps = 0;
        for m in 0..grid.n_steps {
            substeps += self.advance(&mut states, grid.dt, m, path, &mut scratch)?;
            let t = grid.dt * (m + 1) as f64;
            let d = states[0].v.l1_distance(&states[1].v);
            max_increase = max_increase.max(d - prev);
            prev = d;
            for (slot, frac) in first_below.iter_mut().zip(DECAY_FRACTIONS) {
                if slot.is_none() && d <= frac * d0 {
                    *slot = Some(t);
                }
            }
            let last = m + 1 == grid.n_steps;
            if (m + 1) % self.cfg.observe_stride == 0 || last {
                distance.push((t, d));
            }
            for st in states.iter_mut() {
                self.record(st, m + 1, &grid);
            }
        }
        let [a, b] = states;
        Ok(CoupledRun {
            a: a.into_trajectory(grid, substeps),
            b: b.into_trajectory(grid, substeps),
            distance,
            max_increase,
            d0,
            first_below,
        })
    }

    fn record(&self, st: &mut RunState, step: usize, grid: &TimeGrid) {
        let t = grid.dt * step as f64;
        let last = step == grid.n_steps;
        let drift = (st.v.mean() - st.initial_mean).abs();
        st.max_drift = st.max_drift.max(drift);
        st.max_abs = st.max_abs.max(st.v.max_abs());
        if step % self.cfg.observe_stride == 0 || last {
            st.records.push(ObservationRecord::measure(
                t,
                &st.v,
                self.cfg.sobolev_s,
                st.pending_entropy,
            ));
            if !st.pending_entropy.is_nan() {
                st.pending_entropy = f64::INFINITY;
            }
        }
        let snap = self.cfg.snapshot_stride;
        if (snap > 0 && step % snap == 0) || last {
            st.snapshots.push(st.v.clone());
            st.times.push(t);
            st.snapshot_steps.push(step);
        }
    }

    /// Advances every state by one noise step, all with the same number of
    /// deterministic sub-steps. Returns that number.
    fn advance(
        &self,
        states: &mut [RunState],
        dt: f64,
        m: usize,
        path: &BrownianPath,
        scratch: &mut Scratch,
    ) -> Result<usize> {
        let (lo, hi) = states.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, s| {
            let (a, b) = s.v.range();
            (acc.0.min(a), acc.1.max(b))
        });
        let k = self.substeps_needed(dt, lo, hi);
        let h = dt / k as f64;
        let speeds = rusanov_speeds(&self.lf, lo, hi);
        let eps = self.cfg.epsilon;
        for st in states.iter_mut() {
            for _ in 0..k {
                let (v, tmp) = (&mut st.v, &mut st.tmp);
                kernel::flux_update(&self.grid, &self.lf, self.cfg.scheme, &speeds, h, v.values(), tmp, scratch);
                for &alpha in &self.cfg.entropy_alphas {
                    let r = kernel::flux_entropy_residual(
                        &self.grid, &self.lf, self.cfg.scheme, &speeds, h, v.values(), tmp, alpha, scratch,
                    );
                    st.pending_entropy = st.pending_entropy.min(r);
                    st.entropy_min = st.entropy_min.min(r);
                }
                std::mem::swap(v.values_mut_vec(), tmp);
                if eps > 0.0 {
                    kernel::viscous_update(&self.grid, eps, h, v.values(), tmp);
                    for &alpha in &self.cfg.entropy_alphas {
                        let r = kernel::viscous_entropy_residual(&self.grid, eps, h, v.values(), tmp, alpha);
                        st.pending_entropy = st.pending_entropy.min(r);
                        st.entropy_min = st.entropy_min.min(r);
                    }
                    std::mem::swap(v.values_mut_vec(), tmp);
                }
            }
            if let Some(noise) = &self.noise {
                noise.add_increment(path, m, &mut st.v);
            }
            if !st.v.is_finite() {
                return Err(Error::NonFiniteState(m + 1));
            }
        }
        Ok(k)
    }

    fn substeps_needed(&self, dt: f64, lo: f64, hi: f64) -> usize {
        let c = kernel::courant(&self.lf, &self.cfg.shape, dt, lo, hi);
        let d = kernel::diffusion_number(&self.cfg.shape, dt, self.cfg.epsilon);
        let worst = c.max(d) / MONOTONE_LIMIT;
        if worst <= 1.0 {
            1
        } else {
            worst.ceil() as usize
        }
    }

    /// Re-runs the deterministic part of step `m` from `v` and returns the
    /// state before the noise increment together with the smallest entropy
    /// residual per α.
    pub(crate) fn replay_deterministic(
        &self,
        v: &TorusField,
        dt: f64,
        alphas: &[f64],
    ) -> (TorusField, Vec<f64>) {
        let (lo, hi) = v.range();
        let k = self.substeps_needed(dt, lo, hi);
        let h = dt / k as f64;
        let speeds = rusanov_speeds(&self.lf, lo, hi);
        let mut cur = v.values().to_vec();
        let mut tmp = vec![0.0; cur.len()];
        let mut scratch = Scratch::default();
        let mut mins = vec![f64::INFINITY; alphas.len()];
        let eps = self.cfg.epsilon;
        for _ in 0..k {
            kernel::flux_update(&self.grid, &self.lf, self.cfg.scheme, &speeds, h, &cur, &mut tmp, &mut scratch);
            for (mn, &alpha) in mins.iter_mut().zip(alphas) {
                let r = kernel::flux_entropy_residual(
                    &self.grid, &self.lf, self.cfg.scheme, &speeds, h, &cur, &tmp, alpha, &mut scratch,
                );
                *mn = mn.min(r);
            }
            std::mem::swap(&mut cur, &mut tmp);
            if eps > 0.0 {
                kernel::viscous_update(&self.grid, eps, h, &cur, &mut tmp);
                for (mn, &alpha) in mins.iter_mut().zip(alphas) {
                    let r = kernel::viscous_entropy_residual(&self.grid, eps, h, &cur, &tmp, alpha);
                    *mn = mn.min(r);
                }
                std::mem::swap(&mut cur, &mut tmp);
            }
        }
        (TorusField::from_raw(v.shape().to_vec(), cur), mins)
    }
}
