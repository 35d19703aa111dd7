//! Post-hoc cell-entropy audit of a stored trajectory.
//!
//! Only the deterministic sub-steps are audited: the noise increment is a
//! pure translation of every cell value and carries no entropy flux.

use super::run::{Solver, Trajectory};
use crate::error::{Error, Result};
use crate::noise::BrownianPath;

/// Relative slack allowed on the residual: `−tol · (1 + |α|)`.
pub const ENTROPY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyAudit {
    pub alphas: Vec<f64>,
    /// `residuals[m][a]`: smallest cell residual of step `m` at level `alphas[a]`.
    pub residuals: Vec<Vec<f64>>,
    /// Largest mismatch between the replayed step and the stored snapshot.
    pub replay_error: f64,
}

impl EntropyAudit {
    /// Smallest residual per α.
    pub fn min_per_alpha(&self) -> Vec<f64> {
        (0..self.alphas.len())
            .map(|a| self.residuals.iter().map(|r| r[a]).fold(f64::INFINITY, f64::min))
            .collect()
    }

    pub fn min(&self) -> f64 {
        self.min_per_alpha().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// True when every residual clears `−1e−10·(1+|α|)`.
    pub fn passes(&self) -> bool {
        self.min_per_alpha()
            .iter()
            .zip(&self.alphas)
            .all(|(r, a)| *r >= -ENTROPY_TOLERANCE * (1.0 + a.abs()))
    }
}

/// Replays every step of `traj` and evaluates the Kruzhkov cell-entropy
/// residual of each deterministic sub-step for every α.
///
/// Needs every step stored (snapshot stride 1).
pub fn entropy_residual(
    solver: &Solver,
    traj: &Trajectory,
    path: &BrownianPath,
    alphas: &[f64],
) -> Result<EntropyAudit> {
    let n = traj.grid.n_steps;
    let dense = traj.snapshot_steps.len() == n + 1
        && traj.snapshot_steps.iter().enumerate().all(|(i, &s)| i == s);
    if !dense {
        return Err(Error::StrideTooCoarse(format!(
            "entropy audit needs every step, trajectory keeps {} of {}",
            traj.snapshot_steps.len(),
            n + 1
        )));
    }
    let mut residuals = Vec::with_capacity(n);
    let mut replay_error: f64 = 0.0;
    for m in 0..n {
        let (mut pre, mins) = solver.replay_deterministic(&traj.snapshots[m], traj.grid.dt, alphas);
        if let Some(noise) = solver.noise() {
            noise.add_increment(path, m, &mut pre);
        }
        let next = &traj.snapshots[m + 1];
        let err = pre
            .values()
            .iter()
            .zip(next.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        replay_error = replay_error.max(err);
        residuals.push(mins);
    }
    Ok(EntropyAudit {
        alphas: alphas.to_vec(),
        residuals,
        replay_error,
    })
}
