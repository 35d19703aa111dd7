//! Finite-volume kernels on periodic grids of any rank.

use super::config::Scheme;
use crate::flux::{LiftedFlux, ScalarFlux};

/// Neighbour lookup along each axis of a row-major periodic grid.
#[derive(Clone, Debug)]
pub(crate) struct Grid {
    pub shape: Vec<usize>,
    pub strides: Vec<usize>,
    pub len: usize,
}

impl Grid {
    pub fn new(shape: &[usize]) -> Self {
        Grid {
            shape: shape.to_vec(),
            strides: crate::ap::strides(shape),
            len: shape.iter().product(),
        }
    }

    #[inline]
    pub fn right(&self, idx: usize, axis: usize) -> usize {
        let s = self.strides[axis];
        let m = self.shape[axis];
        if (idx / s) % m + 1 < m {
            idx + s
        } else {
            idx + s - m * s
        }
    }

    #[inline]
    pub fn left(&self, idx: usize, axis: usize) -> usize {
        let s = self.strides[axis];
        let m = self.shape[axis];
        if (idx / s) % m > 0 {
            idx - s
        } else {
            idx + (m - 1) * s
        }
    }
}

#[derive(Default, Debug)]
pub(crate) struct Scratch {
    face: Vec<f64>,
    minus: Vec<f64>,
}

/// Two-point numerical flux `F(ul, ur)` for one direction.
#[inline]
pub(crate) fn numerical_flux(f: &ScalarFlux, scheme: Scheme, ul: f64, ur: f64, visc: f64) -> f64 {
    match scheme {
        Scheme::EngquistOsher => f.eo_split(ul).0 + f.eo_split(ur).1,
        Scheme::Rusanov => 0.5 * (f.f(ul) + f.f(ur)) - 0.5 * visc * (ur - ul),
        Scheme::GodunovBurgers => f.godunov(ul, ur),
        Scheme::Downwind => f.eo_split(ur).0 + f.eo_split(ul).1,
    }
}

/// Courant sum `Σⱼ dt Mⱼ sup|ãⱼ|` over the value range `[lo, hi]`.
pub(crate) fn courant(lf: &LiftedFlux, shape: &[usize], dt: f64, lo: f64, hi: f64) -> f64 {
    lf.directions()
        .iter()
        .zip(shape)
        .map(|(f, &m)| dt * m as f64 * f.max_speed(lo, hi))
        .sum()
}

/// Explicit diffusion number `2 ε dt Σⱼ Mⱼ²`.
pub(crate) fn diffusion_number(shape: &[usize], dt: f64, epsilon: f64) -> f64 {
    2.0 * epsilon * dt * shape.iter().map(|&m| (m * m) as f64).sum::<f64>()
}

/// Conservative update `out = v − dt Σⱼ Mⱼ (F_{i+½} − F_{i−½})`.
///
/// `speeds[j]` is the Rusanov dissipation coefficient for direction `j`.
pub(crate) fn flux_update(
    grid: &Grid,
    lf: &LiftedFlux,
    scheme: Scheme,
    speeds: &[f64],
    dt: f64,
    v: &[f64],
    out: &mut [f64],
    scratch: &mut Scratch,
) {
    out.copy_from_slice(v);
    let Scratch { face, minus } = scratch;
    face.resize(grid.len, 0.0);
    minus.resize(grid.len, 0.0);
    for (axis, f) in lf.directions().iter().enumerate() {
        let lambda = dt * grid.shape[axis] as f64;
        match (scheme, f) {
            // fast path: split once per cell
            (Scheme::EngquistOsher, _) => {
                for (i, &u) in v.iter().enumerate() {
                    let (p, m) = f.eo_split(u);
                    face[i] = p;
                    minus[i] = m;
                }
                for i in 0..grid.len {
                    face[i] += minus[grid.right(i, axis)];
                }
            }
            _ => {
                for i in 0..grid.len {
                    face[i] = numerical_flux(f, scheme, v[i], v[grid.right(i, axis)], speeds[axis]);
                }
            }
        }
        for i in 0..grid.len {
            out[i] -= lambda * (face[i] - face[grid.left(i, axis)]);
        }
    }
}

/// `out = v + ε dt Σⱼ Mⱼ² (v_{i+1} − 2v_i + v_{i−1})`.
pub(crate) fn viscous_update(grid: &Grid, epsilon: f64, dt: f64, v: &[f64], out: &mut [f64]) {
    out.copy_from_slice(v);
    for axis in 0..grid.shape.len() {
        let mu = epsilon * dt * (grid.shape[axis] * grid.shape[axis]) as f64;
        for i in 0..grid.len {
            out[i] += mu * (v[grid.right(i, axis)] - 2.0 * v[i] + v[grid.left(i, axis)]);
        }
    }
}

/// Minimum over cells of the Kruzhkov cell-entropy residual of one flux
/// sub-step `v → after`:
///
/// `|v_i − α| − Σⱼ dt Mⱼ (G_{i+½} − G_{i−½}) − |after_i − α|`,
///
/// with numerical entropy flux `G(a, b) = F(a∨α, b∨α) − F(a∧α, b∧α)`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn flux_entropy_residual(
    grid: &Grid,
    lf: &LiftedFlux,
    scheme: Scheme,
    speeds: &[f64],
    dt: f64,
    v: &[f64],
    after: &[f64],
    alpha: f64,
    scratch: &mut Scratch,
) -> f64 {
    let face = &mut scratch.face;
    let mut res: Vec<f64> = v
        .iter()
        .zip(after)
        .map(|(a, b)| (a - alpha).abs() - (b - alpha).abs())
        .collect();
    face.resize(grid.len, 0.0);
    for (axis, f) in lf.directions().iter().enumerate() {
        let lambda = dt * grid.shape[axis] as f64;
        for i in 0..grid.len {
            let (a, b) = (v[i], v[grid.right(i, axis)]);
            face[i] = numerical_flux(f, scheme, a.max(alpha), b.max(alpha), speeds[axis])
                - numerical_flux(f, scheme, a.min(alpha), b.min(alpha), speeds[axis]);
        }
        for i in 0..grid.len {
            res[i] -= lambda * (face[i] - face[grid.left(i, axis)]);
        }
    }
    res.into_iter().fold(f64::INFINITY, f64::min)
}

/// Cell-entropy residual of the explicit heat sub-step with the discrete
/// entropy flux `−ε(|v_{i+1}−α| − |v_i−α|)/Δy`.
pub(crate) fn viscous_entropy_residual(
    grid: &Grid,
    epsilon: f64,
    dt: f64,
    v: &[f64],
    after: &[f64],
    alpha: f64,
) -> f64 {
    let eta: Vec<f64> = v.iter().map(|x| (x - alpha).abs()).collect();
    let mut min = f64::INFINITY;
    for i in 0..grid.len {
        let mut r = eta[i] - (after[i] - alpha).abs();
        for axis in 0..grid.shape.len() {
            let mu = epsilon * dt * (grid.shape[axis] * grid.shape[axis]) as f64;
            r += mu * (eta[grid.right(i, axis)] - 2.0 * eta[i] + eta[grid.left(i, axis)]);
        }
        min = min.min(r);
    }
    min
}
