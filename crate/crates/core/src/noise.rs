//! Additive forcing `Φ dW = Σ_k g_k(x) dβ_k(t)`.
//!
//! Every mode `g_k` is a zero-mean trigonometric polynomial over the shared
//! generator set. Brownian increments come from counter-based ChaCha
//! substreams: the draw for step `m` of mode `k` depends only on
//! `(seed, k, m)`.

use std::f64::consts::PI;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::ap::{GeneratorSet, TorusField, TrigPolynomial};
use crate::error::{Error, Result};

/// Mean values below this count as zero.
const ZERO_MEAN_TOLERANCE: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct NoiseMode {
    pub g: TrigPolynomial,
    /// Certified bound on `sup|g| + sup|∇g| + sup|∇²g|`.
    pub alpha: f64,
}

#[derive(Clone, Debug)]
pub struct NoiseModel {
    gens: Arc<GeneratorSet>,
    modes: Vec<NoiseMode>,
    d0: f64,
}

impl NoiseModel {
    /// Validates zero means and computes the analytic bounds
    /// `α_k = Σ_n |a_n| (1 + 2π|β_n| + 4π²|β_n|²)` and `D₀ = Σ α_k + α_k²`.
    pub fn build(modes: Vec<TrigPolynomial>) -> Result<Self> {
        let first = modes.first().ok_or(Error::EmptyModeList)?;
        let gens = first.gens().clone();
        let mut out = Vec::with_capacity(modes.len());
        for (k, g) in modes.into_iter().enumerate() {
            if **g.gens() != *gens {
                return Err(Error::GeneratorMismatch);
            }
            if g.mean_value().abs() > ZERO_MEAN_TOLERANCE {
                return Err(Error::NonZeroMean(k));
            }
            let alpha = g.c2_bound();
            out.push(NoiseMode { g, alpha });
        }
        let d0 = out.iter().map(|m| m.alpha + m.alpha * m.alpha).sum();
        Ok(NoiseModel {
            gens,
            modes: out,
            d0,
        })
    }

    pub fn gens(&self) -> &Arc<GeneratorSet> {
        &self.gens
    }

    pub fn modes(&self) -> &[NoiseMode] {
        &self.modes
    }

    /// K, the truncation level.
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn d0(&self) -> f64 {
        self.d0
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.alpha).collect()
    }

    /// G²(x) = Σ_k g_k(x)² at a physical point.
    pub fn g_squared(&self, x: &[f64]) -> Result<f64> {
        let z = vec![0.0; self.gens.rank()];
        let mut s = 0.0;
        for m in &self.modes {
            let v = m.g.evaluate_ap(&z, x)?;
            s += v * v;
        }
        Ok(s)
    }

    /// G² sampled on a torus grid.
    pub fn g_squared_field(&self, shape: &[usize]) -> Result<TorusField> {
        let mut acc = TorusField::zeros(shape)?;
        for m in &self.modes {
            let f = m.g.lift_to_torus(shape)?;
            for (a, v) in acc.values_mut().iter_mut().zip(f.values()) {
                *a += v * v;
            }
        }
        Ok(acc)
    }

    /// Lifts every mode once; the result turns path increments into grid
    /// increments cheaply.
    pub fn lift(&self, shape: &[usize]) -> Result<LiftedNoise> {
        let mut fields = Vec::with_capacity(self.modes.len());
        for m in &self.modes {
            let mut f = m.g.lift_to_torus(shape)?;
            // remove the O(ulp) grid mean so every increment has exactly zero mass
            let mean = f.mean();
            f.values_mut().iter_mut().for_each(|v| *v -= mean);
            fields.push(f);
        }
        Ok(LiftedNoise {
            shape: shape.to_vec(),
            fields,
        })
    }
}

/// Convenience wrapper matching [`NoiseModel::build`].
pub fn build_noise(modes: Vec<TrigPolynomial>) -> Result<NoiseModel> {
    NoiseModel::build(modes)
}

/// Grid samples of every noise mode.
#[derive(Clone, Debug)]
pub struct LiftedNoise {
    shape: Vec<usize>,
    fields: Vec<TorusField>,
}

impl LiftedNoise {
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn fields(&self) -> &[TorusField] {
        &self.fields
    }

    /// `Σ_k g_k Δβ_k(m)` added into `target`.
    pub fn add_increment(&self, path: &BrownianPath, step: usize, target: &mut TorusField) {
        for (k, f) in self.fields.iter().enumerate() {
            let db = path.increment(k, step);
            if db != 0.0 {
                target.axpy(db, f);
            }
        }
    }

    pub fn increment(&self, path: &BrownianPath, step: usize) -> TorusField {
        let mut out = TorusField::from_raw(self.shape.clone(), vec![0.0; self.shape.iter().product()]);
        self.add_increment(path, step, &mut out);
        out
    }

    /// Maximum of G² over the grid.
    pub fn variance_rate_sup(&self) -> f64 {
        let len: usize = self.shape.iter().product();
        (0..len)
            .map(|i| self.fields.iter().map(|f| f.values()[i].powi(2)).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// One grid increment `ΔJ = Σ_k g_k(·) Δβ_k(m)`.
pub fn noise_increment(
    model: &NoiseModel,
    path: &BrownianPath,
    step: usize,
    shape: &[usize],
) -> Result<TorusField> {
    Ok(model.lift(shape)?.increment(path, step))
}

/// Truncated cylindrical Wiener increments, `K × n_steps`, mode-major.
#[derive(Clone, Debug, PartialEq)]
pub struct BrownianPath {
    seed: u64,
    dt: f64,
    n_modes: usize,
    n_steps: usize,
    increments: Vec<f64>,
}

impl BrownianPath {
    pub fn sample(n_modes: usize, n_steps: usize, dt: f64, seed: u64) -> Result<Self> {
        if n_steps == 0 || !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "brownian path needs n_steps >= 1 and dt > 0 (got {n_steps}, {dt})"
            )));
        }
        let sd = dt.sqrt();
        let mut increments = Vec::with_capacity(n_modes * n_steps);
        for k in 0..n_modes {
            let mut rng = substream(seed, k, 0);
            increments.extend((0..n_steps).map(|_| sd * box_muller(&mut rng)));
        }
        Ok(BrownianPath {
            seed,
            dt,
            n_modes,
            n_steps,
            increments,
        })
    }

    /// A path with all increments zero (deterministic runs).
    pub fn zero(n_modes: usize, n_steps: usize, dt: f64) -> Self {
        BrownianPath {
            seed: 0,
            dt,
            n_modes,
            n_steps,
            increments: vec![0.0; n_modes * n_steps],
        }
    }

    pub fn from_increments(n_modes: usize, dt: f64, increments: Vec<f64>) -> Result<Self> {
        if n_modes == 0 || increments.len() % n_modes != 0 {
            return Err(Error::InvalidInput("increment array is not K × n".into()));
        }
        Ok(BrownianPath {
            seed: 0,
            dt,
            n_modes,
            n_steps: increments.len() / n_modes,
            increments,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    /// Δβ_k at step m.
    pub fn increment(&self, k: usize, m: usize) -> f64 {
        self.increments[k * self.n_steps + m]
    }

    /// β_k(t_m) = Σ_{i<m} Δβ_k(i).
    pub fn value(&self, k: usize, m: usize) -> f64 {
        self.increments[k * self.n_steps..k * self.n_steps + m].iter().sum()
    }
}

pub fn sample_brownian(n_modes: usize, n_steps: usize, dt: f64, seed: u64) -> Result<BrownianPath> {
    BrownianPath::sample(n_modes, n_steps, dt, seed)
}

/// Standard normal for `(seed, k, m)` without generating the earlier steps.
pub fn gaussian_at(seed: u64, k: usize, m: usize) -> f64 {
    box_muller(&mut substream(seed, k, m))
}

// Each draw consumes exactly two u64 words (four 32-bit ChaCha words), so
// step m of stream k starts at word 4m.
const WORDS_PER_DRAW: u128 = 4;

fn substream(seed: u64, k: usize, m: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng.set_word_pos(WORDS_PER_DRAW * m as u128);
    rng
}

fn box_muller(rng: &mut ChaCha8Rng) -> f64 {
    // u1 in (0, 1], u2 in [0, 1)
    let u1 = ((rng.next_u64() >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64);
    let u2 = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}
