use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::generators::{dot, FreqIndex, GeneratorSet};
use super::torus::{strides, TorusField};
use crate::error::{Error, Result};

/// Coefficients with modulus below this are dropped after arithmetic.
pub const PRUNE_THRESHOLD: f64 = 1e-14;
/// Hermitian symmetry and realness are checked to this absolute tolerance.
pub const REALNESS_TOLERANCE: f64 = 1e-10;

/// A real almost-periodic trigonometric polynomial
/// `p(x) = Σ_n a_n e^{2πi β_n·x}` with `β_n = Σ nⱼλⱼ` and `a_{−n} = conj(a_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPolynomial {
    gens: Arc<GeneratorSet>,
    coeffs: BTreeMap<FreqIndex, Complex64>,
}

impl TrigPolynomial {
    pub fn zero(gens: Arc<GeneratorSet>) -> Self {
        TrigPolynomial {
            gens,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(gens: Arc<GeneratorSet>, c: f64) -> Self {
        let mut p = Self::zero(gens);
        let z = FreqIndex::zero(p.gens.rank());
        p.coeffs.insert(z, Complex64::new(c, 0.0));
        p.prune();
        p
    }

    /// Builds the real polynomial `Σ (c e_n + conj(c) e_{−n})` from one
    /// representative per conjugate pair. A zero index contributes its real
    /// part once.
    pub fn from_real_modes(
        gens: Arc<GeneratorSet>,
        modes: impl IntoIterator<Item = (FreqIndex, Complex64)>,
    ) -> Result<Self> {
        let rank = gens.rank();
        let mut p = Self::zero(gens);
        for (n, c) in modes {
            if n.rank() != rank {
                return Err(Error::InvalidInput(format!(
                    "mode {n} has rank {} (expected {rank})",
                    n.rank()
                )));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidInput(format!("coefficient at {n} not finite")));
            }
            if n.is_zero() {
                *p.coeffs.entry(n).or_default() += Complex64::new(c.re, 0.0);
            } else {
                let m = n.neg();
                *p.coeffs.entry(n).or_default() += c;
                *p.coeffs.entry(m).or_default() += c.conj();
            }
        }
        p.prune();
        Ok(p)
    }

    /// Takes a full coefficient map; fails unless it is Hermitian.
    pub fn from_coeffs(
        gens: Arc<GeneratorSet>,
        coeffs: BTreeMap<FreqIndex, Complex64>,
    ) -> Result<Self> {
        let rank = gens.rank();
        for (n, c) in &coeffs {
            if n.rank() != rank {
                return Err(Error::InvalidInput(format!("mode {n} has wrong rank")));
            }
            let partner = coeffs.get(&n.neg()).copied().unwrap_or_default();
            if (partner - c.conj()).norm() > REALNESS_TOLERANCE {
                return Err(Error::NotHermitian(n.clone()));
            }
        }
        let mut p = TrigPolynomial { gens, coeffs };
        p.prune();
        Ok(p)
    }

    /// `amp · cos(2π β_n·x)`.
    pub fn cosine(gens: Arc<GeneratorSet>, n: FreqIndex, amp: f64) -> Result<Self> {
        if n.is_zero() {
            return Ok(Self::constant(gens, amp));
        }
        Self::from_real_modes(gens, [(n, Complex64::new(amp / 2.0, 0.0))])
    }

    /// `amp · sin(2π β_n·x)`.
    pub fn sine(gens: Arc<GeneratorSet>, n: FreqIndex, amp: f64) -> Result<Self> {
        if n.is_zero() {
            return Ok(Self::zero(gens));
        }
        Self::from_real_modes(gens, [(n, Complex64::new(0.0, -amp / 2.0))])
    }

    pub fn gens(&self) -> &Arc<GeneratorSet> {
        &self.gens
    }

    pub fn coeffs(&self) -> &BTreeMap<FreqIndex, Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, n: &FreqIndex) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// Sp(p): the stored frequency indices.
    pub fn spectrum(&self) -> impl Iterator<Item = &FreqIndex> {
        self.coeffs.keys()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.gens, &other.gens) || *self.gens == *other.gens {
            Ok(())
        } else {
            Err(Error::GeneratorMismatch)
        }
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, c| c.norm() >= PRUNE_THRESHOLD);
    }

    /// M(p), the zero-mode coefficient.
    pub fn mean_value(&self) -> f64 {
        self.coeff(&FreqIndex::zero(self.gens.rank())).re
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (n, c) in &other.coeffs {
            *out.coeffs.entry(n.clone()).or_default() += c;
        }
        out.prune();
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.values_mut().for_each(|c| *c *= s);
        out.prune();
        out
    }

    /// Coefficient convolution.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut coeffs: BTreeMap<FreqIndex, Complex64> = BTreeMap::new();
        for (n, a) in &self.coeffs {
            for (m, b) in &other.coeffs {
                *coeffs.entry(n.add(m)).or_default() += a * b;
            }
        }
        let mut out = TrigPolynomial {
            gens: self.gens.clone(),
            coeffs,
        };
        out.prune();
        Ok(out)
    }

    /// `x ↦ p(x)` composed with a torus shift: coefficients pick up the
    /// unimodular phases `e^{2πi n·z}`.
    pub fn shift(&self, z: &[f64]) -> Self {
        let mut out = self.clone();
        for (n, c) in out.coeffs.iter_mut() {
            *c *= phase(n, z);
        }
        out
    }

    /// N₂(p) by Parseval: `sqrt(Σ |a_n|²)`.
    pub fn besicovitch_norm2(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest `|β_n|` over the spectrum.
    pub fn spectral_radius(&self) -> f64 {
        self.coeffs
            .keys()
            .map(|n| norm(&self.gens.frequency(n)))
            .fold(0.0, f64::max)
    }

    /// Value of the torus function `Σ a_n e^{2πi n·y}` at `y ∈ ℝᴾ`.
    pub fn evaluate_torus(&self, y: &[f64]) -> f64 {
        let s = self.evaluate_torus_complex(y);
        debug_assert!(s.im.abs() <= REALNESS_TOLERANCE * (1.0 + s.re.abs()));
        s.re
    }

    pub(crate) fn evaluate_torus_complex(&self, y: &[f64]) -> Complex64 {
        self.coeffs.iter().map(|(n, c)| c * phase(n, y)).sum()
    }

    /// `p` evaluated along the reduction map at offset `z`: `Σ a_n e^{2πi n·(z + y(x))}`.
    pub fn evaluate_ap(&self, z: &[f64], x: &[f64]) -> Result<f64> {
        if z.len() != self.gens.rank() || x.len() != self.gens.ambient_dim() {
            return Err(Error::InvalidInput("evaluate_ap: dimension mismatch".into()));
        }
        let y: Vec<f64> = self
            .gens
            .reduce(x)
            .iter()
            .zip(z)
            .map(|(a, b)| a + b)
            .collect();
        let s = self.evaluate_torus_complex(&y);
        if s.im.abs() > REALNESS_TOLERANCE * (1.0 + s.re.abs()) {
            return Err(Error::NotHermitian(FreqIndex::zero(self.gens.rank())));
        }
        Ok(s.re)
    }

    /// Samples the torus function at the cell centers of `shape`.
    ///
    /// Every stored mode must satisfy `|nⱼ| < Mⱼ/2`.
    pub fn lift_to_torus(&self, shape: &[usize]) -> Result<TorusField> {
        let p = self.gens.rank();
        if shape.len() != p {
            return Err(Error::InvalidInput(format!(
                "grid rank {} does not match P = {p}",
                shape.len()
            )));
        }
        for n in self.coeffs.keys() {
            if n.0.iter().zip(shape).any(|(&c, &m)| 2 * c.unsigned_abs() as usize >= m) {
                return Err(Error::AliasedMode(n.clone()));
            }
        }
        let len: usize = shape.iter().product();
        let st = strides(shape);
        let mut re = vec![0.0; len];
        let mut im = vec![0.0; len];
        // separable phases per axis
        for (n, c) in &self.coeffs {
            let axes: Vec<Vec<Complex64>> = n
                .0
                .iter()
                .zip(shape)
                .map(|(&k, &m)| {
                    (0..m)
                        .map(|i| {
                            let y = (i as f64 + 0.5) / m as f64;
                            Complex64::from_polar(1.0, 2.0 * PI * k as f64 * y)
                        })
                        .collect()
                })
                .collect();
            for idx in 0..len {
                let mut e = *c;
                for axis in 0..p {
                    let i = (idx / st[axis]) % shape[axis];
                    e *= axes[axis][i];
                }
                re[idx] += e.re;
                im[idx] += e.im;
            }
        }
        let worst = im.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if worst > REALNESS_TOLERANCE {
            return Err(Error::NotHermitian(FreqIndex::zero(p)));
        }
        TorusField::new(shape.to_vec(), re)
    }

    /// Analytic bound on `sup|p| + sup|∇p| + sup|∇²p|`:
    /// `Σ |a_n| (1 + 2π|β_n| + 4π²|β_n|²)`.
    pub fn c2_bound(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(n, c)| {
                let b = norm(&self.gens.frequency(n));
                c.norm() * (1.0 + 2.0 * PI * b + 4.0 * PI * PI * b * b)
            })
            .sum()
    }

    /// Torus-direction derivative ∂/∂yⱼ, coefficients times `2πi nⱼ`.
    pub fn torus_derivative(&self, axis: usize) -> Self {
        let mut out = self.clone();
        for (n, c) in out.coeffs.iter_mut() {
            *c *= Complex64::new(0.0, 2.0 * PI * n.0[axis] as f64);
        }
        out.prune();
        out
    }

    /// Physical derivative ∂/∂x_i, coefficients times `2πi (β_n)_i`.
    pub fn derivative(&self, coord: usize) -> Self {
        let mut out = self.clone();
        for (n, c) in out.coeffs.iter_mut() {
            let beta = self.gens.frequency(n);
            *c *= Complex64::new(0.0, 2.0 * PI * beta[coord]);
        }
        out.prune();
        out
    }

    /// Midpoint-rule values of `R^{−N} ∫_{C_R} |p(z₀ + y(x))| dx` with
    /// `C_R = [−R/2, R/2]ᴺ`, one per radius.
    pub fn cube_average_norm1(
        &self,
        z0: &[f64],
        radii: &[f64],
        quad: &CubeQuadrature,
    ) -> Result<Vec<f64>> {
        let dim = self.gens.ambient_dim();
        if dim > 2 {
            return Err(Error::InvalidInput(format!(
                "cube averages support N <= 2, got N = {dim}"
            )));
        }
        if z0.len() != self.gens.rank() {
            return Err(Error::InvalidInput("offset has wrong length".into()));
        }
        if radii.is_empty()
            || radii.iter().any(|r| !(*r > 0.0 && r.is_finite()))
            || radii.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::InvalidInput("radii must be positive and increasing".into()));
        }
        let density = quad.points_per_unit * self.spectral_radius().max(1.0);
        let mut out = Vec::with_capacity(radii.len());
        let shifted = self.shift(z0);
        let terms: Vec<(Vec<f64>, Complex64)> = shifted
            .coeffs
            .iter()
            .map(|(n, c)| (self.gens.frequency(n), *c))
            .collect();
        for &r in radii {
            let per_axis = (r * density).ceil() as u128;
            let needed = per_axis.pow(dim as u32);
            if needed > quad.cap {
                return Err(Error::QuadratureBudgetExceeded {
                    needed,
                    cap: quad.cap,
                });
            }
            let n = per_axis as usize;
            let h = r / n as f64;
            let xs: Vec<f64> = (0..n).map(|i| -r / 2.0 + (i as f64 + 0.5) * h).collect();
            let total = match dim {
                1 => {
                    let mut vals = vec![0.0; n];
                    for (beta, c) in &terms {
                        for (v, x) in vals.iter_mut().zip(&xs) {
                            *v += (c * Complex64::from_polar(1.0, 2.0 * PI * beta[0] * x)).re;
                        }
                    }
                    vals.iter().map(|v| v.abs()).sum::<f64>()
                }
                _ => {
                    // separable: e^{2πi β·x} = e^{2πi β₀x₀} e^{2πi β₁x₁}
                    let mut vals = vec![0.0; n * n];
                    for (beta, c) in &terms {
                        let e0: Vec<Complex64> = xs
                            .iter()
                            .map(|x| c * Complex64::from_polar(1.0, 2.0 * PI * beta[0] * x))
                            .collect();
                        let e1: Vec<Complex64> = xs
                            .iter()
                            .map(|x| Complex64::from_polar(1.0, 2.0 * PI * beta[1] * x))
                            .collect();
                        for (i, a) in e0.iter().enumerate() {
                            let row = &mut vals[i * n..(i + 1) * n];
                            for (v, b) in row.iter_mut().zip(&e1) {
                                *v += (a * b).re;
                            }
                        }
                    }
                    vals.iter().map(|v| v.abs()).sum::<f64>()
                }
            };
            out.push(total * h.powi(dim as i32) / r.powi(dim as i32));
        }
        Ok(out)
    }
}

/// Quadrature density for [`TrigPolynomial::cube_average_norm1`].
///
/// The x-grid has `points_per_unit · max(1, spectral radius)` points per unit
/// length along each axis.
#[derive(Clone, Debug)]
pub struct CubeQuadrature {
    pub points_per_unit: f64,
    pub cap: u128,
}

impl Default for CubeQuadrature {
    fn default() -> Self {
        CubeQuadrature {
            points_per_unit: 32.0,
            cap: 100_000_000,
        }
    }
}

fn phase(n: &FreqIndex, y: &[f64]) -> Complex64 {
    let arg: f64 = n.0.iter().zip(y).map(|(&k, &v)| k as f64 * v).sum();
    // reduce before multiplying by 2π to keep the phase accurate for large arguments
    Complex64::from_polar(1.0, 2.0 * PI * arg.rem_euclid(1.0))
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}
