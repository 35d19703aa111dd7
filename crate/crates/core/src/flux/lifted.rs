use std::sync::Arc;

use super::model::{horner, FluxFamily, FluxModel};
use crate::ap::GeneratorSet;
use crate::error::{Error, Result};

/// One torus-direction flux `f̃ⱼ = λⱼ·f`.
#[derive(Clone, Debug, PartialEq)]
pub enum ScalarFlux {
    /// `c u`
    Linear { c: f64 },
    /// `q u²/2`
    Quadratic { q: f64 },
    /// `Σ_m c_m u^m`
    Polynomial { coeffs: Vec<f64> },
}

impl ScalarFlux {
    #[inline]
    pub fn f(&self, u: f64) -> f64 {
        match self {
            ScalarFlux::Linear { c } => c * u,
            ScalarFlux::Quadratic { q } => 0.5 * q * u * u,
            ScalarFlux::Polynomial { coeffs } => horner(coeffs.iter().copied(), u),
        }
    }

    /// `ã = f̃′`.
    #[inline]
    pub fn a(&self, u: f64) -> f64 {
        match self {
            ScalarFlux::Linear { c } => *c,
            ScalarFlux::Quadratic { q } => q * u,
            ScalarFlux::Polynomial { coeffs } => horner(
                coeffs.iter().enumerate().skip(1).map(|(m, c)| m as f64 * c),
                u,
            ),
        }
    }

    /// `sup |ã|` over `[lo, hi]`.
    pub fn max_speed(&self, lo: f64, hi: f64) -> f64 {
        match self {
            ScalarFlux::Linear { c } => c.abs(),
            ScalarFlux::Quadratic { q } => q.abs() * lo.abs().max(hi.abs()),
            ScalarFlux::Polynomial { .. } => {
                let n = 257;
                let mut m = self.a(lo).abs().max(self.a(hi).abs());
                for i in 1..n - 1 {
                    let u = lo + (hi - lo) * i as f64 / (n - 1) as f64;
                    m = m.max(self.a(u).abs());
                }
                m
            }
        }
    }

    /// Engquist–Osher splitting: `f⁺(u) = f(0) + ∫₀ᵘ max(ã,0)`,
    /// `f⁻(u) = ∫₀ᵘ min(ã,0)`, so that `f⁺ + f⁻ = f`.
    #[inline]
    pub fn eo_split(&self, u: f64) -> (f64, f64) {
        match self {
            ScalarFlux::Linear { c } => (c.max(0.0) * u, c.min(0.0) * u),
            ScalarFlux::Quadratic { q } => {
                let pos = u.max(0.0);
                let neg = u.min(0.0);
                if *q >= 0.0 {
                    (0.5 * q * pos * pos, 0.5 * q * neg * neg)
                } else {
                    (0.5 * q * neg * neg, 0.5 * q * pos * pos)
                }
            }
            ScalarFlux::Polynomial { .. } => {
                let plus = self.f(0.0) + self.positive_part_integral(u);
                (plus, self.f(u) - plus)
            }
        }
    }

    /// `∫₀ᵘ max(ã, 0) dξ`, exact on each sign-constant piece via `f̃` itself.
    fn positive_part_integral(&self, u: f64) -> f64 {
        if u == 0.0 {
            return 0.0;
        }
        let (lo, hi) = if u > 0.0 { (0.0, u) } else { (u, 0.0) };
        let mut cuts = vec![lo];
        let samples = 64;
        let mut prev_u = lo;
        let mut prev_a = self.a(lo);
        for i in 1..=samples {
            let x = lo + (hi - lo) * i as f64 / samples as f64;
            let ax = self.a(x);
            if (prev_a > 0.0) != (ax > 0.0) {
                cuts.push(self.bisect_root(prev_u, x));
            }
            prev_u = x;
            prev_a = ax;
        }
        cuts.push(hi);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            if self.a(mid) > 0.0 {
                total += self.f(w[1]) - self.f(w[0]);
            }
        }
        if u > 0.0 {
            total
        } else {
            -total
        }
    }

    fn bisect_root(&self, mut a: f64, mut b: f64) -> f64 {
        let sa = self.a(a) > 0.0;
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if (self.a(m) > 0.0) == sa {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    /// Exact Godunov flux: `min_{[ul,ur]} f` if `ul <= ur`, else `max_{[ur,ul]} f`.
    /// Defined for the linear and quadratic families only.
    #[inline]
    pub fn godunov(&self, ul: f64, ur: f64) -> f64 {
        let (lo, hi) = if ul <= ur { (ul, ur) } else { (ur, ul) };
        let mut best = self.f(ul);
        let fr = self.f(ur);
        let pick = |a: f64, b: f64| if ul <= ur { a.min(b) } else { a.max(b) };
        best = pick(best, fr);
        if let ScalarFlux::Quadratic { .. } = self {
            if lo < 0.0 && hi > 0.0 {
                best = pick(best, 0.0);
            }
        }
        best
    }
}

/// Per-direction lifted fluxes of a model over a generator set.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedFlux {
    gens: Arc<GeneratorSet>,
    directions: Vec<ScalarFlux>,
    lip_factors: Vec<f64>,
    family: &'static str,
}

impl LiftedFlux {
    pub fn gens(&self) -> &Arc<GeneratorSet> {
        &self.gens
    }

    pub fn directions(&self) -> &[ScalarFlux] {
        &self.directions
    }

    pub fn direction(&self, j: usize) -> &ScalarFlux {
        &self.directions[j]
    }

    pub fn rank(&self) -> usize {
        self.directions.len()
    }

    pub fn family(&self) -> &'static str {
        self.family
    }

    /// `|λⱼ| · Lip(f)` on the given window, per direction.
    pub fn lipschitz(&self, fm: &FluxModel, window: f64) -> Vec<f64> {
        let l = fm.lipschitz(window);
        self.lip_factors.iter().map(|s| s * l).collect()
    }

    /// Direct construction from scalar fluxes (the periodic case Λ = canonical basis).
    pub fn from_directions(directions: Vec<ScalarFlux>) -> Self {
        let p = directions.len();
        LiftedFlux {
            gens: Arc::new(GeneratorSet::canonical(p)),
            lip_factors: vec![1.0; p],
            family: "custom",
            directions,
        }
    }
}

/// `f̃ⱼ(v) = λⱼ·f(v)` for every generator.
pub fn lift_flux(fm: &FluxModel, gens: &Arc<GeneratorSet>) -> Result<LiftedFlux> {
    if fm.ambient_dim() != gens.ambient_dim() {
        return Err(Error::InvalidInput(format!(
            "flux lives in ℝ^{} but generators in ℝ^{}",
            fm.ambient_dim(),
            gens.ambient_dim()
        )));
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let directions = gens
        .generators()
        .iter()
        .map(|lam| match fm.family() {
            FluxFamily::Linear { velocity } => ScalarFlux::Linear {
                c: dot(lam, velocity),
            },
            FluxFamily::DirectionalBurgers { direction } => ScalarFlux::Quadratic {
                q: dot(lam, direction),
            },
            FluxFamily::Polynomial { coeffs } => ScalarFlux::Polynomial {
                coeffs: coeffs.iter().map(|c| dot(lam, c)).collect(),
            },
        })
        .collect();
    let lip_factors = gens
        .generators()
        .iter()
        .map(|lam| lam.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    Ok(LiftedFlux {
        gens: gens.clone(),
        directions,
        lip_factors,
        family: fm.family().name(),
    })
}
