use crate::error::{Error, Result};

/// Builtin flux families `f: ℝ → ℝᴺ`.
#[derive(Clone, Debug, PartialEq)]
pub enum FluxFamily {
    /// `f(u) = c u`.
    Linear { velocity: Vec<f64> },
    /// `f(u) = d u²/2`.
    DirectionalBurgers { direction: Vec<f64> },
    /// `f(u) = Σ_m c_m u^m`, one vector coefficient per power starting at 0.
    Polynomial { coeffs: Vec<Vec<f64>> },
}

impl FluxFamily {
    pub fn name(&self) -> &'static str {
        match self {
            FluxFamily::Linear { .. } => "linear",
            FluxFamily::DirectionalBurgers { .. } => "directional-burgers",
            FluxFamily::Polynomial { .. } => "custom-polynomial",
        }
    }
}

/// A flux `f ∈ C²(ℝ; ℝᴺ)` with its derivative `a = f′`.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxModel {
    name: String,
    family: FluxFamily,
    ambient_dim: usize,
}

impl FluxModel {
    pub fn new(name: impl Into<String>, family: FluxFamily) -> Result<Self> {
        let ambient_dim = match &family {
            FluxFamily::Linear { velocity } => velocity.len(),
            FluxFamily::DirectionalBurgers { direction } => direction.len(),
            FluxFamily::Polynomial { coeffs } => {
                let d = coeffs.first().map(|c| c.len()).unwrap_or(0);
                if coeffs.iter().any(|c| c.len() != d) {
                    return Err(Error::InvalidInput(
                        "polynomial flux coefficients differ in length".into(),
                    ));
                }
                d
            }
        };
        if ambient_dim == 0 {
            return Err(Error::InvalidInput("flux needs N >= 1".into()));
        }
        let finite = match &family {
            FluxFamily::Linear { velocity: v } | FluxFamily::DirectionalBurgers { direction: v } => {
                v.iter().all(|x| x.is_finite())
            }
            FluxFamily::Polynomial { coeffs } => coeffs.iter().flatten().all(|x| x.is_finite()),
        };
        if !finite {
            return Err(Error::InvalidInput("flux parameters are not finite".into()));
        }
        let fm = FluxModel {
            name: name.into(),
            family,
            ambient_dim,
        };
        fm.check_derivative(10.0, 2001)?;
        Ok(fm)
    }

    pub fn linear(velocity: Vec<f64>) -> Result<Self> {
        Self::new("linear", FluxFamily::Linear { velocity })
    }

    pub fn directional_burgers(direction: Vec<f64>) -> Result<Self> {
        Self::new("directional-burgers", FluxFamily::DirectionalBurgers { direction })
    }

    pub fn polynomial(coeffs: Vec<Vec<f64>>) -> Result<Self> {
        Self::new("custom-polynomial", FluxFamily::Polynomial { coeffs })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> &FluxFamily {
        &self.family
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn f(&self, xi: f64) -> Vec<f64> {
        match &self.family {
            FluxFamily::Linear { velocity } => velocity.iter().map(|c| c * xi).collect(),
            FluxFamily::DirectionalBurgers { direction } => {
                direction.iter().map(|d| d * xi * xi / 2.0).collect()
            }
            FluxFamily::Polynomial { coeffs } => (0..self.ambient_dim)
                .map(|i| horner(coeffs.iter().map(|c| c[i]), xi))
                .collect(),
        }
    }

    pub fn a(&self, xi: f64) -> Vec<f64> {
        match &self.family {
            FluxFamily::Linear { velocity } => velocity.clone(),
            FluxFamily::DirectionalBurgers { direction } => {
                direction.iter().map(|d| d * xi).collect()
            }
            FluxFamily::Polynomial { coeffs } => (0..self.ambient_dim)
                .map(|i| {
                    horner(
                        coeffs.iter().enumerate().skip(1).map(|(m, c)| m as f64 * c[i]),
                        xi,
                    )
                })
                .collect(),
        }
    }

    /// Lipschitz constant of `f` on `[−window, window]` (Euclidean norm of `a`).
    pub fn lipschitz(&self, window: f64) -> f64 {
        match &self.family {
            FluxFamily::Linear { velocity } => norm(velocity),
            FluxFamily::DirectionalBurgers { direction } => norm(direction) * window.abs(),
            FluxFamily::Polynomial { .. } => {
                let n = 4001;
                (0..n)
                    .map(|i| {
                        let xi = -window + 2.0 * window * i as f64 / (n - 1) as f64;
                        norm(&self.a(xi))
                    })
                    .fold(0.0, f64::max)
            }
        }
    }

    /// Central-difference check of `a = f′` on `[−window, window]`, h = 1e−5.
    pub fn check_derivative(&self, window: f64, points: usize) -> Result<()> {
        let h = 1e-5;
        for i in 0..points {
            let xi = -window + 2.0 * window * i as f64 / (points.max(2) - 1) as f64;
            let fp = self.f(xi + h);
            let fm = self.f(xi - h);
            let a = self.a(xi);
            for d in 0..self.ambient_dim {
                let fd = (fp[d] - fm[d]) / (2.0 * h);
                // relative to the flux magnitude too: cancellation in f(ξ±h)
                let scale = 1.0 + a[d].abs() + self.f(xi)[d].abs() * 1e-4;
                if (fd - a[d]).abs() > 1e-6 * scale {
                    return Err(Error::InvalidInput(format!(
                        "flux derivative mismatch at ξ = {xi}: {fd} vs {}",
                        a[d]
                    )));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn horner(coeffs: impl DoubleEndedIterator<Item = f64>, x: f64) -> f64 {
    coeffs.rev().fold(0.0, |acc, c| acc * x + c)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
