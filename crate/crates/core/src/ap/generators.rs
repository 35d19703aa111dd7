use std::fmt;

use crate::error::{Error, Result};

/// Default integer search bound per coordinate for the independence check.
pub const DEFAULT_SEARCH_BOUND: i32 = 50;
/// Default tolerance below which an integer relation counts as vanishing.
pub const DEFAULT_INDEPENDENCE_TOLERANCE: f64 = 1e-9;

/// Integer coordinates of a group element β = Σ nⱼ λⱼ.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreqIndex(pub Vec<i32>);

impl FreqIndex {
    pub fn zero(rank: usize) -> Self {
        FreqIndex(vec![0; rank])
    }

    pub fn unit(rank: usize, axis: usize) -> Self {
        let mut n = vec![0; rank];
        n[axis] = 1;
        FreqIndex(n)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn neg(&self) -> Self {
        FreqIndex(self.0.iter().map(|&c| -c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        FreqIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn max_abs(&self) -> i32 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn norm2(&self) -> f64 {
        self.0.iter().map(|&c| (c as f64) * (c as f64)).sum::<f64>().sqrt()
    }
}

impl fmt::Display for FreqIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i32>> for FreqIndex {
    fn from(v: Vec<i32>) -> Self {
        FreqIndex(v)
    }
}

/// A finite ℤ-independent frequency set Λ = {λ₁,…,λ_P} ⊂ ℝᴺ.
///
/// Independence is verified up to a finite integer search bound; see
/// [`GeneratorSet::validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSet {
    ambient_dim: usize,
    generators: Vec<Vec<f64>>,
    independence_tolerance: f64,
}

impl GeneratorSet {
    /// Accepts `candidate` iff no nonzero integer vector `n` with
    /// `|n|∞ <= bound` satisfies `|Σ nⱼλⱼ| <= tolerance`.
    ///
    /// When several relations vanish, the reported one has the smallest
    /// `|n|∞` (then `|n|₁`), normalised so its first nonzero entry is positive.
    pub fn validate(candidate: Vec<Vec<f64>>, tolerance: f64, bound: i32) -> Result<Self> {
        if candidate.is_empty() {
            return Err(Error::InvalidInput("generator set is empty".into()));
        }
        if bound < 1 {
            return Err(Error::InvalidInput(format!("search bound {bound} < 1")));
        }
        if !(tolerance >= 0.0 && tolerance.is_finite()) {
            return Err(Error::InvalidInput(format!("tolerance {tolerance}")));
        }
        let ambient_dim = candidate[0].len();
        if ambient_dim == 0 {
            return Err(Error::InvalidInput("generators must have N >= 1".into()));
        }
        for (j, g) in candidate.iter().enumerate() {
            if g.len() != ambient_dim {
                return Err(Error::InvalidInput(format!(
                    "generator {j} has length {} (expected {ambient_dim})",
                    g.len()
                )));
            }
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("generator {j} is not finite")));
            }
            if g.iter().all(|&v| v == 0.0) {
                return Err(Error::ZeroGenerator(j));
            }
        }
        if let Some(n) = find_relation(&candidate, tolerance, bound) {
            return Err(Error::DependentGenerators(n));
        }
        Ok(GeneratorSet {
            ambient_dim,
            generators: candidate,
            independence_tolerance: tolerance,
        })
    }

    pub fn new(candidate: Vec<Vec<f64>>) -> Result<Self> {
        Self::validate(
            candidate,
            DEFAULT_INDEPENDENCE_TOLERANCE,
            DEFAULT_SEARCH_BOUND,
        )
    }

    /// The canonical basis of ℝᴺ, i.e. the purely periodic case.
    pub fn canonical(n: usize) -> Self {
        let generators = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        GeneratorSet {
            ambient_dim: n,
            generators,
            independence_tolerance: DEFAULT_INDEPENDENCE_TOLERANCE,
        }
    }

    /// N, the dimension of physical space.
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// P, the number of generators (torus dimension).
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    pub fn generator(&self, j: usize) -> &[f64] {
        &self.generators[j]
    }

    pub fn independence_tolerance(&self) -> f64 {
        self.independence_tolerance
    }

    /// β = Σ nⱼ λⱼ ∈ ℝᴺ.
    pub fn frequency(&self, n: &FreqIndex) -> Vec<f64> {
        let mut beta = vec![0.0; self.ambient_dim];
        for (nj, lam) in n.0.iter().zip(&self.generators) {
            for (b, l) in beta.iter_mut().zip(lam) {
                *b += *nj as f64 * l;
            }
        }
        beta
    }

    /// The reduction map y(x) = (λ₁·x, …, λ_P·x).
    pub fn reduce(&self, x: &[f64]) -> Vec<f64> {
        self.generators.iter().map(|lam| dot(lam, x)).collect()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn find_relation(gens: &[Vec<f64>], tolerance: f64, bound: i32) -> Option<FreqIndex> {
    let p = gens.len();
    let dim = gens[0].len();
    let mut n = vec![-bound; p];
    let mut best: Option<(i32, i64, Vec<i32>)> = None;
    let mut beta = vec![0.0; dim];
    loop {
        // Only one of ±n is inspected: the first nonzero entry is positive.
        if let Some(first) = n.iter().find(|&&c| c != 0) {
            if *first > 0 {
                beta.iter_mut().for_each(|b| *b = 0.0);
                for (c, lam) in n.iter().zip(gens) {
                    for (b, l) in beta.iter_mut().zip(lam) {
                        *b += *c as f64 * l;
                    }
                }
                let norm = beta.iter().map(|b| b * b).sum::<f64>().sqrt();
                if norm <= tolerance {
                    let key = (
                        n.iter().map(|c| c.abs()).max().unwrap(),
                        n.iter().map(|&c| c.abs() as i64).sum::<i64>(),
                    );
                    let better = match &best {
                        None => true,
                        Some((a, b, _)) => key < (*a, *b),
                    };
                    if better {
                        best = Some((key.0, key.1, n.clone()));
                    }
                }
            }
        }
        // odometer
        let mut axis = p;
        loop {
            if axis == 0 {
                return best.map(|(_, _, n)| FreqIndex(n));
            }
            axis -= 1;
            if n[axis] < bound {
                n[axis] += 1;
                for c in n.iter_mut().skip(axis + 1) {
                    *c = -bound;
                }
                break;
            }
        }
    }
}
