//! Evaluable Lipschitz maps between unit cubes.

mod anchor;
mod map;

pub use anchor::{lipschitz_regularize, mcshane_eval, random_lipschitz, Anchor, AnchorFunction};
pub use map::{combined_eval, CombineKind, CombinedFunction, Map};

use crate::error::{Error, Result};
use crate::numerics::{distance, NormKind, Point};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Something that maps `in_dim`-vectors to `out_dim`-vectors.
pub trait Evaluate {
    fn in_dim(&self) -> usize;

    fn out_dim(&self) -> usize;

    /// Evaluates at `x`; `x.len()` must equal `in_dim()`.
    fn apply(&self, x: &[f64]) -> Vec<f64>;

    /// Dimension-checked evaluation.
    fn eval(&self, x: &Point) -> Result<Vec<f64>> {
        if x.dim() != self.in_dim() {
            return Err(Error::Dimension {
                expected: self.in_dim(),
                got: x.dim(),
            });
        }
        Ok(self.apply(x.coords()))
    }
}

impl<T: Evaluate + ?Sized> Evaluate for &T {
    fn in_dim(&self) -> usize {
        (**self).in_dim()
    }

    fn out_dim(&self) -> usize {
        (**self).out_dim()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (**self).apply(x)
    }
}

/// Adapts a closure to [`Evaluate`].
pub struct FnMap<F> {
    in_dim: usize,
    out_dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> Vec<f64>> FnMap<F> {
    pub fn new(in_dim: usize, out_dim: usize, f: F) -> Self {
        FnMap { in_dim, out_dim, f }
    }
}

impl<F: Fn(&[f64]) -> Vec<f64>> Evaluate for FnMap<F> {
    fn in_dim(&self) -> usize {
        self.in_dim
    }

    fn out_dim(&self) -> usize {
        self.out_dim
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (self.f)(x)
    }
}

/// Largest ratio `||f(x) - f(y)|| / ||x - y||` over the given pairs.
pub fn max_ratio<F, I>(f: &F, pairs: I, norm: NormKind) -> f64
where
    F: Evaluate + ?Sized,
    I: IntoIterator<Item = (Vec<f64>, Vec<f64>)>,
{
    let mut best = 0.0f64;
    for (x, y) in pairs {
        let dx = distance(&x, &y, norm);
        if dx <= 1e-12 {
            continue;
        }
        let dy = distance(&f.apply(&x), &f.apply(&y), norm);
        best = best.max(dy / dx);
    }
    best
}

/// Sampled lower bound on the Lipschitz constant of `f` in `norm`.
///
/// Half of the `sample_budget` pairs are independent uniform points, the
/// other half are short perturbations of a uniform point at scales down to
/// `1e-4`, where local slopes dominate.
pub fn lipschitz_estimate<F: Evaluate + ?Sized>(
    f: &F,
    norm: NormKind,
    sample_budget: usize,
    seed: u64,
) -> Result<f64> {
    if sample_budget < 2 {
        return Err(Error::InvalidParameter("sample_budget must be >= 2".into()));
    }
    let dim = f.in_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let uniform = |rng: &mut ChaCha8Rng| (0..dim).map(|_| rng.random::<f64>()).collect::<Vec<_>>();
    let mut pairs = Vec::with_capacity(sample_budget);
    for i in 0..sample_budget {
        let x = uniform(&mut rng);
        let y = if i % 2 == 0 {
            uniform(&mut rng)
        } else {
            let scale = 10f64.powf(-rng.random_range(0.0..4.0));
            x.iter()
                .map(|&c| (c + scale * (rng.random::<f64>() - 0.5)).clamp(0.0, 1.0))
                .collect()
        };
        pairs.push((x, y));
    }
    Ok(max_ratio(f, pairs, norm))
}
